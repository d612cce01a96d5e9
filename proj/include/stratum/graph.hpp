// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratum/errors.hpp"

namespace stratum {

/// Axis-aligned box in normalized image coordinates, x to the right and
/// y downward. Valid when 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1.
struct BBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;

    bool valid() const;
    bool operator==(const BBox&) const = default;
};

/// One object in the scene. `opacity` is the semantic opacity alpha in
/// [0, 1); alpha = 1 is rejected outright (the fully opaque limit is
/// approached with values such as 0.999999, never reached).
struct SceneObject {
    std::string id;
    std::vector<std::string> prompt_tokens;   // empty = blank background prompt
    std::optional<int> subject_index;         // index into prompt_tokens
    BBox bbox;
    double opacity = 0.8;
    std::array<double, 3> color{0.0, 0.0, 0.0};  // compositor mode only
    bool has_color = false;
    std::uint64_t embedding_seed = 0;         // toy-attention mode only

    bool operator==(const SceneObject&) const = default;
};

/// Objects plus directed "occludes" edges. An edge (a, b) asserts that a
/// is in front of b. Object input order is significant: it breaks ties
/// among objects the edges leave unordered.
struct OcclusionGraph {
    std::vector<SceneObject> objects;
    std::vector<std::pair<std::string, std::string>> edges;  // (occluder, occluded)

    /// Index of the object with the given id, or -1.
    int find(const std::string& id) const;

    bool operator==(const OcclusionGraph&) const = default;
};

enum class ViolationKind {
    DuplicateId,
    BadBBox,
    BadOpacity,
    BadSubjectIndex,
    DanglingEdge,
    SelfEdge,
    Cycle,
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string message;
    std::vector<std::string> ids;  // objects involved (cycle members, edge endpoints, ...)
    int object_index = -1;         // >= 0 when the violation is about objects[i]
    int edge_index = -1;           // >= 0 when the violation is about edges[i]
};

/// Every violation found in one pass; empty means the graph is valid.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Violations rewritten as located diagnostics: "objects[2].opacity",
/// "occlusions[0]" and so on, so file-oriented callers can point at the
/// offending field.
std::vector<Diagnostic> to_diagnostics(const ValidationReport& report);

/// Checks every graph invariant and reports all violations: bad boxes,
/// opacity out of [0, 1), duplicate ids, dangling edge endpoints,
/// self-edges and directed cycles (with their member ids). Never throws.
ValidationReport validate_graph(const OcclusionGraph& graph);

/// Front-to-back object ids: index 0 is closest to the camera. Satisfies
/// position(occluder) < position(occluded) for every edge.
using FrontToBackOrder = std::vector<std::string>;

/// Kahn topological sort with deterministic tie-breaking: whenever several
/// objects are simultaneously available, the one earliest in input order
/// is emitted first. Call only on graphs that validate cleanly; throws
/// CycleError if a cycle is present anyway.
FrontToBackOrder topological_order(const OcclusionGraph& graph);

}  // namespace stratum
