// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "stratum/graph.hpp"
#include "stratum/schedule.hpp"

namespace stratum {

/// Density-schedule settings shared by every object in a scene file.
struct SceneSchedule {
    ScheduleKind kind = ScheduleKind::InverseProportional;
    int steps = 25;

    bool operator==(const SceneSchedule&) const = default;
};

/// Renderer settings carried by a scene file.
struct RenderSettings {
    bool attention_shaping = true;
    double epsilon = 1e-8;

    bool operator==(const RenderSettings&) const = default;
};

/// A fully validated scene: canvas size, objects with their occlusion
/// edges, schedule and renderer settings.
struct SceneFile {
    int canvas_width = 0;
    int canvas_height = 0;
    OcclusionGraph graph;
    SceneSchedule schedule;
    RenderSettings render;
};

bool operator==(const SceneFile& a, const SceneFile& b);

/// Parses scene JSON text. Throws ParseError when the text is not valid
/// JSON and ValidationError otherwise, carrying one diagnostic per problem
/// found (every problem, not just the first), each located by a field path
/// such as "objects[2].opacity". Unknown fields are rejected — they are
/// almost always typos of meaningful ones. Omitted optional fields take
/// their defaults (opacity 0.8, embedding_seed 0, schedule
/// inverse_proportional over 25 steps, attention shaping on, epsilon 1e-8).
SceneFile parse_scene_text(const std::string& text);

/// parse_scene_text over the contents of a file. Throws ParseError when the
/// file cannot be read.
SceneFile parse_scene(const std::string& path);

/// Serializes a scene back to JSON text. parse_scene_text of the result
/// reproduces the scene exactly.
std::string scene_to_json(const SceneFile& scene);

}  // namespace stratum
