// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "stratum/errors.hpp"

namespace stratum {

bool BBox::valid() const {
    return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1) &&
           0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0;
}

int OcclusionGraph::find(const std::string& id) const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (objects[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::DuplicateId: return "duplicate_id";
        case ViolationKind::BadBBox: return "bad_bbox";
        case ViolationKind::BadOpacity: return "bad_opacity";
        case ViolationKind::BadSubjectIndex: return "bad_subject_index";
        case ViolationKind::DanglingEdge: return "dangling_edge";
        case ViolationKind::SelfEdge: return "self_edge";
        case ViolationKind::Cycle: return "cycle";
    }
    return "unknown";
}

namespace {

// Strongly connected components, Tarjan. Components of size >= 2 are the
// directed cycles we report; self-edges are flagged separately.
class SccFinder {
public:
    SccFinder(int n, const std::vector<std::vector<int>>& adj) : adj_(adj) {
        index_.assign(n, -1);
        lowlink_.assign(n, 0);
        on_stack_.assign(n, false);
        for (int v = 0; v < n; ++v) {
            if (index_[v] < 0) strongconnect(v);
        }
    }

    const std::vector<std::vector<int>>& components() const { return components_; }

private:
    void strongconnect(int v) {
        // Iterative to keep deep chains off the call stack.
        struct Frame {
            int v;
            std::size_t next_child;
        };
        std::vector<Frame> frames{{v, 0}};
        open(v);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next_child < adj_[f.v].size()) {
                int w = adj_[f.v][f.next_child++];
                if (index_[w] < 0) {
                    open(w);
                    frames.push_back({w, 0});
                } else if (on_stack_[w]) {
                    lowlink_[f.v] = std::min(lowlink_[f.v], index_[w]);
                }
            } else {
                if (lowlink_[f.v] == index_[f.v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack_.back();
                        stack_.pop_back();
                        on_stack_[w] = false;
                        comp.push_back(w);
                    } while (w != f.v);
                    if (comp.size() >= 2) {
                        std::sort(comp.begin(), comp.end());
                        components_.push_back(std::move(comp));
                    }
                }
                int done = f.v;
                frames.pop_back();
                if (!frames.empty()) {
                    lowlink_[frames.back().v] = std::min(lowlink_[frames.back().v], lowlink_[done]);
                }
            }
        }
    }

    void open(int v) {
        index_[v] = lowlink_[v] = counter_++;
        stack_.push_back(v);
        on_stack_[v] = true;
    }

    const std::vector<std::vector<int>>& adj_;
    std::vector<int> index_;
    std::vector<int> lowlink_;
    std::vector<bool> on_stack_;
    std::vector<int> stack_;
    std::vector<std::vector<int>> components_;
    int counter_ = 0;
};

}  // namespace

ValidationReport validate_graph(const OcclusionGraph& graph) {
    ValidationReport report;
    const int n = static_cast<int>(graph.objects.size());

    std::map<std::string, int> first_index;
    for (int i = 0; i < n; ++i) {
        const SceneObject& obj = graph.objects[i];
        auto [it, inserted] = first_index.emplace(obj.id, i);
        if (!inserted) {
            report.violations.push_back(
                {ViolationKind::DuplicateId,
                 "object id \"" + obj.id + "\" already used by objects[" +
                     std::to_string(it->second) + "]",
                 {obj.id},
                 i,
                 -1});
        }
        if (!obj.bbox.valid()) {
            std::ostringstream msg;
            msg << "bbox (" << obj.bbox.x0 << ", " << obj.bbox.y0 << ", " << obj.bbox.x1 << ", "
                << obj.bbox.y1 << ") must satisfy 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1";
            report.violations.push_back({ViolationKind::BadBBox, msg.str(), {obj.id}, i, -1});
        }
        if (!(std::isfinite(obj.opacity) && 0.0 <= obj.opacity && obj.opacity < 1.0)) {
            report.violations.push_back(
                {ViolationKind::BadOpacity,
                 "opacity " + std::to_string(obj.opacity) + " must lie in [0, 1)",
                 {obj.id},
                 i,
                 -1});
        }
        if (obj.subject_index &&
            (*obj.subject_index < 0 ||
             *obj.subject_index >= static_cast<int>(obj.prompt_tokens.size()))) {
            report.violations.push_back(
                {ViolationKind::BadSubjectIndex,
                 "subject_index " + std::to_string(*obj.subject_index) +
                     " out of range for a prompt of " +
                     std::to_string(obj.prompt_tokens.size()) + " token(s)",
                 {obj.id},
                 i,
                 -1});
        }
    }

    std::vector<std::vector<int>> adj(n);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& [from, to] = graph.edges[e];
        const int fi = graph.find(from);
        const int ti = graph.find(to);
        if (fi < 0 || ti < 0) {
            const std::string& unknown = fi < 0 ? from : to;
            report.violations.push_back({ViolationKind::DanglingEdge,
                                         "edge names unknown object id \"" + unknown + "\"",
                                         {unknown},
                                         -1,
                                         static_cast<int>(e)});
            if (fi < 0 && ti < 0 && from != to) {
                report.violations.push_back({ViolationKind::DanglingEdge,
                                             "edge names unknown object id \"" + to + "\"",
                                             {to},
                                             -1,
                                             static_cast<int>(e)});
            }
            continue;
        }
        if (fi == ti) {
            report.violations.push_back({ViolationKind::SelfEdge,
                                         "object \"" + from + "\" cannot occlude itself",
                                         {from},
                                         -1,
                                         static_cast<int>(e)});
            continue;
        }
        adj[fi].push_back(ti);
    }

    SccFinder scc(n, adj);
    for (const auto& comp : scc.components()) {
        Violation v{ViolationKind::Cycle, "", {}, -1, -1};
        std::ostringstream msg;
        msg << "occlusion edges form a cycle among {";
        for (std::size_t i = 0; i < comp.size(); ++i) {
            if (i) msg << ", ";
            msg << graph.objects[comp[i]].id;
            v.ids.push_back(graph.objects[comp[i]].id);
        }
        msg << "}";
        v.message = msg.str();
        report.violations.push_back(std::move(v));
    }

    return report;
}

std::vector<Diagnostic> to_diagnostics(const ValidationReport& report) {
    std::vector<Diagnostic> out;
    out.reserve(report.violations.size());
    for (const Violation& v : report.violations) {
        std::string path;
        if (v.object_index >= 0) {
            path = "objects[" + std::to_string(v.object_index) + "]";
            switch (v.kind) {
                case ViolationKind::DuplicateId: path += ".id"; break;
                case ViolationKind::BadBBox: path += ".bbox"; break;
                case ViolationKind::BadOpacity: path += ".opacity"; break;
                case ViolationKind::BadSubjectIndex: path += ".subject_index"; break;
                default: break;
            }
        } else if (v.edge_index >= 0) {
            path = "occlusions[" + std::to_string(v.edge_index) + "]";
        } else {
            path = "occlusions";
        }
        out.push_back(Diagnostic{std::move(path), v.message});
    }
    return out;
}

FrontToBackOrder topological_order(const OcclusionGraph& graph) {
    const int n = static_cast<int>(graph.objects.size());
    std::vector<std::vector<int>> adj(n);
    std::vector<int> in_degree(n, 0);
    for (const auto& [from, to] : graph.edges) {
        const int fi = graph.find(from);
        const int ti = graph.find(to);
        if (fi < 0 || ti < 0 || fi == ti) continue;  // gated by validate_graph
        adj[fi].push_back(ti);
        ++in_degree[ti];
    }

    // Min-heap over input indices: among simultaneously available objects
    // the earliest in input order wins.
    std::priority_queue<int, std::vector<int>, std::greater<int>> available;
    for (int i = 0; i < n; ++i) {
        if (in_degree[i] == 0) available.push(i);
    }

    FrontToBackOrder order;
    order.reserve(n);
    while (!available.empty()) {
        const int v = available.top();
        available.pop();
        order.push_back(graph.objects[v].id);
        for (int w : adj[v]) {
            if (--in_degree[w] == 0) available.push(w);
        }
    }

    if (static_cast<int>(order.size()) != n) {
        throw CycleError("occlusion graph contains a cycle; run validate_graph for details");
    }
    return order;
}

}  // namespace stratum
