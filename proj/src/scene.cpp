// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/scene.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "stratum/errors.hpp"

namespace stratum {

namespace {

using nlohmann::json;

/// Collects located diagnostics while walking the parsed JSON, so a single
/// failed parse reports every problem at once.
class Collector {
  public:
    void add(std::string path, std::string message) {
        diagnostics_.push_back(Diagnostic{std::move(path), std::move(message)});
    }

    bool clean() const { return diagnostics_.empty(); }

    [[noreturn]] void throw_all() {
        std::ostringstream what;
        what << "scene has " << diagnostics_.size()
             << (diagnostics_.size() == 1 ? " problem" : " problems");
        for (const Diagnostic& d : diagnostics_) {
            what << "\n  " << (d.path.empty() ? "(top level)" : d.path) << ": " << d.message;
        }
        throw ValidationError(what.str(), std::move(diagnostics_));
    }

    void append(std::vector<Diagnostic> more) {
        for (Diagnostic& d : more) diagnostics_.push_back(std::move(d));
    }

  private:
    std::vector<Diagnostic> diagnostics_;
};

/// Flags every key of `value` that is not in `allowed`. Typos in optional
/// fields would otherwise silently revert to defaults.
void reject_unknown_fields(const json& value, std::initializer_list<const char*> allowed,
                           const std::string& path, Collector& out) {
    for (const auto& item : value.items()) {
        bool known = false;
        for (const char* name : allowed) {
            if (item.key() == name) known = true;
        }
        if (!known) {
            out.add(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
        }
    }
}

bool require_object(const json& value, const std::string& path, Collector& out) {
    if (value.is_object()) return true;
    out.add(path, "must be an object");
    return false;
}

/// Reads a positive integer field; returns fallback (and reports) on any
/// problem so parsing can continue.
int positive_int_field(const json& parent, const char* name, const std::string& path,
                       Collector& out, int fallback) {
    if (!parent.contains(name)) {
        out.add(path, "missing required field");
        return fallback;
    }
    const json& v = parent.at(name);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        out.add(path, "must be an integer >= 1");
        return fallback;
    }
    return static_cast<int>(v.get<long long>());
}

SceneObject parse_object(const json& value, const std::string& path, Collector& out) {
    SceneObject object;
    if (!require_object(value, path, out)) return object;

    reject_unknown_fields(
        value, {"id", "prompt", "subject_index", "bbox", "opacity", "color", "embedding_seed"},
        path, out);

    if (!value.contains("id")) {
        out.add(path + ".id", "missing required field");
    } else if (!value.at("id").is_string() || value.at("id").get<std::string>().empty()) {
        out.add(path + ".id", "must be a non-empty string");
    } else {
        object.id = value.at("id").get<std::string>();
    }

    if (value.contains("prompt")) {
        const json& prompt = value.at("prompt");
        if (!prompt.is_array()) {
            out.add(path + ".prompt", "must be an array of token strings");
        } else {
            for (std::size_t i = 0; i < prompt.size(); ++i) {
                if (!prompt[i].is_string()) {
                    out.add(path + ".prompt[" + std::to_string(i) + "]", "must be a string");
                } else {
                    object.prompt_tokens.push_back(prompt[i].get<std::string>());
                }
            }
        }
    }

    if (value.contains("subject_index")) {
        const json& idx = value.at("subject_index");
        if (!idx.is_number_integer()) {
            out.add(path + ".subject_index", "must be an integer");
        } else {
            object.subject_index = static_cast<int>(idx.get<long long>());
        }
    }

    if (!value.contains("bbox")) {
        out.add(path + ".bbox", "missing required field");
    } else {
        const json& bbox = value.at("bbox");
        if (!bbox.is_array() || bbox.size() != 4 || !bbox[0].is_number() ||
            !bbox[1].is_number() || !bbox[2].is_number() || !bbox[3].is_number()) {
            out.add(path + ".bbox", "must be an array of four numbers [x0, y0, x1, y1]");
        } else {
            object.bbox = BBox{bbox[0].get<double>(), bbox[1].get<double>(),
                               bbox[2].get<double>(), bbox[3].get<double>()};
        }
    }

    if (value.contains("opacity")) {
        const json& opacity = value.at("opacity");
        if (!opacity.is_number()) {
            out.add(path + ".opacity", "must be a number");
        } else {
            object.opacity = opacity.get<double>();
        }
    }

    if (value.contains("color")) {
        const json& color = value.at("color");
        if (!color.is_array() || color.size() != 3 || !color[0].is_number() ||
            !color[1].is_number() || !color[2].is_number()) {
            out.add(path + ".color", "must be an array of three numbers [r, g, b]");
        } else {
            object.has_color = true;
            for (int ch = 0; ch < 3; ++ch) {
                const double v = color[ch].get<double>();
                if (v < 0.0 || v > 1.0) {
                    out.add(path + ".color[" + std::to_string(ch) + "]", "must be in [0, 1]");
                }
                object.color[ch] = v;
            }
        }
    }

    if (value.contains("embedding_seed")) {
        const json& seed = value.at("embedding_seed");
        if (!seed.is_number_unsigned()) {
            out.add(path + ".embedding_seed", "must be a non-negative integer");
        } else {
            object.embedding_seed = seed.get<std::uint64_t>();
        }
    }

    return object;
}

}  // namespace

bool operator==(const SceneFile& a, const SceneFile& b) {
    return a.canvas_width == b.canvas_width && a.canvas_height == b.canvas_height &&
           a.graph == b.graph && a.schedule == b.schedule && a.render == b.render;
}

SceneFile parse_scene_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("scene is not valid JSON: ") + err.what());
    }

    Collector out;
    SceneFile scene;

    if (!root.is_object()) {
        out.add("", "top-level value must be an object");
        out.throw_all();
    }

    reject_unknown_fields(root, {"canvas", "objects", "occlusions", "schedule", "render"}, "",
                          out);

    if (!root.contains("canvas")) {
        out.add("canvas", "missing required field");
    } else if (require_object(root.at("canvas"), "canvas", out)) {
        const json& canvas = root.at("canvas");
        reject_unknown_fields(canvas, {"width", "height"}, "canvas", out);
        scene.canvas_width = positive_int_field(canvas, "width", "canvas.width", out, 1);
        scene.canvas_height = positive_int_field(canvas, "height", "canvas.height", out, 1);
    }

    if (!root.contains("objects")) {
        out.add("objects", "missing required field");
    } else if (!root.at("objects").is_array() || root.at("objects").empty()) {
        out.add("objects", "must be a non-empty array");
    } else {
        const json& objects = root.at("objects");
        for (std::size_t i = 0; i < objects.size(); ++i) {
            scene.graph.objects.push_back(
                parse_object(objects[i], "objects[" + std::to_string(i) + "]", out));
        }
    }

    if (root.contains("occlusions")) {
        const json& occlusions = root.at("occlusions");
        if (!occlusions.is_array()) {
            out.add("occlusions", "must be an array of [occluder_id, occluded_id] pairs");
        } else {
            for (std::size_t i = 0; i < occlusions.size(); ++i) {
                const json& edge = occlusions[i];
                const std::string path = "occlusions[" + std::to_string(i) + "]";
                if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() ||
                    !edge[1].is_string()) {
                    out.add(path, "must be a pair of object id strings");
                } else {
                    scene.graph.edges.emplace_back(edge[0].get<std::string>(),
                                                   edge[1].get<std::string>());
                }
            }
        }
    }

    if (root.contains("schedule") && require_object(root.at("schedule"), "schedule", out)) {
        const json& schedule = root.at("schedule");
        reject_unknown_fields(schedule, {"kind", "steps"}, "schedule", out);
        if (schedule.contains("kind")) {
            const json& kind = schedule.at("kind");
            if (!kind.is_string() ||
                !schedule_kind_from_string(kind.get<std::string>(), scene.schedule.kind)) {
                out.add("schedule.kind",
                        "must be one of \"inverse_proportional\", \"fixed_opaque\", "
                        "\"fixed_density\"");
            }
        }
        if (schedule.contains("steps")) {
            scene.schedule.steps =
                positive_int_field(schedule, "steps", "schedule.steps", out, 25);
        }
    }

    if (root.contains("render") && require_object(root.at("render"), "render", out)) {
        const json& render = root.at("render");
        reject_unknown_fields(render, {"attention_shaping", "epsilon"}, "render", out);
        if (render.contains("attention_shaping")) {
            if (!render.at("attention_shaping").is_boolean()) {
                out.add("render.attention_shaping", "must be a boolean");
            } else {
                scene.render.attention_shaping = render.at("attention_shaping").get<bool>();
            }
        }
        if (render.contains("epsilon")) {
            const json& epsilon = render.at("epsilon");
            if (!epsilon.is_number() || !(epsilon.get<double>() > 0.0)) {
                out.add("render.epsilon", "must be a number > 0");
            } else {
                scene.render.epsilon = epsilon.get<double>();
            }
        }
    }

    // Semantic validation runs only on structurally sound input; half-built
    // objects would produce misleading secondary diagnostics.
    if (out.clean()) {
        const ValidationReport report = validate_graph(scene.graph);
        if (!report.ok()) out.append(to_diagnostics(report));
    }

    if (!out.clean()) out.throw_all();
    return scene;
}

SceneFile parse_scene(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scene file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scene_text(buffer.str());
}

std::string scene_to_json(const SceneFile& scene) {
    json root;
    root["canvas"] = {{"width", scene.canvas_width}, {"height", scene.canvas_height}};

    json objects = json::array();
    for (const SceneObject& object : scene.graph.objects) {
        json value;
        value["id"] = object.id;
        value["prompt"] = object.prompt_tokens;
        if (object.subject_index) value["subject_index"] = *object.subject_index;
        value["bbox"] = {object.bbox.x0, object.bbox.y0, object.bbox.x1, object.bbox.y1};
        value["opacity"] = object.opacity;
        if (object.has_color) value["color"] = object.color;
        value["embedding_seed"] = object.embedding_seed;
        objects.push_back(std::move(value));
    }
    root["objects"] = std::move(objects);

    json occlusions = json::array();
    for (const auto& [from, to] : scene.graph.edges) {
        occlusions.push_back(json::array({from, to}));
    }
    root["occlusions"] = std::move(occlusions);

    root["schedule"] = {{"kind", to_string(scene.schedule.kind)},
                        {"steps", scene.schedule.steps}};
    root["render"] = {{"attention_shaping", scene.render.attention_shaping},
                      {"epsilon", scene.render.epsilon}};

    return root.dump(2) + "\n";
}

}  // namespace stratum
