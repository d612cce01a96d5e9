// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: parses a scene file and exposes each stage of the
// pipeline as a subcommand, from validation through full toy generation.
// Images go out as binary PGM/PPM, tables as CSV/JSON, runs as JSON traces;
// all artifacts are bit-reproducible for a given scene and seed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stratum/attention.hpp"
#include "stratum/errors.hpp"
#include "stratum/geometry.hpp"
#include "stratum/graph.hpp"
#include "stratum/harness.hpp"
#include "stratum/image_io.hpp"
#include "stratum/oracle.hpp"
#include "stratum/render.hpp"
#include "stratum/rng.hpp"
#include "stratum/scene.hpp"
#include "stratum/schedule.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string scene_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int steps = 0;  // 0 = use the scene's schedule.steps
    bool no_attention_shaping = false;
    bool json_diagnostics = false;

    // sweep
    std::string sweep_object;
    std::vector<double> alphas;

    // simulate
    int layers = 2;
    int channels = 8;
    double blend = 1.0;
};

json diagnostics_to_json(const std::vector<stratum::Diagnostic>& diagnostics) {
    json list = json::array();
    for (const auto& d : diagnostics) {
        list.push_back({{"path", d.path}, {"message", d.message}});
    }
    return list;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw stratum::ParseError("cannot open file for writing: " + path.string());
    out << text;
    std::cout << "wrote " << path.string() << "\n";
}

int effective_steps(const stratum::SceneFile& scene, const Options& opts) {
    return opts.steps > 0 ? opts.steps : scene.schedule.steps;
}

bool shaping_enabled(const stratum::SceneFile& scene, const Options& opts) {
    return scene.render.attention_shaping && !opts.no_attention_shaping;
}

void cmd_validate(const stratum::SceneFile& scene, const Options& opts) {
    // parse_scene has already thrown on any problem; reaching here means OK.
    if (opts.json_diagnostics) {
        json out = {{"ok", true},
                    {"diagnostics", json::array()},
                    {"objects", scene.graph.objects.size()},
                    {"edges", scene.graph.edges.size()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "scene OK: " << scene.graph.objects.size() << " objects, "
                  << scene.graph.edges.size() << " occlusion edges\n";
    }
}

void cmd_sort(const stratum::SceneFile& scene, const Options& opts) {
    const stratum::FrontToBackOrder order = stratum::topological_order(scene.graph);
    const json order_json = order;
    std::cout << order_json.dump() << "\n";
    write_text(fs::path(opts.out_dir) / "order.json",
               json{{"order", order}}.dump(2) + "\n");
}

void cmd_schedule(const stratum::SceneFile& scene, const Options& opts) {
    const int steps = effective_steps(scene, opts);
    std::vector<stratum::DensitySchedule> schedules;
    schedules.reserve(scene.graph.objects.size());
    for (const auto& object : scene.graph.objects) {
        schedules.push_back(stratum::DensitySchedule{
            scene.schedule.kind, stratum::opacity_to_density(object.opacity), steps});
    }
    const auto table = stratum::schedule_table(schedules, steps);

    std::string csv = "id";
    for (int t = steps; t >= 1; --t) csv += ",t=" + std::to_string(t);
    csv += "\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        csv += scene.graph.objects[i].id;
        for (double sigma : table[i]) {
            csv += "," + json(sigma).dump();  // shortest round-trip decimal
        }
        csv += "\n";
    }
    std::cout << csv;

    json objects = json::array();
    for (std::size_t i = 0; i < table.size(); ++i) {
        objects.push_back({{"id", scene.graph.objects[i].id},
                           {"density", schedules[i].density},
                           {"sigmas", table[i]}});
    }
    const json out = {{"kind", stratum::to_string(scene.schedule.kind)},
                      {"steps", steps},
                      {"objects", objects}};

    write_text(fs::path(opts.out_dir) / "schedule.csv", csv);
    write_text(fs::path(opts.out_dir) / "schedule.json", out.dump(2) + "\n");
}

void cmd_maps(const stratum::SceneFile& scene, const Options& opts) {
    const int width = scene.canvas_width;
    const int height = scene.canvas_height;
    const bool shaping = shaping_enabled(scene, opts);
    const stratum::FrontToBackOrder order = stratum::topological_order(scene.graph);

    // Query grid for attention shaping, shared across objects.
    constexpr int kQueryChannels = 8;
    stratum::FeatureGrid query(width, height, kQueryChannels, 0.0);
    if (shaping) {
        std::mt19937_64 rng(stratum::mix_seed(opts.seed, stratum::fnv1a64("map-query")));
        for (double& v : query.values) v = stratum::gaussian(rng);
    }

    std::vector<stratum::ScalarMap> maps;
    std::vector<double> sigmas;
    for (const std::string& id : order) {
        const auto& object = scene.graph.objects[scene.graph.find(id)];
        const stratum::ScalarMap box = stratum::rasterize_bbox(object.bbox, width, height);
        if (shaping && !object.prompt_tokens.empty()) {
            const auto prompt =
                stratum::embed_prompt(object.prompt_tokens, object.embedding_seed, kQueryChannels);
            const auto weights = stratum::cross_attention(query, prompt).second;
            const auto raw = stratum::subject_attention_map(
                weights, stratum::subject_token_index(object), width, height);
            maps.push_back(
                stratum::transmittance_map(stratum::normalize_attention_map(raw), box));
        } else {
            maps.push_back(stratum::box_only_transmittance_map(box));
        }
        sigmas.push_back(stratum::opacity_to_density(object.opacity));
    }

    const auto transmittance = stratum::accumulated_transmittance(maps, sigmas);
    stratum::ScalarMap normalization(width, height, 0.0);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const double alpha = stratum::density_to_opacity(sigmas[i]);
        for (std::size_t p = 0; p < normalization.size(); ++p) {
            normalization.values[p] += transmittance[i].values[p] * alpha * maps[i].values[p];
        }
    }

    const fs::path dir(opts.out_dir);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        stratum::write_pgm(maps[i], (dir / ("map_" + order[i] + "_M.pgm")).string());
        std::cout << "wrote " << (dir / ("map_" + order[i] + "_M.pgm")).string() << "\n";
        stratum::write_pgm(transmittance[i], (dir / ("map_" + order[i] + "_T.pgm")).string());
        std::cout << "wrote " << (dir / ("map_" + order[i] + "_T.pgm")).string() << "\n";
    }
    stratum::write_pgm(normalization, (dir / "S.pgm").string());
    std::cout << "wrote " << (dir / "S.pgm").string() << "\n";
}

void cmd_render(const stratum::SceneFile& scene, const Options& opts) {
    const stratum::FeatureGrid image = stratum::composite_pixels(
        scene.graph, scene.canvas_width, scene.canvas_height, shaping_enabled(scene, opts),
        opts.seed);
    const fs::path path = fs::path(opts.out_dir) / "render.ppm";
    stratum::write_ppm(image, path.string());
    std::cout << "wrote " << path.string() << " (" << image.width << "x" << image.height
              << ")\n";
}

void cmd_simulate(const stratum::SceneFile& scene, const Options& opts) {
    stratum::ToyDenoiserConfig config;
    config.layers = opts.layers;
    config.width = scene.canvas_width;
    config.height = scene.canvas_height;
    config.channels = opts.channels;
    config.steps = effective_steps(scene, opts);
    config.seed = opts.seed;
    config.blend = opts.blend;
    config.schedule_kind = scene.schedule.kind;
    config.attention_shaping = shaping_enabled(scene, opts);
    config.epsilon = scene.render.epsilon;

    const stratum::GenerationResult result = stratum::run_generation(scene.graph, config);

    json steps_json = json::array();
    for (const auto& step : result.traces) {
        json layers = json::array();
        for (const auto& layer : step.layers) {
            layers.push_back({{"enabled", layer.enabled},
                              {"sigmas", layer.sigmas},
                              {"mean_weights", layer.mean_weights},
                              {"s_min", layer.s_min},
                              {"s_mean", layer.s_mean}});
        }
        steps_json.push_back(
            {{"t", step.t}, {"latent_norm", step.latent_norm}, {"layers", layers}});
    }
    const double final_norm = result.traces.back().latent_norm;
    const json trace = {{"order", result.order},
                        {"steps", config.steps},
                        {"layers", config.layers},
                        {"final_norm", final_norm},
                        {"trace", steps_json}};
    const json latent = {{"width", result.latent.width},
                         {"height", result.latent.height},
                         {"channels", result.latent.channels},
                         {"values", result.latent.values}};

    std::cout << "order:";
    for (const auto& id : result.order) std::cout << " " << id;
    std::cout << "\nsteps: " << config.steps << ", layers: " << config.layers
              << ", grid: " << config.width << "x" << config.height << "x" << config.channels
              << "\nfinal latent norm: " << json(final_norm).dump() << "\n";

    write_text(fs::path(opts.out_dir) / "trace.json", trace.dump(2) + "\n");
    write_text(fs::path(opts.out_dir) / "latent.json", latent.dump(2) + "\n");
}

void cmd_sweep(const stratum::SceneFile& scene, const Options& opts) {
    std::vector<double> alphas = opts.alphas;
    if (alphas.empty()) {
        for (int k = 1; k <= 9; ++k) alphas.push_back(0.1 * k);
    }
    const auto frames = stratum::opacity_sweep(scene.graph, opts.sweep_object, alphas,
                                               scene.canvas_width, scene.canvas_height);

    const fs::path dir(opts.out_dir);
    json frames_json = json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string name = "sweep_" + std::to_string(i + 1) + ".ppm";
        stratum::write_ppm(frames[i].image, (dir / name).string());
        frames_json.push_back({{"alpha", frames[i].alpha},
                               {"file", name},
                               {"front_weight_share", frames[i].front_weight_share}});
        std::cout << "alpha " << json(frames[i].alpha).dump() << " -> weight share "
                  << json(frames[i].front_weight_share).dump() << " (" << name << ")\n";
    }
    write_text(dir / "sweep.json",
               json{{"object", opts.sweep_object}, {"frames", frames_json}}.dump(2) + "\n");
}

int report_failure(const Options& opts, const std::string& kind, const std::string& message,
                   const std::vector<stratum::Diagnostic>& diagnostics) {
    if (opts.json_diagnostics) {
        json out = {{"ok", false}, {"error", kind}, {"message", message}};
        out["diagnostics"] = diagnostics_to_json(diagnostics);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cerr << "error (" << kind << "): " << message << "\n";
        for (const auto& d : diagnostics) {
            std::cerr << "  " << (d.path.empty() ? "(top level)" : d.path) << ": " << d.message
                      << "\n";
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stratum: occlusion-aware latent layer compositor"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    app.add_option("--scene", opts.scene_path, "Scene JSON file")->required();
    app.add_option("--out", opts.out_dir, "Output directory (default: current)");
    app.add_option("--seed", opts.seed, "Seed for every pseudo-random draw");
    app.add_option("--steps", opts.steps, "Override the scene's schedule steps")
        ->check(CLI::PositiveNumber);
    app.add_flag("--no-attention-shaping", opts.no_attention_shaping,
                 "Use bare box masks, ignoring attention maps");
    app.add_flag("--json-diagnostics", opts.json_diagnostics,
                 "Report success/failure as JSON on stdout");

    CLI::App* validate = app.add_subcommand("validate", "Check the scene and report problems");
    CLI::App* sort = app.add_subcommand("sort", "Print the front-to-back object order");
    CLI::App* schedule =
        app.add_subcommand("schedule", "Tabulate per-object densities across steps");
    CLI::App* maps = app.add_subcommand(
        "maps", "Write per-object transmittance and visibility maps as PGM");
    CLI::App* render =
        app.add_subcommand("render", "Composite object colors into a PPM image");
    CLI::App* simulate =
        app.add_subcommand("simulate", "Run the toy multi-step generation loop");
    CLI::App* sweep = app.add_subcommand("sweep", "Re-render across a range of opacities");

    simulate->add_option("--layers", opts.layers, "Rendering layers per step")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--channels", opts.channels, "Latent channels")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--blend", opts.blend, "Update fraction toward the rendered latent");

    sweep->add_option("--object", opts.sweep_object, "Object id whose opacity is swept")
        ->required();
    sweep->add_option("--alphas", opts.alphas, "Opacity values (default 0.1..0.9)")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(opts.out_dir);
        const stratum::SceneFile scene = stratum::parse_scene(opts.scene_path);

        if (validate->parsed()) cmd_validate(scene, opts);
        if (sort->parsed()) cmd_sort(scene, opts);
        if (schedule->parsed()) cmd_schedule(scene, opts);
        if (maps->parsed()) cmd_maps(scene, opts);
        if (render->parsed()) cmd_render(scene, opts);
        if (simulate->parsed()) cmd_simulate(scene, opts);
        if (sweep->parsed()) cmd_sweep(scene, opts);
        return 0;
    } catch (const stratum::ValidationError& err) {
        return report_failure(opts, "validation", "scene violates its contract",
                              err.diagnostics);
    } catch (const stratum::ParseError& err) {
        return report_failure(opts, "parse", err.what(), {});
    } catch (const std::exception& err) {
        return report_failure(opts, "runtime", err.what(), {});
    }
}
