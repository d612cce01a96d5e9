// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "stratum/attention.hpp"
#include "stratum/errors.hpp"
#include "stratum/geometry.hpp"
#include "stratum/render.hpp"
#include "stratum/rng.hpp"

namespace stratum {

namespace {

void require_valid(const OcclusionGraph& scene) {
    const ValidationReport report = validate_graph(scene);
    if (!report.ok()) {
        throw ValidationError("scene failed validation", to_diagnostics(report));
    }
}

void check_config(const ToyDenoiserConfig& c) {
    if (c.layers < 1) throw ConfigError("toy denoiser: layers must be >= 1");
    if (c.width < 1 || c.height < 1 || c.channels < 1) {
        throw ConfigError("toy denoiser: grid dimensions must be >= 1");
    }
    if (c.steps < 1) throw ConfigError("toy denoiser: steps must be >= 1");
    if (!(c.blend > 0.0 && c.blend <= 1.0)) {
        throw ConfigError("toy denoiser: blend must be in (0, 1]");
    }
    if (!(c.epsilon > 0.0)) throw ConfigError("toy denoiser: epsilon must be > 0");
    if (!c.layer_enabled.empty() && static_cast<int>(c.layer_enabled.size()) != c.layers) {
        throw ConfigError("toy denoiser: layer_enabled must be empty or match layers");
    }
}

/// Transmittance map for one object at one layer: the attention-shaped box
/// mask, or the bare box mask when shaping is off or the prompt is blank
/// (a blank prompt has no subject token to extract).
ScalarMap object_map(const SceneObject& object, const AttentionWeights& weights,
                     const ScalarMap& box_mask, bool shaping) {
    if (!shaping || object.prompt_tokens.empty()) {
        return box_only_transmittance_map(box_mask);
    }
    const int subject = subject_token_index(object);
    const ScalarMap raw = subject_attention_map(weights, subject, box_mask.width, box_mask.height);
    return transmittance_map(normalize_attention_map(raw), box_mask);
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double euclidean_norm(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

void require_finite_step(const StepTrace& step, const FeatureGrid& latent) {
    bool ok = std::isfinite(step.latent_norm);
    for (const LayerTrace& layer : step.layers) {
        ok = ok && std::isfinite(layer.s_min) && std::isfinite(layer.s_mean);
        for (double v : layer.sigmas) ok = ok && std::isfinite(v);
        for (double v : layer.mean_weights) ok = ok && std::isfinite(v);
    }
    for (double v : latent.values) ok = ok && std::isfinite(v);
    if (!ok) {
        throw RangeError("toy denoiser: non-finite value at step " + std::to_string(step.t));
    }
}

/// Everything the compositor derives from a scene: constant-color latents,
/// box-mask transmittance maps (optionally attention-shaped against a seeded
/// query grid) and per-object densities, in front-to-back order.
struct CompositorSetup {
    RenderInputs inputs;
    FrontToBackOrder order;
};

CompositorSetup compositor_setup(const OcclusionGraph& scene, int width, int height,
                                 bool attention_shaping, std::uint64_t seed) {
    require_valid(scene);

    CompositorSetup setup;
    setup.order = topological_order(scene);
    const int n = static_cast<int>(setup.order.size());

    // Query grid for the optional attention shaping; shared across objects
    // so runs are a pure function of (scene, seed).
    constexpr int kQueryChannels = 8;
    FeatureGrid query;
    if (attention_shaping) {
        query = FeatureGrid(width, height, kQueryChannels, 0.0);
        std::mt19937_64 rng(mix_seed(seed, fnv1a64("compositor-query")));
        for (double& v : query.values) v = gaussian(rng);
    }

    setup.inputs.fallback = FeatureGrid(width, height, 3, 0.0);  // black where nothing covers
    setup.inputs.latents.reserve(n);
    setup.inputs.maps.reserve(n);
    setup.inputs.sigmas.reserve(n);
    for (int i = 0; i < n; ++i) {
        const SceneObject& object = scene.objects[scene.find(setup.order[i])];
        if (!object.has_color) {
            throw ConfigError("compositor: object '" + object.id + "' has no color");
        }

        FeatureGrid grid(width, height, 3, 0.0);
        for (int p = 0; p < grid.cell_count(); ++p) {
            for (int ch = 0; ch < 3; ++ch) {
                grid.values[static_cast<std::size_t>(p) * 3 + ch] = object.color[ch];
            }
        }
        setup.inputs.latents.push_back(std::move(grid));

        const ScalarMap box_mask = rasterize_bbox(object.bbox, width, height);
        if (attention_shaping && !object.prompt_tokens.empty()) {
            const PromptEmbedding prompt =
                embed_prompt(object.prompt_tokens, object.embedding_seed, kQueryChannels);
            const AttentionWeights weights = cross_attention(query, prompt).second;
            setup.inputs.maps.push_back(object_map(object, weights, box_mask, true));
        } else {
            setup.inputs.maps.push_back(box_only_transmittance_map(box_mask));
        }

        setup.inputs.sigmas.push_back(opacity_to_density(object.opacity));
    }
    return setup;
}

}  // namespace

GenerationResult run_generation(const OcclusionGraph& scene, const ToyDenoiserConfig& config) {
    check_config(config);
    require_valid(scene);

    GenerationResult result;
    result.order = topological_order(scene);
    const int n = static_cast<int>(result.order.size());

    std::vector<const SceneObject*> ordered(n);
    std::vector<PromptEmbedding> embeddings(n);
    std::vector<ScalarMap> box_masks(n);
    std::vector<DensitySchedule> schedules(n);
    for (int i = 0; i < n; ++i) {
        const SceneObject& object = scene.objects[scene.find(result.order[i])];
        ordered[i] = &object;
        embeddings[i] = embed_prompt(object.prompt_tokens, object.embedding_seed, config.channels);
        box_masks[i] = rasterize_bbox(object.bbox, config.width, config.height);
        schedules[i] = DensitySchedule{config.schedule_kind, opacity_to_density(object.opacity),
                                       config.steps};
    }

    FeatureGrid latent(config.width, config.height, config.channels, 0.0);
    std::mt19937_64 rng(mix_seed(config.seed, fnv1a64("toy-denoiser-init")));
    for (double& v : latent.values) v = gaussian(rng);

    result.traces.reserve(config.steps);
    for (int t = config.steps; t >= 1; --t) {
        StepTrace step;
        step.t = t;
        step.layers.reserve(config.layers);
        for (int l = 0; l < config.layers; ++l) {
            LayerTrace trace;
            trace.enabled = config.layer_enabled.empty() || config.layer_enabled[l];
            if (trace.enabled) {
                RenderInputs inputs;
                inputs.epsilon = config.epsilon;
                inputs.fallback = latent;  // uncovered pixels keep the layer input
                inputs.latents.reserve(n);
                inputs.maps.reserve(n);
                inputs.sigmas.reserve(n);
                for (int i = 0; i < n; ++i) {
                    auto [attended, weights] = cross_attention(latent, embeddings[i]);
                    inputs.maps.push_back(
                        object_map(*ordered[i], weights, box_masks[i], config.attention_shaping));
                    inputs.latents.push_back(std::move(attended));
                    inputs.sigmas.push_back(sigma_at(schedules[i], t));
                }
                auto [rendered, diag] = latent_render(inputs);

                if (config.blend == 1.0) {
                    latent = std::move(rendered);
                } else {
                    for (std::size_t k = 0; k < latent.values.size(); ++k) {
                        latent.values[k] = (1.0 - config.blend) * latent.values[k] +
                                           config.blend * rendered.values[k];
                    }
                }

                trace.sigmas = std::move(inputs.sigmas);
                trace.mean_weights.reserve(n);
                for (int i = 0; i < n; ++i) {
                    trace.mean_weights.push_back(mean_of(diag.weights[i].values));
                }
                double s_min = diag.normalization.values[0];
                for (double s : diag.normalization.values) s_min = std::min(s_min, s);
                trace.s_min = s_min;
                trace.s_mean = mean_of(diag.normalization.values);
            }
            step.layers.push_back(std::move(trace));
        }
        step.latent_norm = euclidean_norm(latent.values);
        require_finite_step(step, latent);
        result.traces.push_back(std::move(step));
    }

    result.latent = std::move(latent);
    return result;
}

FeatureGrid composite_pixels(const OcclusionGraph& scene, int width, int height,
                             bool attention_shaping, std::uint64_t seed) {
    CompositorSetup setup = compositor_setup(scene, width, height, attention_shaping, seed);
    return latent_render(setup.inputs).first;
}

std::vector<SweepFrame> opacity_sweep(const OcclusionGraph& scene, const std::string& object_id,
                                      const std::vector<double>& alphas, int width, int height) {
    if (scene.find(object_id) < 0) {
        throw ConfigError("opacity sweep: unknown object id '" + object_id + "'");
    }

    std::vector<SweepFrame> frames;
    frames.reserve(alphas.size());
    for (double alpha : alphas) {
        OcclusionGraph variant = scene;
        variant.objects[variant.find(object_id)].opacity = alpha;

        CompositorSetup setup = compositor_setup(variant, width, height, false, 0);
        auto [image, diag] = latent_render(setup.inputs);

        int swept = 0;
        for (std::size_t i = 0; i < setup.order.size(); ++i) {
            if (setup.order[i] == object_id) swept = static_cast<int>(i);
        }

        // Mean normalized weight of the swept object where its map overlaps
        // any other object's: the region where opacity actually competes.
        double share_sum = 0.0;
        std::size_t overlap_cells = 0;
        const std::size_t cells = setup.inputs.maps[0].size();
        for (std::size_t p = 0; p < cells; ++p) {
            if (setup.inputs.maps[swept].values[p] <= 0.0) continue;
            double others = 0.0;
            for (std::size_t i = 0; i < setup.inputs.maps.size(); ++i) {
                if (static_cast<int>(i) != swept) others += setup.inputs.maps[i].values[p];
            }
            if (others <= 0.0) continue;
            ++overlap_cells;
            const double s = diag.normalization.values[p];
            if (s > setup.inputs.epsilon) {
                share_sum += diag.weights[swept].values[p] / s;
            }
        }

        SweepFrame frame;
        frame.alpha = alpha;
        frame.image = std::move(image);
        frame.front_weight_share =
            overlap_cells ? share_sum / static_cast<double>(overlap_cells) : 0.0;
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace stratum
