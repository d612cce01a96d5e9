// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stratum/graph.hpp"
#include "stratum/schedule.hpp"
#include "stratum/types.hpp"

namespace stratum {

// End-to-end exercises of the latent renderer. The toy denoiser is a seeded
// linear blend toward the rendered latent, not a trained network: it exists
// to drive the multi-step, multi-layer integration (early high-density
// opaque regime, late mixing) under conditions where every expectation is
// checkable. The pixel compositor runs the same operator with literal RGB
// colors as latents, so occlusion and opacity effects are directly visible.

/// Settings for one toy generation run. `blend` is the per-layer update
/// fraction toward the rendered latent in (0, 1]; the default 1.0 (full
/// replacement) keeps closed-form expectations exact. An empty
/// `layer_enabled` activates every layer; a disabled layer passes its input
/// through untouched.
struct ToyDenoiserConfig {
    int layers = 2;
    int width = 8;
    int height = 8;
    int channels = 8;
    int steps = 25;
    std::uint64_t seed = 0;
    double blend = 1.0;
    ScheduleKind schedule_kind = ScheduleKind::InverseProportional;
    bool attention_shaping = true;
    double epsilon = 1e-8;
    std::vector<bool> layer_enabled;
};

/// Per-layer observations within one step.
struct LayerTrace {
    bool enabled = true;
    std::vector<double> sigmas;        // per object, front-to-back
    std::vector<double> mean_weights;  // per object, blending weight averaged over pixels
    double s_min = 0.0;                // extremes of the normalization field S
    double s_mean = 0.0;
};

/// Observations for one step t. A non-finite value anywhere fails the run.
struct StepTrace {
    int t = 0;
    std::vector<LayerTrace> layers;
    double latent_norm = 0.0;  // Euclidean norm of the latent after the step
};

struct GenerationResult {
    FeatureGrid latent;             // final latent after step t = 1
    std::vector<StepTrace> traces;  // one per step, t = T first
    FrontToBackOrder order;         // resolved front-to-back object ids
};

/// Runs the toy denoising loop: for t = T down to 1, each active layer
/// attends the current latent against every object's prompt, shapes
/// per-object transmittance maps (box mask, attention-refined unless shaping
/// is off or the prompt is blank), schedules densities, renders, and blends
/// the result into the latent. Deterministic given the seed. Throws
/// ValidationError for invalid scenes, ConfigError for bad settings and
/// RangeError if any trace value goes non-finite.
GenerationResult run_generation(const OcclusionGraph& scene, const ToyDenoiserConfig& config);

/// Renders the scene with colors as latents: per-object constant-color
/// grids, box-mask transmittance maps and densities taken directly from each
/// object's opacity. With `attention_shaping` the maps are refined by toy
/// attention over a seeded query grid (qualitative inspection only);
/// without, maps are pure box masks and expected colors are closed-form.
/// Pixels nothing covers come out black. Every object needs a color.
/// Returns a height x width x 3 grid of RGB values in [0, 1].
FeatureGrid composite_pixels(const OcclusionGraph& scene, int width, int height,
                             bool attention_shaping, std::uint64_t seed = 0);

/// One compositor output per swept opacity value.
struct SweepFrame {
    double alpha = 0.0;
    FeatureGrid image;
    /// Mean normalized weight w/S of the swept object over the pixels where
    /// its map overlaps any other object's map (0 where S is below the
    /// coverage threshold). Monotone non-decreasing in alpha.
    double front_weight_share = 0.0;
};

/// Re-composites the scene (attention shaping off) with the named object's
/// opacity set to each value in `alphas` in turn. Throws ConfigError for an
/// unknown id; alpha values outside [0, 1) surface as ValidationError.
std::vector<SweepFrame> opacity_sweep(const OcclusionGraph& scene, const std::string& object_id,
                                      const std::vector<double>& alphas, int width, int height);

}  // namespace stratum
