// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "stratum/types.hpp"

namespace stratum {

// Latent rendering: volume-rendering quadrature adapted to a stack of 2-D
// feature layers under an orthographic camera. Objects are ordered front to
// back (index 0 nearest the camera); each carries a latent grid R_i, a
// transmittance map M_i in [0, 1] and a scalar semantic density sigma_i.
// Per pixel p the layers are blended as
//
//     w_i(p) = T_i(p) * (1 - exp(-sigma_i)) * M_i(p)
//     T_i(p) = exp(-sum_{j<i} M_j(p) * sigma_j)      (T_0 = 1 everywhere)
//     out(p) = sum_i w_i(p) * R_i(p) / S(p),   S(p) = sum_i w_i(p)
//
// the same weights across all channels. Under an orthographic camera the
// sample spacing is undefined and drops out of the formula. The per-pixel
// normalization by S keeps the output inside the envelope of its inputs.

/// Inputs to one latent-render call. Lists are front-to-back and must all
/// have length N >= 1; grids and maps must agree on dimensions; densities
/// must be non-negative (large values are fine: exp(-sigma) underflows
/// gracefully to 0 and is not clamped).
struct RenderInputs {
    std::vector<FeatureGrid> latents;     // R_i
    std::vector<ScalarMap> maps;          // M_i
    std::vector<double> sigmas;           // sigma_i
    FeatureGrid fallback;                 // used where S <= epsilon
    double epsilon = 1e-8;                // coverage threshold for S
};

/// Intermediate fields of a render, exposed for inspection and testing.
struct RenderDiagnostics {
    std::vector<ScalarMap> transmittance;  // T_i; T_0 is all-ones, non-increasing in i
    std::vector<ScalarMap> weights;        // w_i
    ScalarMap normalization;               // S = sum_i w_i
};

/// Semantic density from semantic opacity: D = -ln(1 - alpha), alpha in
/// [0, 1). Alpha = 0 gives D = 0 (the object vanishes); alpha -> 1 diverges,
/// so alpha = 1 itself is out of range. Round-trips with density_to_opacity
/// to within 1e-12.
double opacity_to_density(double alpha);

/// Semantic opacity from semantic density: alpha = 1 - exp(-D), D >= 0.
double density_to_opacity(double density);

/// Accumulated transmittance maps: T_0 all-ones, then
/// T_i(p) = exp(-sum_{j<i} M_j(p) * sigma_j). Element-wise non-increasing
/// in i for non-negative inputs.
std::vector<ScalarMap> accumulated_transmittance(const std::vector<ScalarMap>& masks,
                                                 const std::vector<double>& sigmas);

/// The full operator. Per pixel, weights are normalized by S and applied
/// uniformly across channels; where S <= epsilon (no object meaningfully
/// covers the pixel) the fallback latent passes through so the operator is
/// total. The per-object reduction runs in fixed front-to-back order for
/// reproducibility.
std::pair<FeatureGrid, RenderDiagnostics> latent_render(const RenderInputs& inputs);

/// The same weighted sum without the 1/S normalization and without the
/// fallback. With all-ones masks this reduces per pixel and channel to
/// volume-rendering quadrature with unit sample spacing, which is what the
/// oracle checks.
FeatureGrid latent_render_unnormalized(const RenderInputs& inputs);

}  // namespace stratum
