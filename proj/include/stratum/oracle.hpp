// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "stratum/types.hpp"

namespace stratum {

// Reference volume rendering along a single ray. These are the ground truth
// the latent renderer is checked against: quadrature over discrete samples,
// and the closed-form integral for a piecewise-constant medium, on which the
// quadrature is exact rather than approximate.

/// N samples along a ray: densities sigma_i >= 0, spacings delta_i > 0 and
/// one C-vector color per sample.
struct RaySamples {
    std::vector<double> sigmas;
    std::vector<double> deltas;
    std::vector<std::vector<double>> colors;  // N x C
};

/// Quadrature estimate of the accumulated color:
///   C = sum_i T_i * (1 - exp(-sigma_i * delta_i)) * c_i,
///   T_i = exp(-sum_{j<i} sigma_j * delta_j).
std::vector<double> nerf_quadrature(const RaySamples& samples);

/// The continuous accumulated-color integral evaluated in closed form on a
/// medium that is constant within each sample interval. Each segment
/// contributes T_entry * (1 - exp(-sigma * delta)) * c via the antiderivative
/// of T(s) * sigma within the segment; transmittance is carried across
/// segments as a running product. Equal to nerf_quadrature on such media up
/// to floating-point noise.
std::vector<double> piecewise_constant_integral(const RaySamples& samples);

struct EquivalenceReport {
    double max_abs_deviation = 0.0;
    std::size_t cells_checked = 0;

    bool within(double tol) const { return max_abs_deviation <= tol; }
};

/// Bridges the latent renderer and the ray oracle: with every mask all-ones,
/// unnormalized latent rendering at each pixel and channel must equal
/// quadrature with unit spacing and colors read from the per-object latents.
/// Reports the maximum absolute deviation over all pixels and channels.
EquivalenceReport equivalence_check(const std::vector<FeatureGrid>& latents,
                                    const std::vector<ScalarMap>& masks,
                                    const std::vector<double>& sigmas);

}  // namespace stratum
