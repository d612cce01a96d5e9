// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/oracle.hpp"

#include <cmath>
#include <string>

#include "stratum/errors.hpp"
#include "stratum/render.hpp"

namespace stratum {

namespace {

std::size_t check_samples(const RaySamples& s) {
    if (s.sigmas.empty()) {
        throw DimensionMismatchError("ray samples: need at least one sample");
    }
    if (s.sigmas.size() != s.deltas.size() || s.sigmas.size() != s.colors.size()) {
        throw DimensionMismatchError("ray samples: sigma/delta/color lengths differ");
    }
    const std::size_t channels = s.colors[0].size();
    for (std::size_t i = 0; i < s.sigmas.size(); ++i) {
        if (!(std::isfinite(s.sigmas[i]) && s.sigmas[i] >= 0.0)) {
            throw RangeError("ray samples: sigma " + std::to_string(i) + " must be >= 0");
        }
        if (!(std::isfinite(s.deltas[i]) && s.deltas[i] > 0.0)) {
            throw RangeError("ray samples: delta " + std::to_string(i) + " must be > 0");
        }
        if (s.colors[i].size() != channels) {
            throw DimensionMismatchError("ray samples: color " + std::to_string(i) +
                                         " has inconsistent channel count");
        }
    }
    return channels;
}

}  // namespace

std::vector<double> nerf_quadrature(const RaySamples& s) {
    const std::size_t channels = check_samples(s);
    std::vector<double> color(channels, 0.0);
    double optical_depth = 0.0;  // sum_{j<i} sigma_j * delta_j
    for (std::size_t i = 0; i < s.sigmas.size(); ++i) {
        const double t = std::exp(-optical_depth);
        const double a = -std::expm1(-s.sigmas[i] * s.deltas[i]);  // 1 - exp(-sigma*delta)
        const double w = t * a;
        for (std::size_t c = 0; c < channels; ++c) color[c] += w * s.colors[i][c];
        optical_depth += s.sigmas[i] * s.deltas[i];
    }
    return color;
}

std::vector<double> piecewise_constant_integral(const RaySamples& s) {
    const std::size_t channels = check_samples(s);
    std::vector<double> color(channels, 0.0);
    // Deliberately a different numerical route from the quadrature:
    // transmittance as a running product, per-segment absorption from the
    // antiderivative of exp(-sigma*s)*sigma over the segment.
    double transmittance = 1.0;
    for (std::size_t i = 0; i < s.sigmas.size(); ++i) {
        const double attenuation = std::exp(-s.sigmas[i] * s.deltas[i]);
        const double absorbed = 1.0 - attenuation;
        for (std::size_t c = 0; c < channels; ++c) {
            color[c] += transmittance * absorbed * s.colors[i][c];
        }
        transmittance *= attenuation;
    }
    return color;
}

EquivalenceReport equivalence_check(const std::vector<FeatureGrid>& latents,
                                    const std::vector<ScalarMap>& masks,
                                    const std::vector<double>& sigmas) {
    RenderInputs inputs;
    inputs.latents = latents;
    inputs.maps = masks;
    inputs.sigmas = sigmas;
    inputs.fallback = FeatureGrid(latents[0].width, latents[0].height, latents[0].channels, 0.0);
    const FeatureGrid rendered = latent_render_unnormalized(inputs);

    const std::size_t n = latents.size();
    const int channels = latents[0].channels;
    const std::size_t cells = masks[0].size();

    EquivalenceReport report;
    RaySamples ray;
    ray.sigmas = sigmas;
    ray.deltas.assign(n, 1.0);
    ray.colors.assign(n, std::vector<double>(channels, 0.0));
    for (std::size_t p = 0; p < cells; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            for (int c = 0; c < channels; ++c) {
                ray.colors[i][c] = latents[i].values[p * channels + c];
            }
        }
        const std::vector<double> expected = nerf_quadrature(ray);
        for (int c = 0; c < channels; ++c) {
            const double dev = std::abs(rendered.values[p * channels + c] - expected[c]);
            if (dev > report.max_abs_deviation) report.max_abs_deviation = dev;
            ++report.cells_checked;
        }
    }
    return report;
}

}  // namespace stratum
