// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/render.hpp"

#include <cmath>
#include <string>

#include "stratum/errors.hpp"

namespace stratum {

double opacity_to_density(double alpha) {
    if (!(std::isfinite(alpha) && 0.0 <= alpha && alpha < 1.0)) {
        throw RangeError("opacity_to_density: alpha " + std::to_string(alpha) +
                         " outside [0, 1)");
    }
    return -std::log1p(-alpha);
}

double density_to_opacity(double density) {
    if (!(std::isfinite(density) && density >= 0.0)) {
        throw RangeError("density_to_opacity: density " + std::to_string(density) +
                         " must be finite and non-negative");
    }
    return -std::expm1(-density);
}

namespace {

void check_layers(const std::vector<ScalarMap>& masks, const std::vector<double>& sigmas) {
    if (masks.empty()) {
        throw DimensionMismatchError("accumulated_transmittance: need at least one layer");
    }
    if (masks.size() != sigmas.size()) {
        throw DimensionMismatchError("accumulated_transmittance: " +
                                     std::to_string(masks.size()) + " masks vs " +
                                     std::to_string(sigmas.size()) + " densities");
    }
    for (std::size_t i = 0; i < masks.size(); ++i) {
        if (!masks[i].same_shape(masks[0])) {
            throw DimensionMismatchError("accumulated_transmittance: mask " + std::to_string(i) +
                                         " differs in shape");
        }
        if (!(std::isfinite(sigmas[i]) && sigmas[i] >= 0.0)) {
            throw RangeError("accumulated_transmittance: density " + std::to_string(i) +
                             " must be finite and non-negative");
        }
    }
}

void check_inputs(const RenderInputs& in) {
    check_layers(in.maps, in.sigmas);
    if (in.latents.size() != in.maps.size()) {
        throw DimensionMismatchError("latent_render: " + std::to_string(in.latents.size()) +
                                     " latents vs " + std::to_string(in.maps.size()) + " maps");
    }
    for (std::size_t i = 0; i < in.latents.size(); ++i) {
        const FeatureGrid& g = in.latents[i];
        if (!g.same_shape(in.latents[0])) {
            throw DimensionMismatchError("latent_render: latent " + std::to_string(i) +
                                         " differs in shape");
        }
        if (g.width != in.maps[0].width || g.height != in.maps[0].height) {
            throw DimensionMismatchError("latent_render: latent and map resolutions differ");
        }
    }
    if (!in.fallback.same_shape(in.latents[0])) {
        throw DimensionMismatchError("latent_render: fallback latent differs in shape");
    }
}

}  // namespace

std::vector<ScalarMap> accumulated_transmittance(const std::vector<ScalarMap>& masks,
                                                 const std::vector<double>& sigmas) {
    check_layers(masks, sigmas);
    const int width = masks[0].width;
    const int height = masks[0].height;
    const std::size_t cells = masks[0].size();

    std::vector<ScalarMap> result;
    result.reserve(masks.size());
    result.emplace_back(width, height, 1.0);  // empty sum: exp(0)

    // exp of the running sum, rather than a running product of exps,
    // so T_i is computed exactly as written.
    std::vector<double> optical_depth(cells, 0.0);
    for (std::size_t i = 1; i < masks.size(); ++i) {
        const ScalarMap& prev_mask = masks[i - 1];
        const double prev_sigma = sigmas[i - 1];
        ScalarMap t(width, height);
        for (std::size_t p = 0; p < cells; ++p) {
            optical_depth[p] += prev_mask.values[p] * prev_sigma;
            t.values[p] = std::exp(-optical_depth[p]);
        }
        result.push_back(std::move(t));
    }
    return result;
}

std::pair<FeatureGrid, RenderDiagnostics> latent_render(const RenderInputs& in) {
    check_inputs(in);
    const std::size_t n = in.latents.size();
    const int width = in.maps[0].width;
    const int height = in.maps[0].height;
    const int channels = in.latents[0].channels;
    const std::size_t cells = in.maps[0].size();

    RenderDiagnostics diag;
    diag.transmittance = accumulated_transmittance(in.maps, in.sigmas);
    diag.weights.reserve(n);

    // alpha_i = 1 - exp(-sigma_i), shared by every pixel of layer i
    std::vector<double> alphas(n);
    for (std::size_t i = 0; i < n; ++i) alphas[i] = -std::expm1(-in.sigmas[i]);

    diag.normalization = ScalarMap(width, height, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ScalarMap w(width, height);
        for (std::size_t p = 0; p < cells; ++p) {
            w.values[p] = diag.transmittance[i].values[p] * alphas[i] * in.maps[i].values[p];
            diag.normalization.values[p] += w.values[p];
        }
        diag.weights.push_back(std::move(w));
    }

    FeatureGrid out(width, height, channels, 0.0);
    for (std::size_t p = 0; p < cells; ++p) {
        const double s = diag.normalization.values[p];
        double* o = &out.values[p * channels];
        if (s <= in.epsilon) {
            // Nothing covers this pixel: pass the caller's latent through.
            const double* f = &in.fallback.values[p * channels];
            for (int c = 0; c < channels; ++c) o[c] = f[c];
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double w_norm = diag.weights[i].values[p] / s;
            const double* r = &in.latents[i].values[p * channels];
            for (int c = 0; c < channels; ++c) o[c] += w_norm * r[c];
        }
    }
    return {std::move(out), std::move(diag)};
}

FeatureGrid latent_render_unnormalized(const RenderInputs& in) {
    check_inputs(in);
    const std::size_t n = in.latents.size();
    const int width = in.maps[0].width;
    const int height = in.maps[0].height;
    const int channels = in.latents[0].channels;
    const std::size_t cells = in.maps[0].size();

    const std::vector<ScalarMap> transmittance = accumulated_transmittance(in.maps, in.sigmas);
    std::vector<double> alphas(n);
    for (std::size_t i = 0; i < n; ++i) alphas[i] = -std::expm1(-in.sigmas[i]);

    FeatureGrid out(width, height, channels, 0.0);
    for (std::size_t p = 0; p < cells; ++p) {
        double* o = &out.values[p * channels];
        for (std::size_t i = 0; i < n; ++i) {
            const double w = transmittance[i].values[p] * alphas[i] * in.maps[i].values[p];
            const double* r = &in.latents[i].values[p * channels];
            for (int c = 0; c < channels; ++c) o[c] += w * r[c];
        }
    }
    return out;
}

}  // namespace stratum
