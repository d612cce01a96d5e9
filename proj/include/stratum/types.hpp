// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace stratum {

/// H x W grid of reals, row-major. Masks and transmittance maps keep their
/// values in [0, 1]; general attention maps may hold any finite value.
struct ScalarMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // height * width, row-major

    ScalarMap() = default;
    ScalarMap(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * width + c]; }

    bool same_shape(const ScalarMap& o) const { return width == o.width && height == o.height; }
    std::size_t size() const { return values.size(); }
};

/// H x W x C grid of reals. Channel index varies fastest.
struct FeatureGrid {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> values;  // height * width * channels

    FeatureGrid() = default;
    FeatureGrid(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          values(static_cast<std::size_t>(w) * h * c, fill) {}

    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width + c) * channels + ch;
    }
    double& at(int r, int c, int ch) { return values[index(r, c, ch)]; }
    double at(int r, int c, int ch) const { return values[index(r, c, ch)]; }

    bool same_shape(const FeatureGrid& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    int cell_count() const { return width * height; }
};

}  // namespace stratum
