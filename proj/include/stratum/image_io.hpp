// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "stratum/types.hpp"

namespace stratum {

// Binary PGM (P5) and PPM (P6) encoders, maxval 255. Values are quantized
// as round(255 * v) clamped to [0, 255], so output bytes are bit-exact and
// diffable across runs. The formats are header-plus-raw-bytes simple, which
// keeps image emission dependency-free.

/// Grayscale image bytes (P5) for a scalar map.
std::string encode_pgm(const ScalarMap& map);

/// Color image bytes (P6) for a 3-channel grid (RGB in [0, 1]).
/// Throws DimensionMismatchError if the grid does not have 3 channels.
std::string encode_ppm(const FeatureGrid& image);

void write_pgm(const ScalarMap& map, const std::string& path);
void write_ppm(const FeatureGrid& image, const std::string& path);

}  // namespace stratum
