// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stratum/errors.hpp"

namespace stratum {

namespace {

char quantize(double v) {
    const long byte = std::lround(255.0 * v);
    return static_cast<char>(static_cast<unsigned char>(std::clamp(byte, 0l, 255l)));
}

void write_file(const std::string& bytes, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ParseError("write failed: " + path);
}

}  // namespace

std::string encode_pgm(const ScalarMap& map) {
    std::string bytes = "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) +
                        "\n255\n";
    bytes.reserve(bytes.size() + map.size());
    for (double v : map.values) bytes.push_back(quantize(v));
    return bytes;
}

std::string encode_ppm(const FeatureGrid& image) {
    if (image.channels != 3) {
        throw DimensionMismatchError("PPM output needs a 3-channel grid, got " +
                                     std::to_string(image.channels));
    }
    std::string bytes = "P6\n" + std::to_string(image.width) + " " +
                        std::to_string(image.height) + "\n255\n";
    bytes.reserve(bytes.size() + image.values.size());
    for (double v : image.values) bytes.push_back(quantize(v));
    return bytes;
}

void write_pgm(const ScalarMap& map, const std::string& path) {
    write_file(encode_pgm(map), path);
}

void write_ppm(const FeatureGrid& image, const std::string& path) {
    write_file(encode_ppm(image), path);
}

}  // namespace stratum
