// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/geometry.hpp"

#include <algorithm>
#include <sstream>

#include "stratum/errors.hpp"

namespace stratum {

ScalarMap rasterize_bbox(const BBox& bbox, int width, int height) {
    if (width < 1 || height < 1) {
        throw RangeError("rasterize_bbox: resolution must be at least 1x1");
    }
    ScalarMap mask(width, height, 0.0);
    bool any = false;
    for (int r = 0; r < height; ++r) {
        const double cy = (r + 0.5) / height;
        if (cy < bbox.y0 || cy >= bbox.y1) continue;
        for (int c = 0; c < width; ++c) {
            const double cx = (c + 0.5) / width;
            if (cx >= bbox.x0 && cx < bbox.x1) {
                mask.at(r, c) = 1.0;
                any = true;
            }
        }
    }
    if (!any) {
        std::ostringstream msg;
        msg << "box (" << bbox.x0 << ", " << bbox.y0 << ", " << bbox.x1 << ", " << bbox.y1
            << ") covers no cell center at " << width << "x" << height;
        throw DegenerateBoxError(msg.str());
    }
    return mask;
}

ScalarMap normalize_attention_map(const ScalarMap& raw) {
    ScalarMap out(raw.width, raw.height, 1.0);
    if (raw.values.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(raw.values.begin(), raw.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) return out;  // degenerate map: fall back to all-ones
    const double span = hi - lo;
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        out.values[i] = (raw.values[i] - lo) / span;
    }
    return out;
}

ScalarMap transmittance_map(const ScalarMap& norm_attn, const ScalarMap& box_mask) {
    if (!norm_attn.same_shape(box_mask)) {
        throw DimensionMismatchError("transmittance_map: attention map and box mask differ in shape");
    }
    ScalarMap out(norm_attn.width, norm_attn.height);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = norm_attn.values[i] * box_mask.values[i];
    }
    return out;
}

ScalarMap box_only_transmittance_map(const ScalarMap& box_mask) {
    return box_mask;
}

}  // namespace stratum
