// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stratum/graph.hpp"
#include "stratum/types.hpp"

namespace stratum {

/// Rasterizes a normalized box to a binary mask. Cell (r, c) is 1 iff its
/// center ((c + 0.5) / width, (r + 0.5) / height) lies inside the half-open
/// box [x0, x1) x [y0, y1). The half-open rule keeps adjacent boxes from
/// double-covering a shared edge.
/// Throws DegenerateBoxError when no cell center falls inside the box: a
/// silently invisible object would corrupt occlusion semantics undiagnosed.
ScalarMap rasterize_bbox(const BBox& bbox, int width, int height);

/// Affine rescale so the minimum maps to 0 and the maximum to 1. A constant
/// map normalizes to all-ones: attention is near-uniform early in a run, and
/// falling back to 1 leaves the box mask in charge of the transmittance map.
ScalarMap normalize_attention_map(const ScalarMap& raw);

/// Element-wise product of a normalized attention map and a box mask: zero
/// outside the box, attention-shaped inside.
ScalarMap transmittance_map(const ScalarMap& norm_attn, const ScalarMap& box_mask);

/// Transmittance map with attention shaping disabled: the box mask itself.
ScalarMap box_only_transmittance_map(const ScalarMap& box_mask);

}  // namespace stratum
