// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stratum/graph.hpp"
#include "stratum/types.hpp"

namespace stratum {

/// K x C token embeddings, one unit-norm row per token. Rows are a
/// deterministic function of (token string, seed, channels): identical
/// tokens embed identically, different seeds give different rows. An empty
/// token list (the blank background prompt) yields a single fallback row.
struct PromptEmbedding {
    int channels = 0;
    std::vector<std::vector<double>> rows;  // K x channels, unit Euclidean norm

    int token_count() const { return static_cast<int>(rows.size()); }
};

/// (H*W) x K attention weights. Each row is a softmax output: non-negative,
/// summing to 1.
struct AttentionWeights {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

PromptEmbedding embed_prompt(const std::vector<std::string>& tokens, std::uint64_t seed,
                             int channels);

/// Single-head cross-attention with keys = values = prompt rows: queries are
/// the flattened latent cells, weights are row-softmax(Q K^T / sqrt(C)), the
/// output grid is weights * V. The weights are returned so callers can shape
/// transmittance maps from the subject token's column.
std::pair<FeatureGrid, AttentionWeights> cross_attention(const FeatureGrid& latent,
                                                         const PromptEmbedding& prompt);

/// Column `subject_index` of the weights reshaped to height x width.
ScalarMap subject_attention_map(const AttentionWeights& weights, int subject_index, int width,
                                int height);

/// The object's explicit subject_index when present, otherwise the last
/// token (a serviceable noun-phrase-head heuristic). Throws EmptyPromptError
/// for blank prompts with no explicit index; blank-background objects skip
/// attention shaping entirely instead of calling this.
int subject_token_index(const SceneObject& object);

}  // namespace stratum
