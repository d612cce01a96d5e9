// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stratum/errors.hpp"
#include "stratum/rng.hpp"

namespace stratum {

namespace {

// Unit-normalize in place; an (effectively) zero vector becomes e0 so the
// unit-norm row invariant holds unconditionally.
void normalize_row(std::vector<double>& row) {
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm < 1e-300) {
        std::fill(row.begin(), row.end(), 0.0);
        if (!row.empty()) row[0] = 1.0;
        return;
    }
    for (double& v : row) v /= norm;
}

}  // namespace

PromptEmbedding embed_prompt(const std::vector<std::string>& tokens, std::uint64_t seed,
                             int channels) {
    if (channels < 1) {
        throw RangeError("embed_prompt: channels must be at least 1");
    }
    PromptEmbedding emb;
    emb.channels = channels;
    if (tokens.empty()) {
        // Blank background prompt: a single all-zeros row, normalized.
        std::vector<double> row(channels, 0.0);
        normalize_row(row);
        emb.rows.push_back(std::move(row));
        return emb;
    }
    for (const std::string& token : tokens) {
        std::mt19937_64 rng(mix_seed(seed, fnv1a64(token)));
        std::vector<double> row(channels);
        for (double& v : row) v = gaussian(rng);
        normalize_row(row);
        emb.rows.push_back(std::move(row));
    }
    return emb;
}

std::pair<FeatureGrid, AttentionWeights> cross_attention(const FeatureGrid& latent,
                                                         const PromptEmbedding& prompt) {
    if (latent.channels != prompt.channels) {
        throw DimensionMismatchError("cross_attention: latent has " +
                                     std::to_string(latent.channels) + " channels, prompt has " +
                                     std::to_string(prompt.channels));
    }
    const int cells = latent.cell_count();
    const int tokens = prompt.token_count();
    const int ch = latent.channels;
    const double scale = 1.0 / std::sqrt(static_cast<double>(ch));

    AttentionWeights weights;
    weights.rows = cells;
    weights.cols = tokens;
    weights.values.resize(static_cast<std::size_t>(cells) * tokens);

    FeatureGrid out(latent.width, latent.height, ch, 0.0);

    std::vector<double> logits(tokens);
    for (int cell = 0; cell < cells; ++cell) {
        const double* q = &latent.values[static_cast<std::size_t>(cell) * ch];
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < tokens; ++k) {
            const std::vector<double>& key = prompt.rows[k];
            double dot = 0.0;
            for (int c = 0; c < ch; ++c) dot += q[c] * key[c];
            logits[k] = dot * scale;
            max_logit = std::max(max_logit, logits[k]);
        }
        double denom = 0.0;
        for (int k = 0; k < tokens; ++k) {
            logits[k] = std::exp(logits[k] - max_logit);
            denom += logits[k];
        }
        double* w_row = &weights.values[static_cast<std::size_t>(cell) * tokens];
        double* o = &out.values[static_cast<std::size_t>(cell) * ch];
        for (int k = 0; k < tokens; ++k) {
            const double w = logits[k] / denom;
            w_row[k] = w;
            const std::vector<double>& value = prompt.rows[k];
            for (int c = 0; c < ch; ++c) o[c] += w * value[c];
        }
    }
    return {std::move(out), std::move(weights)};
}

ScalarMap subject_attention_map(const AttentionWeights& weights, int subject_index, int width,
                                int height) {
    if (subject_index < 0 || subject_index >= weights.cols) {
        throw IndexError("subject_attention_map: token index " + std::to_string(subject_index) +
                         " out of range for " + std::to_string(weights.cols) + " token(s)");
    }
    if (weights.rows != width * height) {
        throw DimensionMismatchError("subject_attention_map: " + std::to_string(weights.rows) +
                                     " weight rows cannot reshape to " + std::to_string(width) +
                                     "x" + std::to_string(height));
    }
    ScalarMap map(width, height);
    for (int cell = 0; cell < weights.rows; ++cell) {
        map.values[cell] = weights.at(cell, subject_index);
    }
    return map;
}

int subject_token_index(const SceneObject& object) {
    if (object.subject_index) {
        const int idx = *object.subject_index;
        if (idx < 0 || idx >= static_cast<int>(object.prompt_tokens.size())) {
            throw IndexError("subject_token_index: explicit index " + std::to_string(idx) +
                             " out of range for object \"" + object.id + "\"");
        }
        return idx;
    }
    if (object.prompt_tokens.empty()) {
        throw EmptyPromptError("subject_token_index: object \"" + object.id +
                               "\" has a blank prompt and no explicit subject index");
    }
    return static_cast<int>(object.prompt_tokens.size()) - 1;
}

}  // namespace stratum
