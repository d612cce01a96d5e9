// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy cross-attention: embeddings, weights, subject-token maps.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "stratum/attention.hpp"
#include "stratum/errors.hpp"

using namespace stratum;

namespace {

FeatureGrid random_latent(std::mt19937& rng, int width, int height, int channels) {
    std::normal_distribution<double> noise(0.0, 1.0);
    FeatureGrid grid(width, height, channels);
    for (double& v : grid.values) v = noise(rng);
    return grid;
}

double row_norm(const std::vector<double>& row) {
    double sum = 0.0;
    for (double v : row) sum += v * v;
    return std::sqrt(sum);
}

}  // namespace

TEST_CASE("embedding is a pure function of tokens, seed and width") {
    const PromptEmbedding a = embed_prompt({"cat"}, 7, 8);
    const PromptEmbedding b = embed_prompt({"cat"}, 7, 8);
    REQUIRE(a.rows.size() == 1);
    CHECK(a.rows == b.rows);  // bit-identical
}

TEST_CASE("different seeds give different embeddings") {
    const PromptEmbedding a = embed_prompt({"cat"}, 7, 8);
    const PromptEmbedding b = embed_prompt({"cat"}, 8, 8);
    CHECK(a.rows != b.rows);
}

TEST_CASE("different tokens give different embeddings under one seed") {
    const PromptEmbedding e = embed_prompt({"cat", "dog"}, 3, 16);
    CHECK(e.rows[0] != e.rows[1]);
}

TEST_CASE("embedding rows are unit length") {
    std::mt19937 rng(111);
    for (int round = 0; round < 30; ++round) {
        const int channels = 1 + static_cast<int>(rng() % 24);
        const PromptEmbedding e =
            embed_prompt({"alpha", "beta", "gamma"}, rng(), channels);
        for (const auto& row : e.rows) {
            CHECK(row_norm(row) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("blank prompt yields one deterministic fallback row") {
    const PromptEmbedding a = embed_prompt({}, 7, 8);
    const PromptEmbedding b = embed_prompt({}, 99, 8);
    REQUIRE(a.token_count() == 1);
    CHECK(row_norm(a.rows[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.rows == b.rows);  // the fallback row ignores the seed
}

TEST_CASE("channel width below one is rejected") {
    CHECK_THROWS_AS(embed_prompt({"cat"}, 7, 0), RangeError);
}

TEST_CASE("single-token prompts attend with weight one everywhere") {
    std::mt19937 rng(2023);
    const FeatureGrid latent = random_latent(rng, 3, 2, 8);
    const PromptEmbedding prompt = embed_prompt({"cat"}, 7, 8);
    const auto [out, weights] = cross_attention(latent, prompt);

    REQUIRE(weights.rows == 6);
    REQUIRE(weights.cols == 1);
    for (double w : weights.values) CHECK(w == 1.0);
    // Every cell's output is exactly the lone value row.
    for (int p = 0; p < out.cell_count(); ++p) {
        for (int ch = 0; ch < 8; ++ch) {
            CHECK(out.values[static_cast<std::size_t>(p) * 8 + ch] == prompt.rows[0][ch]);
        }
    }
}

TEST_CASE("two identical tokens split attention evenly") {
    std::mt19937 rng(2024);
    const FeatureGrid latent = random_latent(rng, 2, 2, 8);
    PromptEmbedding prompt = embed_prompt({"cat"}, 7, 8);
    prompt.rows.push_back(prompt.rows[0]);  // duplicate row, equal logits
    const auto weights = cross_attention(latent, prompt).second;
    for (double w : weights.values) CHECK(w == 0.5);
}

TEST_CASE("weight rows sum to one and stay within [0, 1]") {
    std::mt19937 rng(90125);
    for (int round = 0; round < 50; ++round) {
        const int channels = 1 + static_cast<int>(rng() % 16);
        const int tokens = 1 + static_cast<int>(rng() % 5);
        std::vector<std::string> prompt_tokens;
        for (int k = 0; k < tokens; ++k) prompt_tokens.push_back("tok" + std::to_string(k));
        const FeatureGrid latent = random_latent(rng, 1 + static_cast<int>(rng() % 5),
                                                 1 + static_cast<int>(rng() % 5), channels);
        const PromptEmbedding prompt = embed_prompt(prompt_tokens, rng(), channels);
        const auto weights = cross_attention(latent, prompt).second;
        for (int r = 0; r < weights.rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < weights.cols; ++c) {
                CHECK(weights.at(r, c) >= 0.0);
                CHECK(weights.at(r, c) <= 1.0);
                sum += weights.at(r, c);
            }
            CHECK(std::abs(sum - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("attended output stays in the convex hull of the value rows") {
    std::mt19937 rng(555);
    for (int round = 0; round < 50; ++round) {
        const int channels = 2 + static_cast<int>(rng() % 8);
        const FeatureGrid latent = random_latent(rng, 4, 3, channels);
        const PromptEmbedding prompt = embed_prompt({"a", "b", "c"}, rng(), channels);
        const auto out = cross_attention(latent, prompt).first;
        for (int ch = 0; ch < channels; ++ch) {
            double lo = prompt.rows[0][ch], hi = prompt.rows[0][ch];
            for (const auto& row : prompt.rows) {
                lo = std::min(lo, row[ch]);
                hi = std::max(hi, row[ch]);
            }
            for (int p = 0; p < out.cell_count(); ++p) {
                const double v = out.values[static_cast<std::size_t>(p) * channels + ch];
                CHECK(v >= lo - 1e-12);
                CHECK(v <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("channel mismatch between latent and prompt is rejected") {
    std::mt19937 rng(1);
    const FeatureGrid latent = random_latent(rng, 2, 2, 8);
    const PromptEmbedding prompt = embed_prompt({"cat"}, 7, 16);
    CHECK_THROWS_AS(cross_attention(latent, prompt), DimensionMismatchError);
}

TEST_CASE("attention pipeline is deterministic end to end") {
    std::mt19937 rng_a(42), rng_b(42);
    const FeatureGrid latent_a = random_latent(rng_a, 5, 4, 12);
    const FeatureGrid latent_b = random_latent(rng_b, 5, 4, 12);
    const PromptEmbedding prompt_a = embed_prompt({"one", "two"}, 9, 12);
    const PromptEmbedding prompt_b = embed_prompt({"one", "two"}, 9, 12);
    const auto [out_a, w_a] = cross_attention(latent_a, prompt_a);
    const auto [out_b, w_b] = cross_attention(latent_b, prompt_b);
    CHECK(out_a.values == out_b.values);
    CHECK(w_a.values == w_b.values);
}

TEST_CASE("subject map is one column of the weights, reshaped") {
    AttentionWeights weights;
    weights.rows = 2;
    weights.cols = 2;
    weights.values = {0.3, 0.7, 0.9, 0.1};  // 2x1 grid, two tokens
    const ScalarMap map = subject_attention_map(weights, 0, 1, 2);
    REQUIRE(map.width == 1);
    REQUIRE(map.height == 2);
    CHECK(map.values == std::vector<double>{0.3, 0.9});
}

TEST_CASE("subject map of a single-token prompt is all-ones") {
    std::mt19937 rng(8);
    const FeatureGrid latent = random_latent(rng, 3, 3, 4);
    const PromptEmbedding prompt = embed_prompt({"thing"}, 5, 4);
    const auto weights = cross_attention(latent, prompt).second;
    const ScalarMap map = subject_attention_map(weights, 0, 3, 3);
    for (double v : map.values) CHECK(v == 1.0);
}

TEST_CASE("subject index outside the token count is rejected") {
    AttentionWeights weights;
    weights.rows = 1;
    weights.cols = 2;
    weights.values = {0.5, 0.5};
    CHECK_THROWS_AS(subject_attention_map(weights, 2, 1, 1), IndexError);
    CHECK_THROWS_AS(subject_attention_map(weights, -1, 1, 1), IndexError);
}

TEST_CASE("reshape dimensions must match the weight rows") {
    AttentionWeights weights;
    weights.rows = 4;
    weights.cols = 1;
    weights.values = {1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(subject_attention_map(weights, 0, 3, 2), DimensionMismatchError);
}

TEST_CASE("subject token defaults to the last, explicit index wins") {
    SceneObject heuristic;
    heuristic.prompt_tokens = {"a", "red", "apple"};
    CHECK(subject_token_index(heuristic) == 2);

    SceneObject overridden;
    overridden.prompt_tokens = {"apple", "on", "table"};
    overridden.subject_index = 0;
    CHECK(subject_token_index(overridden) == 0);
}

TEST_CASE("blank prompt without an index has no subject token") {
    SceneObject blank;
    CHECK_THROWS_AS(subject_token_index(blank), EmptyPromptError);
}

TEST_CASE("explicit subject index out of range is rejected") {
    SceneObject object;
    object.prompt_tokens = {"only"};
    object.subject_index = 1;
    CHECK_THROWS_AS(subject_token_index(object), IndexError);
}
