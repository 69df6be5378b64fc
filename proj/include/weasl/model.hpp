#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "weasl/dataset.hpp"

namespace weasl::model {

enum class Kind { logistic, mlp };
enum class Mode { train, eval };

struct ScorerSpec {
    Kind kind = Kind::logistic;
    std::vector<std::size_t> hidden_sizes;  // mlp only
    double dropout_rate = 0.0;
    std::size_t input_dim = 0;

    void validate() const;
    std::size_t param_count() const;
    std::string describe() const;
};

ScorerSpec parse_scorer(const std::string& text, std::size_t input_dim, double dropout_rate);

struct ScorerParams {
    std::vector<double> w;
};

// Weights ~ N(0, 1/fan_in) per layer (std 1/sqrt(fan_in)), biases zero.
ScorerParams init_params(const ScorerSpec& spec, std::uint64_t seed);

// Score in (0,1) for one instance, no dropout.
double forward_one(const ScorerSpec& spec, const ScorerParams& params, std::span<const double> x);

// Scores for a whole dataset. In train mode with dropout_rate > 0, hidden
// units drop with inverted-dropout scaling under masks derived from mask_key
// (counter-based: per instance and layer, independent of evaluation order).
// mask_key is ignored in eval mode.
void forward_batch(const ScorerSpec& spec, const ScorerParams& params, const data::Dataset& ds,
                   Mode mode, std::uint64_t mask_key, std::span<double> out_scores);

// out_grad = sum_i upstream[i] * d f(x_i)/dw, accumulated deterministically
// (fixed blocks combined in index order). Recomputes activations with the
// same masks as forward_batch for the same (mode, mask_key).
void backward_batch(const ScorerSpec& spec, const ScorerParams& params, const data::Dataset& ds,
                    Mode mode, std::uint64_t mask_key, std::span<const double> upstream,
                    std::span<double> out_grad);

}  // namespace weasl::model
