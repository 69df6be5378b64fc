#pragma once

#include "weasl/dataset.hpp"
#include "weasl/model.hpp"
#include "weasl/train.hpp"

namespace weasl::noise {

// alpha = Pr(g=0 | y=1), beta = Pr(g=1 | y=0).
struct NoiseRates {
    double alpha = 0.0;
    double beta = 0.0;
};

// Exact rates by count; needs y and g on every instance and both classes
// present.
NoiseRates true_noise_rates(const data::Dataset& ds);

struct CcnCheck {
    bool holds = false;    // alpha + beta < 1
    double margin = 0.0;   // 1 - alpha - beta
};

CcnCheck check_ccn_assumptions(const NoiseRates& rates);

// Trains a strong-only scorer, scores the weak set, and returns the fraction
// of g=1 labels among the ceil(quantile * N) lowest-scoring weak instances
// (the most confidently negative ones).
double estimate_beta(const data::Dataset& strong, const data::Dataset& weak,
                     const model::ScorerSpec& spec, const train::TrainConfig& cfg,
                     double quantile = 0.05);

// Reduced-budget strong-only training used inside estimate_beta.
train::TrainConfig default_estimation_config(std::uint64_t seed);

}  // namespace weasl::noise
