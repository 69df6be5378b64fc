#include "weasl/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weasl/error.hpp"

namespace weasl::noise {

NoiseRates true_noise_rates(const data::Dataset& ds) {
    if (!ds.has_all_y() || !ds.has_all_g()) {
        throw ConfigError("noise rates need y and g on every instance");
    }
    std::size_t pos = 0, neg = 0, pos_flipped = 0, neg_flipped = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.y[i] == 1) {
            pos += 1;
            if (ds.g[i] == 0) pos_flipped += 1;
        } else {
            neg += 1;
            if (ds.g[i] == 1) neg_flipped += 1;
        }
    }
    if (pos == 0 || neg == 0) throw ConfigError("noise rates undefined: a class is empty");
    return {static_cast<double>(pos_flipped) / static_cast<double>(pos),
            static_cast<double>(neg_flipped) / static_cast<double>(neg)};
}

CcnCheck check_ccn_assumptions(const NoiseRates& rates) {
    if (rates.alpha < 0.0 || rates.alpha > 1.0 || rates.beta < 0.0 || rates.beta > 1.0) {
        throw ConfigError("noise rates must lie in [0,1]");
    }
    CcnCheck check;
    check.margin = 1.0 - rates.alpha - rates.beta;
    check.holds = check.margin > 0.0;
    return check;
}

double estimate_beta(const data::Dataset& strong, const data::Dataset& weak,
                     const model::ScorerSpec& spec, const train::TrainConfig& cfg,
                     double quantile) {
    if (!(quantile > 0.0 && quantile < 1.0)) throw ConfigError("quantile must lie in (0,1)");
    if (!weak.has_all_g()) throw ConfigError("weak set needs g on every instance");
    const std::size_t n = weak.size();
    const std::size_t take = static_cast<std::size_t>(
        std::ceil(quantile * static_cast<double>(n)));
    if (take == 0 || take > n) {
        throw ConfigError("beta estimation selection is empty; weak set too small");
    }

    const train::TrainedModel scorer = train::train_only_strong(strong, spec, cfg);
    std::vector<double> scores(n);
    model::forward_batch(scorer.spec, scorer.params, weak, model::Mode::eval, 0, scores);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });

    std::size_t flagged = 0;
    for (std::size_t i = 0; i < take; ++i) {
        if (weak.g[order[i]] == 1) flagged += 1;
    }
    return static_cast<double>(flagged) / static_cast<double>(take);
}

train::TrainConfig default_estimation_config(std::uint64_t seed) {
    train::TrainConfig cfg;
    cfg.method = train::Method::only_strong;
    cfg.learning_rate = 0.5;
    cfg.momentum = 0.9;
    cfg.epochs = 200;
    // a backwards or degenerate initial ranking poisons the quantile, and the
    // soft-accuracy objective has a sticky all-positive plateau; ten cheap
    // restarts make landing every one of them there vanishingly unlikely
    cfg.restarts = 10;
    cfg.seed = seed;
    return cfg;
}

}  // namespace weasl::noise
