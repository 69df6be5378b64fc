#include "weasl/eval.hpp"

#include <cmath>
#include <limits>

#include "weasl/error.hpp"

namespace weasl::eval {

MetricsReport MetricsReport::from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                         std::size_t fn) {
    const std::size_t total = tp + fp + tn + fn;
    if (total == 0) throw ConfigError("metrics over zero instances");
    MetricsReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f_measure = r.precision + r.recall > 0.0
                      ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                      : 0.0;
    r.g_measure = std::sqrt(r.precision * r.recall);
    const std::size_t pos = tp + fn;
    const std::size_t neg = tn + fp;
    r.skew = pos > 0 ? static_cast<double>(neg) / static_cast<double>(pos)
                     : std::numeric_limits<double>::infinity();
    return r;
}

std::vector<int> predict(const model::ScorerSpec& spec, const model::ScorerParams& params,
                         double threshold, const data::Dataset& test) {
    std::vector<double> scores(test.size());
    model::forward_batch(spec, params, test, model::Mode::eval, 0, scores);
    std::vector<int> pred(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) pred[i] = scores[i] > threshold ? 1 : 0;
    return pred;
}

MetricsReport metrics_from_predictions(std::span<const int> predictions,
                                       const data::Dataset& test) {
    if (!test.has_all_y()) throw ConfigError("evaluation needs true labels on every instance");
    if (predictions.size() != test.size()) throw ConfigError("prediction count mismatch");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (predictions[i] == 1) {
            (test.y[i] == 1 ? tp : fp) += 1;
        } else {
            (test.y[i] == 0 ? tn : fn) += 1;
        }
    }
    return MetricsReport::from_counts(tp, fp, tn, fn);
}

MetricsReport evaluate(const model::ScorerSpec& spec, const model::ScorerParams& params,
                       double threshold, const data::Dataset& test) {
    if (test.empty()) throw ConfigError("evaluation over an empty test set");
    return metrics_from_predictions(predict(spec, params, threshold, test), test);
}

std::vector<std::size_t> venn_regions(std::span<const std::vector<bool>> errors) {
    if (errors.size() < 2) throw ConfigError("venn accounting needs at least two models");
    if (errors.size() > 16) throw ConfigError("too many models for venn accounting");
    const std::size_t n = errors.front().size();
    for (const auto& e : errors) {
        if (e.size() != n) throw ConfigError("error vectors must cover the same test set");
    }
    std::vector<std::size_t> regions(std::size_t{1} << errors.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t mask = 0;
        for (std::size_t m = 0; m < errors.size(); ++m) {
            if (errors[m][i]) mask |= std::size_t{1} << m;
        }
        regions[mask] += 1;
    }
    return regions;
}

}  // namespace weasl::eval
