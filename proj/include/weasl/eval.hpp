#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weasl/dataset.hpp"
#include "weasl/model.hpp"

namespace weasl::eval {

struct MetricsReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;  // 0 when tp+fp = 0
    double recall = 0.0;     // 0 when tp+fn = 0
    double f_measure = 0.0;  // F1; 0 when precision+recall = 0
    double g_measure = 0.0;  // sqrt(precision*recall)
    double skew = 0.0;       // #neg/#pos; +inf when no positives

    static MetricsReport from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                     std::size_t fn);
};

// Hard predictions: score > threshold.
std::vector<int> predict(const model::ScorerSpec& spec, const model::ScorerParams& params,
                         double threshold, const data::Dataset& test);

MetricsReport evaluate(const model::ScorerSpec& spec, const model::ScorerParams& params,
                       double threshold, const data::Dataset& test);

MetricsReport metrics_from_predictions(std::span<const int> predictions,
                                       const data::Dataset& test);

// Error-Venn accounting. errors[m][i] says model m misclassified instance i.
// Returns 2^m counts; entry `mask` is the number of instances misclassified
// by exactly the models in `mask`. Entry 0 counts instances everyone got
// right, so the nonzero-mask entries partition the union of error sets.
std::vector<std::size_t> venn_regions(std::span<const std::vector<bool>> errors);

}  // namespace weasl::eval
