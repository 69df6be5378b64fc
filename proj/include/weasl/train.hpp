#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weasl/dataset.hpp"
#include "weasl/eval.hpp"
#include "weasl/model.hpp"
#include "weasl/objective.hpp"

namespace weasl::train {

enum class Method { weasl, only_strong, only_weak, mil_balanced, mil_imbalanced };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct TrainConfig {
    objective::ObjectiveConfig objective;
    double learning_rate = 0.1;
    double momentum = 0.0;
    std::size_t epochs = 200;
    std::size_t batch = 0;  // weak-set minibatch size; 0 = full batch
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid = {1.0};
    Method method = Method::weasl;
    std::size_t cv_folds = 3;
    std::size_t restarts = 1;  // independent inits; the best final objective wins
    bool record_trace = false;

    void validate() const;
};

struct TrainingTrace {
    std::vector<double> objective_values;  // one per optimizer step
};

struct TrainedModel {
    model::ScorerSpec spec;
    model::ScorerParams params;
    double threshold = 0.5;  // argmax-gamma of the final per-gamma objective
    Method method = Method::only_strong;
    double lambda = 0.0;
    double beta_hat = 0.0;
    std::uint64_t seed = 0;
    double final_objective = 0.0;
    data::KvPairs provenance;
    TrainingTrace trace;
};

// Joint objective over the strong and weak sets; lambda comes from
// lambda_grid (single entry: used directly; several: cross-validated).
TrainedModel train_weasl(const data::Dataset& strong, const data::Dataset& weak,
                         const model::ScorerSpec& spec, const TrainConfig& cfg);

TrainedModel train_only_strong(const data::Dataset& strong, const model::ScorerSpec& spec,
                               const TrainConfig& cfg);

// Weak term alone at weight 1; balanced or imbalanced per cfg.objective.mode.
TrainedModel train_only_weak(const data::Dataset& weak, const model::ScorerSpec& spec,
                             const TrainConfig& cfg);

enum class GroupMetric { accuracy, fmeasure };

// Mean aggregation of member scores per group, soft-thresholded at gamma,
// trained on the group-level metric. Instance scorer + learned threshold are
// used directly for instance prediction.
TrainedModel train_mil(const data::Dataset& weak, const data::GroupTable& gt,
                       const model::ScorerSpec& spec, const TrainConfig& cfg, GroupMetric metric);

// k-fold cross-validation on the strong set (LOO below k instances): trains
// on fold-complement + full weak set, scores the mode's metric on the fold.
// Ties prefer the smaller lambda.
double select_lambda(const data::Dataset& strong, const data::Dataset& weak,
                     const model::ScorerSpec& spec, const TrainConfig& cfg);

eval::MetricsReport evaluate(const TrainedModel& m, const data::Dataset& test);

std::vector<int> predict(const TrainedModel& m, const data::Dataset& test);

// Per-subset error counts over a shared test set; see eval::venn_regions.
std::vector<std::size_t> error_venn(const std::vector<const TrainedModel*>& models,
                                    const data::Dataset& test);

void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace weasl::train
