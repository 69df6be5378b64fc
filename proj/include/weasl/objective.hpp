#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace weasl::objective {

// 99 thresholds 0.01 .. 0.99.
std::vector<double> default_gamma_grid();

struct ObjectiveConfig {
    enum class Mode { balanced, imbalanced };

    double lambda = 1.0;  // weak-term weight
    double s = 100.0;     // soft-threshold sharpness
    std::vector<double> gamma_grid = default_gamma_grid();
    double tau = 0.01;    // softmax temperature over the gamma grid
    Mode mode = Mode::balanced;
    double beta_hat = 0.0;  // used in imbalanced mode

    void validate() const;
};

inline constexpr double kDenominatorFloor = 1e-8;

double soft_threshold(double score, double gamma, double s);

// Mean agreement between soft predictions and 0/1 labels.
double objective_strong(std::span<const double> soft_preds, std::span<const double> y);
double objective_weak_balanced(std::span<const double> soft_preds, std::span<const double> g);

// Noise-adjusted G-measure surrogate: (sum p*g - beta*sum p)^2 / (N * sum p),
// 0 when sum p falls below the floor.
double objective_weak_gmeasure(std::span<const double> soft_preds, std::span<const double> g,
                               double beta_hat);

// One additive piece of the per-gamma objective. `accuracy` covers the strong
// term, the balanced weak term, and group-level MIL accuracy; `gmeasure` is
// the imbalanced weak term; `soft_f` is group-level soft F-measure.
enum class TermKind { accuracy, gmeasure, soft_f };

struct TermData {
    TermKind kind = TermKind::accuracy;
    double weight = 1.0;
    double beta = 0.0;  // gmeasure only
    std::span<const double> scores;
    std::span<const double> labels;  // 0/1 as double
};

struct CombineResult {
    double value = 0.0;              // softmax-smoothed max over gamma
    std::vector<double> per_gamma;   // sum of weighted term values per gamma
    std::size_t argmax = 0;          // first index attaining the grid max
};

CombineResult combine(std::span<const TermData> terms, std::span<const double> gamma_grid,
                      double s, double tau);

// Also writes d(value)/d(score) for each term's units into grads[t].
CombineResult combine_with_grad(std::span<const TermData> terms,
                                std::span<const double> gamma_grid, double s, double tau,
                                std::span<const std::span<double>> grads);

// Strong + weak composition per the config. An empty strong set drops the
// strong term; an empty weak set requires lambda = 0.
CombineResult combined_objective(std::span<const double> strong_scores, std::span<const double> y,
                                 std::span<const double> weak_scores, std::span<const double> g,
                                 const ObjectiveConfig& cfg);

CombineResult d_objective_d_scores(std::span<const double> strong_scores,
                                   std::span<const double> y,
                                   std::span<const double> weak_scores, std::span<const double> g,
                                   const ObjectiveConfig& cfg, std::span<double> strong_grad,
                                   std::span<double> weak_grad);

}  // namespace weasl::objective
