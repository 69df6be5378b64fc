#include "weasl/objective.hpp"

#include <algorithm>
#include <cmath>

#include "weasl/error.hpp"
#include "weasl/kernels.hpp"

namespace weasl::objective {

std::vector<double> default_gamma_grid() {
    std::vector<double> grid(99);
    for (std::size_t i = 0; i < 99; ++i) grid[i] = static_cast<double>(i + 1) / 100.0;
    return grid;
}

void ObjectiveConfig::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    if (!(s > 0.0)) throw ConfigError("sharpness s must be positive");
    if (!(tau > 0.0)) throw ConfigError("softmax temperature tau must be positive");
    if (gamma_grid.empty()) throw ConfigError("gamma grid must be non-empty");
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        if (!(gamma_grid[i] > 0.0 && gamma_grid[i] < 1.0)) {
            throw ConfigError("gamma grid values must lie in (0,1)");
        }
        if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1])) {
            throw ConfigError("gamma grid must be strictly ascending");
        }
    }
    if (mode == Mode::imbalanced && !(beta_hat >= 0.0 && beta_hat < 1.0)) {
        throw ConfigError("imbalanced mode needs beta_hat in [0,1)");
    }
}

double soft_threshold(double score, double gamma, double s) {
    if (!(s > 0.0)) throw ConfigError("sharpness s must be positive");
    return kernels::soft_threshold(score, gamma, s);
}

namespace {

void check_pair(std::span<const double> preds, std::span<const double> labels) {
    if (preds.empty()) throw ConfigError("objective over an empty set");
    if (preds.size() != labels.size()) throw ConfigError("prediction/label length mismatch");
}

// Per-gamma value and (dValue/dA, dValue/dB) for one term, where
// A = sum p*label, B = sum p over the term's units.
struct TermEval {
    double value;
    double d_a;
    double d_b;
};

TermEval eval_term(TermKind kind, double a, double b, double n_units, double label_sum,
                   double beta) {
    switch (kind) {
        case TermKind::accuracy: {
            const double n0 = n_units - label_sum;
            return {(2.0 * a - b + n0) / n_units, 2.0 / n_units, -1.0 / n_units};
        }
        case TermKind::gmeasure: {
            if (b < kDenominatorFloor) return {0.0, 0.0, 0.0};
            const double d = a - beta * b;
            const double value = d * d / (n_units * b);
            const double d_a = 2.0 * d / (n_units * b);
            const double d_b = -2.0 * beta * d / (n_units * b) - d * d / (n_units * b * b);
            return {value, d_a, d_b};
        }
        case TermKind::soft_f: {
            const double denom = std::max(b + label_sum, kDenominatorFloor);
            return {2.0 * a / denom, 2.0 / denom, -2.0 * a / (denom * denom)};
        }
    }
    throw ConfigError("unknown term kind");
}

CombineResult combine_impl(std::span<const TermData> terms, std::span<const double> gamma_grid,
                           double s, double tau, std::span<const std::span<double>> grads) {
    if (terms.empty()) throw ConfigError("no objective terms");
    if (gamma_grid.empty()) throw ConfigError("gamma grid must be non-empty");
    if (!(s > 0.0) || !(tau > 0.0)) throw ConfigError("s and tau must be positive");
    const bool want_grads = !grads.empty();
    if (want_grads && grads.size() != terms.size()) {
        throw ConfigError("one gradient buffer per term required");
    }

    const std::size_t k = gamma_grid.size();
    const std::size_t t_count = terms.size();

    std::vector<kernels::GammaSums> sums(t_count);
    std::vector<double> label_sums(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        const TermData& term = terms[t];
        check_pair(term.scores, term.labels);
        if (term.weight < 0.0) throw ConfigError("term weights must be non-negative");
        if (want_grads && grads[t].size() != term.scores.size()) {
            throw ConfigError("gradient buffer size mismatch");
        }
        sums[t] = kernels::gamma_sums(term.scores, term.labels, gamma_grid, s);
        double ls = 0.0;
        for (double l : term.labels) ls += l;
        label_sums[t] = ls;
    }

    CombineResult result;
    result.per_gamma.assign(k, 0.0);
    std::vector<TermEval> evals(t_count * k);
    for (std::size_t t = 0; t < t_count; ++t) {
        const TermData& term = terms[t];
        const double n_units = static_cast<double>(term.scores.size());
        for (std::size_t j = 0; j < k; ++j) {
            const TermEval e = eval_term(term.kind, sums[t].weighted[j], sums[t].total[j],
                                         n_units, label_sums[t], term.beta);
            evals[t * k + j] = e;
            result.per_gamma[j] += term.weight * e.value;
        }
    }

    // Softmax-smoothed max over the grid.
    const auto max_it = std::max_element(result.per_gamma.begin(), result.per_gamma.end());
    result.argmax = static_cast<std::size_t>(max_it - result.per_gamma.begin());
    const double m = *max_it;
    std::vector<double> p(k);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        p[j] = std::exp((result.per_gamma[j] - m) / tau);
        z += p[j];
    }
    double value = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        p[j] /= z;
        value += p[j] * result.per_gamma[j];
    }
    result.value = value;

    if (want_grads) {
        // dValue/dO_j through both the weights and the values of the softmax.
        std::vector<double> upweight(k);
        for (std::size_t j = 0; j < k; ++j) {
            upweight[j] = p[j] * (1.0 + (result.per_gamma[j] - value) / tau);
        }
        std::vector<double> coeff_label(k);
        std::vector<double> coeff_unit(k);
        for (std::size_t t = 0; t < t_count; ++t) {
            const TermData& term = terms[t];
            for (std::size_t j = 0; j < k; ++j) {
                const TermEval& e = evals[t * k + j];
                coeff_label[j] = upweight[j] * term.weight * e.d_a;
                coeff_unit[j] = upweight[j] * term.weight * e.d_b;
            }
            kernels::gamma_upstream(term.scores, term.labels, gamma_grid, s, coeff_label,
                                    coeff_unit, grads[t]);
        }
    }
    return result;
}

}  // namespace

double objective_strong(std::span<const double> soft_preds, std::span<const double> y) {
    check_pair(soft_preds, y);
    double acc = 0.0;
    for (std::size_t i = 0; i < soft_preds.size(); ++i) {
        acc += soft_preds[i] * y[i] + (1.0 - soft_preds[i]) * (1.0 - y[i]);
    }
    return acc / static_cast<double>(soft_preds.size());
}

double objective_weak_balanced(std::span<const double> soft_preds, std::span<const double> g) {
    return objective_strong(soft_preds, g);
}

double objective_weak_gmeasure(std::span<const double> soft_preds, std::span<const double> g,
                               double beta_hat) {
    check_pair(soft_preds, g);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < soft_preds.size(); ++i) {
        a += soft_preds[i] * g[i];
        b += soft_preds[i];
    }
    if (b < kDenominatorFloor) return 0.0;
    const double d = a - beta_hat * b;
    return d * d / (static_cast<double>(soft_preds.size()) * b);
}

CombineResult combine(std::span<const TermData> terms, std::span<const double> gamma_grid,
                      double s, double tau) {
    return combine_impl(terms, gamma_grid, s, tau, {});
}

CombineResult combine_with_grad(std::span<const TermData> terms,
                                std::span<const double> gamma_grid, double s, double tau,
                                std::span<const std::span<double>> grads) {
    return combine_impl(terms, gamma_grid, s, tau, grads);
}

namespace {

std::vector<TermData> build_terms(std::span<const double> strong_scores, std::span<const double> y,
                                  std::span<const double> weak_scores, std::span<const double> g,
                                  const ObjectiveConfig& cfg) {
    cfg.validate();
    if (strong_scores.empty() && weak_scores.empty()) {
        throw ConfigError("both strong and weak sets are empty");
    }
    if (weak_scores.empty() && cfg.lambda > 0.0) {
        throw ConfigError("empty weak set requires lambda = 0");
    }
    std::vector<TermData> terms;
    if (!strong_scores.empty()) {
        terms.push_back({TermKind::accuracy, 1.0, 0.0, strong_scores, y});
    }
    if (!weak_scores.empty()) {
        TermData weak;
        weak.kind = cfg.mode == ObjectiveConfig::Mode::balanced ? TermKind::accuracy
                                                                : TermKind::gmeasure;
        weak.weight = cfg.lambda;
        weak.beta = cfg.beta_hat;
        weak.scores = weak_scores;
        weak.labels = g;
        terms.push_back(weak);
    }
    return terms;
}

}  // namespace

CombineResult combined_objective(std::span<const double> strong_scores, std::span<const double> y,
                                 std::span<const double> weak_scores, std::span<const double> g,
                                 const ObjectiveConfig& cfg) {
    const auto terms = build_terms(strong_scores, y, weak_scores, g, cfg);
    return combine(terms, cfg.gamma_grid, cfg.s, cfg.tau);
}

CombineResult d_objective_d_scores(std::span<const double> strong_scores,
                                   std::span<const double> y,
                                   std::span<const double> weak_scores, std::span<const double> g,
                                   const ObjectiveConfig& cfg, std::span<double> strong_grad,
                                   std::span<double> weak_grad) {
    const auto terms = build_terms(strong_scores, y, weak_scores, g, cfg);
    std::vector<std::span<double>> grads;
    if (!strong_scores.empty()) grads.push_back(strong_grad);
    if (!weak_scores.empty()) grads.push_back(weak_grad);
    return combine_impl(terms, cfg.gamma_grid, cfg.s, cfg.tau, grads);
}

}  // namespace weasl::objective
