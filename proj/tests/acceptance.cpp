// ============================================================================
// acceptance.cpp
// Release gate for the library: ten end-to-end checks, one [PASS]/[FAIL]
// line each. Each check re-derives its expected values independently
// (hand counts, closed-form oracles, finite differences) instead of
// trusting intermediate library output.
//
// Usage:
//   acceptance        run all criteria
//   acceptance N      run criterion N alone (1..10)
// ============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "weasl/dataset.hpp"
#include "weasl/eval.hpp"
#include "weasl/experiment.hpp"
#include "weasl/model.hpp"
#include "weasl/noise.hpp"
#include "weasl/objective.hpp"
#include "weasl/rng.hpp"
#include "weasl/synth.hpp"
#include "weasl/train.hpp"

using namespace weasl;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& msg) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        if (detail.size() < 600) detail += msg;
    }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// ----------------------------------------------------------------------------
// 1. Gradient check: analytic parameter gradients of the combined objective
//    against central finite differences, logistic and mlp[128,64], both
//    objective modes, 3-point and 99-point threshold grids.
// ----------------------------------------------------------------------------

struct GradCase {
    model::ScorerSpec spec;
    objective::ObjectiveConfig ocfg;
    data::Dataset strong;
    data::Dataset weak;
    std::vector<double> y;
    std::vector<double> g;
};

GradCase make_grad_case(bool mlp, bool imbalanced, bool tiny_grid, std::uint64_t seed) {
    rng::Stream r(rng::derive(seed, 0xACCE97));
    GradCase c;
    const std::size_t dim = 1 + r.next_below(4);
    c.spec.kind = mlp ? model::Kind::mlp : model::Kind::logistic;
    if (mlp) c.spec.hidden_sizes = {128, 64};
    c.spec.input_dim = dim;

    const std::size_t n_strong = 1 + r.next_below(10);
    const std::size_t n_weak = 2 + r.next_below(19);
    c.strong = data::Dataset(dim);
    c.weak = data::Dataset(dim);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n_strong; ++i) {
        for (auto& v : x) v = 2.0 * r.next_normal();
        c.strong.append(x, -1, -1, -1);
        c.y.push_back(static_cast<double>(r.next_below(2)));
    }
    for (std::size_t i = 0; i < n_weak; ++i) {
        for (auto& v : x) v = 2.0 * r.next_normal();
        c.weak.append(x, -1, -1, -1);
        c.g.push_back(static_cast<double>(r.next_below(2)));
    }

    c.ocfg.lambda = 0.5 + 3.0 * r.next_unit();
    c.ocfg.s = 100.0;
    c.ocfg.tau = 0.01;
    if (tiny_grid) c.ocfg.gamma_grid = {0.25, 0.5, 0.75};
    c.ocfg.mode = imbalanced ? objective::ObjectiveConfig::Mode::imbalanced
                             : objective::ObjectiveConfig::Mode::balanced;
    c.ocfg.beta_hat = imbalanced ? 0.02 + 0.2 * r.next_unit() : 0.0;
    return c;
}

double objective_at(const GradCase& c, const model::ScorerParams& p) {
    std::vector<double> ss(c.strong.size()), ws(c.weak.size());
    model::forward_batch(c.spec, p, c.strong, model::Mode::eval, 0, ss);
    model::forward_batch(c.spec, p, c.weak, model::Mode::eval, 0, ws);
    return objective::combined_objective(ss, c.y, ws, c.g, c.ocfg).value;
}

void check_gradients(const GradCase& c, std::uint64_t init_seed, Outcome& out) {
    model::ScorerParams p = model::init_params(c.spec, init_seed);

    std::vector<double> ss(c.strong.size()), ws(c.weak.size());
    model::forward_batch(c.spec, p, c.strong, model::Mode::eval, 0, ss);
    model::forward_batch(c.spec, p, c.weak, model::Mode::eval, 0, ws);
    std::vector<double> ds(ss.size()), dw(ws.size());
    objective::d_objective_d_scores(ss, c.y, ws, c.g, c.ocfg, ds, dw);

    const std::size_t np = p.w.size();
    std::vector<double> g_strong(np), g_weak(np);
    model::backward_batch(c.spec, p, c.strong, model::Mode::eval, 0, ds, g_strong);
    model::backward_batch(c.spec, p, c.weak, model::Mode::eval, 0, dw, g_weak);

    auto fd_at = [&](std::size_t i, double eps) {
        const double keep = p.w[i];
        p.w[i] = keep + eps;
        const double hi = objective_at(c, p);
        p.w[i] = keep - eps;
        const double lo = objective_at(c, p);
        p.w[i] = keep;
        return (hi - lo) / (2.0 * eps);
    };

    // central differences bottom out near 1e-10 absolute (round-off u*|f|/eps),
    // so coordinates that small are compared against that floor instead of the
    // relative bound the larger ones must meet
    std::size_t bad = 0;
    for (std::size_t i = 0; i < np; ++i) {
        const double an = g_strong[i] + g_weak[i];
        if (std::fabs(an) <= 1e-8) continue;
        double fd = fd_at(i, 2e-6);
        auto accept = [&] {
            const double rel = std::fabs(an - fd) / std::max(std::fabs(an), std::fabs(fd));
            return rel <= 1e-5 || std::fabs(an - fd) <= 1e-10;
        };
        if (!accept()) {
            // refine: larger step with one Richardson extrapolation kills both
            // round-off and truncation before declaring a mismatch
            const double d1 = fd_at(i, 1e-4);
            const double d2 = fd_at(i, 5e-5);
            fd = (4.0 * d2 - d1) / 3.0;
        }
        if (!accept()) {
            ++bad;
            if (bad <= 2)
                out.fail("coord " + std::to_string(i) + fmt(" analytic %.6e vs fd %.6e", an, fd));
        }
    }
    if (bad > 2) out.fail(std::to_string(bad) + " mismatched coordinates total");
}

Outcome criterion_1() {
    Outcome out;
    std::uint64_t seed = 1;
    for (int combo = 0; combo < 4; ++combo) {
        const bool imbalanced = combo & 1;
        const bool tiny = combo & 2;
        for (int k = 0; k < 4; ++k) {
            GradCase c = make_grad_case(false, imbalanced, tiny, seed);
            check_gradients(c, 100 + seed, out);
            ++seed;
        }
        GradCase c = make_grad_case(true, imbalanced, tiny, seed);
        check_gradients(c, 100 + seed, out);
        ++seed;
    }
    return out;
}

// ----------------------------------------------------------------------------
// 2. Noise-rate recovery: injected class-conditional noise is recovered by
//    counting, and the half-pure grouped construction gives its closed-form
//    rates exactly.
// ----------------------------------------------------------------------------

Outcome criterion_2() {
    Outcome out;
    const auto spec = synth::GaussianMixtureSpec::separated(3.0, 2);
    const auto clean = synth::gen_instances(spec, 50000, 50000, 21);
    const auto noisy = synth::inject_ccn_noise(clean, 0.3, 0.05, 22);
    const auto rates = noise::true_noise_rates(noisy);
    if (std::fabs(rates.alpha - 0.3) > 0.005)
        out.fail(fmt("alpha %.4f not within 0.005 of 0.3", rates.alpha));
    if (std::fabs(rates.beta - 0.05) > 0.005)
        out.fail(fmt("beta %.4f not within 0.005 of 0.05", rates.beta));

    synth::PurityConfig pc;
    pc.f = 0.5;
    pc.group_size = 20;
    pc.n_pos_groups = 50;
    pc.n_neg_groups = 50;
    pc.seed = 7;
    const auto grouped = synth::gen_purity_dataset(pc, synth::GaussianMixtureSpec::purity_default());
    const auto r2 = noise::true_noise_rates(grouped.dataset);
    if (r2.alpha != 0.0) out.fail(fmt("grouped alpha %.17g, want exact 0", r2.alpha));
    if (r2.beta != 1.0 / 3.0) out.fail(fmt("grouped beta %.17g, want exact 1/3", r2.beta));
    return out;
}

// ----------------------------------------------------------------------------
// 3. Noise-rate estimation from data: on well-separated classes the
//    lowest-score quantile of the weak set recovers beta within 0.02 on at
//    least 4 of 5 seeds for each true rate.
// ----------------------------------------------------------------------------

Outcome criterion_3() {
    Outcome out;
    const auto spec = synth::GaussianMixtureSpec::separated(3.0, 2);
    const auto scorer = model::parse_scorer("logistic", 2, 0.0);
    for (double beta : {0.02, 0.05, 0.10}) {
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto key = rng::derive(0xBE7A, seed * 1000 + static_cast<std::uint64_t>(beta * 100));
            const auto strong = synth::gen_instances(spec, 100, 100, rng::derive(key, 1));
            const auto clean = synth::gen_instances(spec, 10000, 10000, rng::derive(key, 2));
            const auto weak = synth::inject_ccn_noise(clean, 0.2, beta, rng::derive(key, 3));
            const auto cfg = noise::default_estimation_config(seed);
            const double est = noise::estimate_beta(strong, weak, scorer, cfg);
            if (std::fabs(est - beta) <= 0.02) ++hits;
        }
        if (hits < 4) out.fail(fmt("beta %.2f recovered on only %.0f of 5 seeds", beta, hits));
    }
    return out;
}

// ----------------------------------------------------------------------------
// 4. Surrogate oracle equivalence: with a fixed scorer and known beta, the
//    threshold maximizing the noisy-label surrogate sits within one grid
//    step of the threshold maximizing true G-measure on clean labels.
// ----------------------------------------------------------------------------

Outcome criterion_4() {
    Outcome out;
    const auto spec = synth::GaussianMixtureSpec::separated(2.0, 2);
    const auto scorer = model::parse_scorer("logistic", 2, 0.0);
    const auto grid = objective::default_gamma_grid();
    const double alpha = 0.3, beta = 0.05;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto key = rng::derive(0x04AC, seed);
        const auto strong = synth::gen_instances(spec, 100, 100, rng::derive(key, 1));
        train::TrainConfig tc;
        tc.learning_rate = 0.5;
        tc.momentum = 0.9;
        tc.epochs = 200;
        tc.seed = seed;
        tc.restarts = 3;
        const auto m = train::train_only_strong(strong, scorer, tc);

        const auto clean = synth::gen_instances(spec, 50000, 50000, rng::derive(key, 2));
        const auto noisy = synth::inject_ccn_noise(clean, alpha, beta, rng::derive(key, 3));
        std::vector<double> scores(noisy.size());
        model::forward_batch(m.spec, m.params, noisy, model::Mode::eval, 0, scores);
        std::vector<double> g(noisy.size());
        for (std::size_t i = 0; i < noisy.size(); ++i) g[i] = noisy.g[i];

        std::size_t arg_sur = 0, arg_true = 0;
        double best_sur = -1.0, best_true = -1.0;
        std::vector<double> soft(scores.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (std::size_t i = 0; i < scores.size(); ++i)
                soft[i] = objective::soft_threshold(scores[i], grid[k], 100.0);
            const double sur = objective::objective_weak_gmeasure(soft, g, beta);
            if (sur > best_sur) {
                best_sur = sur;
                arg_sur = k;
            }
            std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                const bool pred = scores[i] > grid[k];
                const bool pos = clean.y[i] == 1;
                if (pred && pos) ++tp;
                else if (pred) ++fp;
                else if (pos) ++fn;
                else ++tn;
            }
            const double gm = eval::MetricsReport::from_counts(tp, fp, tn, fn).g_measure;
            if (gm > best_true) {
                best_true = gm;
                arg_true = k;
            }
        }
        const std::size_t gap = arg_sur > arg_true ? arg_sur - arg_true : arg_true - arg_sur;
        if (gap <= 1) ++hits;
        else out.fail(fmt("seed %.0f: surrogate argmax %.2f vs true %.2f",
                          static_cast<double>(seed), grid[arg_sur], grid[arg_true]));
    }
    if (hits < 4) {
        out.fail(std::to_string(hits) + " of 5 seeds within one grid step");
    } else {
        out.ok = true;
        out.detail.clear();
    }
    return out;
}

// ----------------------------------------------------------------------------
// Shared harness setup for the sweep criteria (5, 6, 7, 9).
// ----------------------------------------------------------------------------

// hyperparameters shared by the grouped-data sweeps
constexpr const char* kSweepScorer = "mlp:8";
constexpr double kSweepDropout = 0.0;
constexpr double kSweepLr = 1.0;
constexpr std::size_t kSweepEpochs = 600;
constexpr std::size_t kSweepRestarts = 12;
const std::vector<double> kSweepLambdaGrid = {4.0, 20.0, 100.0};

experiment::ExperimentConfig sweep_config(experiment::Kind kind, std::vector<double> sweep,
                                          std::vector<train::Method> methods) {
    experiment::ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.sweep = std::move(sweep);
    cfg.methods = std::move(methods);
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.scorer = model::parse_scorer(kSweepScorer, 2, kSweepDropout);
    cfg.tcfg.learning_rate = kSweepLr;
    cfg.tcfg.momentum = 0.9;
    cfg.tcfg.epochs = kSweepEpochs;
    cfg.tcfg.restarts = kSweepRestarts;
    cfg.tcfg.lambda_grid = kSweepLambdaGrid;
    cfg.imbalanced = true;
    cfg.resolve();
    return cfg;
}

// mean of `field` over seeds for each (x, method) cell; fails on error rows
std::map<std::pair<double, train::Method>, double> cell_means(
    const experiment::ExperimentReport& rep, double eval::MetricsReport::*field, Outcome& out) {
    std::map<std::pair<double, train::Method>, std::pair<double, std::size_t>> acc;
    for (const auto& row : rep.rows) {
        if (!row.ok) {
            out.fail("run failed at x=" + fmt("%.2f", row.x) + " " +
                     train::method_name(row.method) + " seed " + std::to_string(row.seed) + ": " +
                     row.error);
            continue;
        }
        auto& slot = acc[{row.x, row.method}];
        slot.first += row.metrics.*field;
        slot.second += 1;
    }
    std::map<std::pair<double, train::Method>, double> means;
    for (const auto& [k, v] : acc) means[k] = v.first / static_cast<double>(v.second);
    return means;
}

// ----------------------------------------------------------------------------
// 5. Purity sweep ordering: the joint method's mean test F-measure beats
//    every baseline at f in {0.8, 0.6, 0.4}, and its mean margin over the
//    group-trained baselines does not shrink as purity drops.
// ----------------------------------------------------------------------------

Outcome criterion_5() {
    Outcome out;
    auto cfg = sweep_config(experiment::Kind::purity_sweep, {0.8, 0.6, 0.4},
                            {train::Method::weasl, train::Method::only_strong,
                             train::Method::mil_balanced, train::Method::mil_imbalanced});
    const auto rep = experiment::run_experiment(cfg);
    auto means = cell_means(rep, &eval::MetricsReport::f_measure, out);
    if (!out.ok) return out;

    std::vector<double> margins;
    for (double f : cfg.sweep) {
        const double w = means[{f, train::Method::weasl}];
        const double st = means[{f, train::Method::only_strong}];
        const double mb = means[{f, train::Method::mil_balanced}];
        const double mi = means[{f, train::Method::mil_imbalanced}];
        if (w < st) out.fail(fmt("f=%.1f: joint %.4f below strong-only %.4f", f, w, st));
        if (w < mb) out.fail(fmt("f=%.1f: joint %.4f below balanced group baseline %.4f", f, w, mb));
        if (w < mi)
            out.fail(fmt("f=%.1f: joint %.4f below imbalanced group baseline %.4f", f, w, mi));
        margins.push_back(w - 0.5 * (mb + mi));
    }
    for (std::size_t i = 1; i < margins.size(); ++i) {
        if (margins[i] < margins[i - 1])
            out.fail(fmt("margin drops from %.4f to %.4f as purity falls", margins[i - 1],
                         margins[i]));
    }
    return out;
}

// ----------------------------------------------------------------------------
// 6. Skew sweep ordering: at target skews {2, 6, 12} with a balanced strong
//    set, the joint method's mean F-measure is at least each single-source
//    baseline's.
// ----------------------------------------------------------------------------

Outcome criterion_6() {
    Outcome out;
    auto cfg = sweep_config(experiment::Kind::skew_sweep, {2.0, 6.0, 12.0},
                            {train::Method::weasl, train::Method::only_strong,
                             train::Method::only_weak});
    const auto rep = experiment::run_experiment(cfg);
    auto means = cell_means(rep, &eval::MetricsReport::f_measure, out);
    if (!out.ok) return out;

    for (double skew : cfg.sweep) {
        const double w = means[{skew, train::Method::weasl}];
        const double st = means[{skew, train::Method::only_strong}];
        const double wk = means[{skew, train::Method::only_weak}];
        if (w < st) out.fail(fmt("skew %.0f: joint %.4f below strong-only %.4f", skew, w, st));
        if (w < wk) out.fail(fmt("skew %.0f: joint %.4f below weak-only %.4f", skew, w, wk));
    }
    return out;
}

// ----------------------------------------------------------------------------
// 7. Strong-count convergence: strong-only accuracy is non-decreasing in the
//    strong-set size, and the joint method's accuracy advantage at size
//    10000 is no larger than at size 10.
// ----------------------------------------------------------------------------

Outcome criterion_7() {
    Outcome out;
    experiment::ExperimentConfig cfg;
    cfg.kind = experiment::Kind::strong_count_sweep;
    cfg.sweep = {10, 100, 1000, 10000};
    cfg.methods = {train::Method::weasl, train::Method::only_strong};
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.scorer = model::parse_scorer("logistic", 2, 0.0);
    cfg.tcfg.learning_rate = 1.0;
    cfg.tcfg.momentum = 0.9;
    cfg.tcfg.epochs = 300;
    cfg.tcfg.restarts = 4;
    cfg.tcfg.lambda_grid = {1.0};
    cfg.beta_override = 0.05;  // matches the injected rate
    cfg.imbalanced = true;
    cfg.resolve();
    const auto rep = experiment::run_experiment(cfg);
    auto means = cell_means(rep, &eval::MetricsReport::accuracy, out);
    if (!out.ok) return out;

    double prev = -1.0;
    for (double n : cfg.sweep) {
        const double st = means[{n, train::Method::only_strong}];
        if (st < prev)
            out.fail(fmt("strong-only accuracy drops to %.4f at size %.0f", st, n));
        prev = st;
    }
    const double gap_small =
        means[{10.0, train::Method::weasl}] - means[{10.0, train::Method::only_strong}];
    const double gap_large =
        means[{10000.0, train::Method::weasl}] - means[{10000.0, train::Method::only_strong}];
    if (gap_large > gap_small)
        out.fail(fmt("accuracy gap grew from %.4f (n=10) to %.4f (n=10000)", gap_small, gap_large));
    return out;
}

// ----------------------------------------------------------------------------
// 8. Code-path identities: zero weak weight reproduces strong-only training
//    bit for bit; fully pure groups make weak-only training match training
//    on the true labels.
// ----------------------------------------------------------------------------

Outcome criterion_8() {
    Outcome out;
    const auto scorer = model::parse_scorer("logistic", 2, 0.0);

    synth::PurityConfig pc;
    pc.f = 0.8;
    pc.n_pos_groups = 10;
    pc.n_neg_groups = 10;
    pc.seed = 31;
    const auto grouped = synth::gen_purity_dataset(pc, synth::GaussianMixtureSpec::purity_default());
    const auto strong = synth::gen_instances(synth::GaussianMixtureSpec::purity_default(), 30, 30, 32);

    train::TrainConfig tc;
    tc.learning_rate = 0.5;
    tc.momentum = 0.9;
    tc.epochs = 80;
    tc.seed = 11;
    tc.restarts = 2;
    tc.lambda_grid = {0.0};
    const auto joint = train::train_weasl(strong, grouped.dataset, scorer, tc);
    const auto solo = train::train_only_strong(strong, scorer, tc);
    if (joint.params.w != solo.params.w) out.fail("zero weak weight changed the parameters");
    if (joint.threshold != solo.threshold) out.fail("zero weak weight changed the threshold");

    synth::PurityConfig pure;
    pure.f = 1.0;
    pure.n_pos_groups = 20;
    pure.n_neg_groups = 20;
    pure.seed = 33;
    const auto pure_data = synth::gen_purity_dataset(pure, synth::GaussianMixtureSpec::purity_default());
    train::TrainConfig tw;
    tw.learning_rate = 0.5;
    tw.momentum = 0.9;
    tw.epochs = 80;
    tw.seed = 5;
    const auto weak_model = train::train_only_weak(pure_data.dataset, scorer, tw);
    const auto true_model = train::train_only_strong(pure_data.dataset, scorer, tw);

    const auto test = synth::gen_instances(synth::GaussianMixtureSpec::purity_default(), 500, 500, 34);
    const auto pw = train::predict(weak_model, test);
    const auto pt = train::predict(true_model, test);
    if (pw != pt) {
        std::size_t diff = 0;
        for (std::size_t i = 0; i < pw.size(); ++i) diff += pw[i] != pt[i];
        out.fail(std::to_string(diff) + " of " + std::to_string(pw.size()) +
                 " predictions differ between weak-only and true-label training");
    }
    return out;
}

// ----------------------------------------------------------------------------
// 9. Complementarity accounting: the error-region counts reproduce each
//    model's error total exactly, and at f=0.6 the joint method makes no
//    more errors on average than the better single-source baseline.
// ----------------------------------------------------------------------------

Outcome criterion_9() {
    Outcome out;
    auto cfg = sweep_config(experiment::Kind::baseline_compare, {0.6},
                            {train::Method::weasl, train::Method::only_strong,
                             train::Method::only_weak});
    const auto rep = experiment::run_experiment(cfg);

    std::map<std::pair<std::uint64_t, std::string>, std::size_t> row_errors;
    for (const auto& row : rep.rows) {
        if (!row.ok) {
            out.fail("run failed: " + row.error);
            return out;
        }
        row_errors[{row.seed, train::method_name(row.method)}] = row.metrics.fp + row.metrics.fn;
    }

    if (rep.venn.size() != cfg.seeds.size()) {
        out.fail("expected one error-region row per seed");
        return out;
    }
    for (const auto& vr : rep.venn) {
        if (vr.counts.size() != (std::size_t{1} << rep.venn_methods.size())) {
            out.fail("region count is not 2^models");
            continue;
        }
        for (std::size_t m = 0; m < rep.venn_methods.size(); ++m) {
            std::size_t sum = 0;
            for (std::size_t mask = 0; mask < vr.counts.size(); ++mask) {
                if (mask & (std::size_t{1} << m)) sum += vr.counts[mask];
            }
            const auto want = row_errors.at({vr.seed, rep.venn_methods[m]});
            if (sum != want)
                out.fail("seed " + std::to_string(vr.seed) + " " + rep.venn_methods[m] +
                         ": regions sum to " + std::to_string(sum) + ", metrics say " +
                         std::to_string(want));
        }
    }

    double w = 0, st = 0, wk = 0;
    for (const auto& [k, v] : row_errors) {
        if (k.second == "weasl") w += static_cast<double>(v);
        if (k.second == "only_strong") st += static_cast<double>(v);
        if (k.second == "only_weak") wk += static_cast<double>(v);
    }
    if (w > std::min(st, wk))
        out.fail(fmt("mean errors: joint %.1f vs strong-only %.1f, weak-only %.1f",
                     w / 5.0, st / 5.0, wk / 5.0));
    return out;
}

// ----------------------------------------------------------------------------
// 10. Metric formula properties over random confusion counts, including the
//     zero-denominator conventions and the G-measure identity.
// ----------------------------------------------------------------------------

Outcome criterion_10() {
    Outcome out;
    rng::Stream r(0xF07);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t tp = r.next_below(40);
        const std::size_t fp = r.next_below(40);
        const std::size_t tn = r.next_below(40);
        std::size_t fn = r.next_below(40);
        if (tp + fp + tn + fn == 0) fn = 1;
        const auto m = eval::MetricsReport::from_counts(tp, fp, tn, fn);
        const double total = static_cast<double>(tp + fp + tn + fn);

        if (m.accuracy != static_cast<double>(tp + tn) / total) out.fail("accuracy identity");
        const double p = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double rc = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        if (m.precision != p) out.fail("precision identity");
        if (m.recall != rc) out.fail("recall identity");
        const double f = p + rc > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
        if (m.f_measure != f) out.fail("f-measure identity");
        if (std::fabs(m.g_measure * m.g_measure - p * rc) > 1e-15 * std::max(1.0, p * rc))
            out.fail("g-measure squared drifts from precision*recall");
        if (tp + fn == 0) {
            if (!std::isinf(m.skew)) out.fail("skew not infinite with no positives");
            if (m.recall != 0.0) out.fail("recall 0/0 convention");
        } else if (m.skew != static_cast<double>(tn + fp) / static_cast<double>(tp + fn)) {
            out.fail("skew identity");
        }
        if (tp + fp == 0 && m.precision != 0.0) out.fail("precision 0/0 convention");
        if (p + rc == 0.0 && m.f_measure != 0.0) out.fail("f-measure 0/0 convention");
        if (!out.ok) {
            out.fail(fmt("at counts tp=%.0f fp=%.0f tn=%.0f", static_cast<double>(tp),
                         static_cast<double>(fp), static_cast<double>(tn)));
            break;
        }
    }
    return out;
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "gradient-check", criterion_1},
    {2, "noise-rate-recovery", criterion_2},
    {3, "beta-estimation", criterion_3},
    {4, "surrogate-threshold-oracle", criterion_4},
    {5, "purity-ordering", criterion_5},
    {6, "skew-ordering", criterion_6},
    {7, "strong-count-convergence", criterion_7},
    {8, "code-path-identities", criterion_8},
    {9, "error-region-accounting", criterion_9},
    {10, "metric-identities", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 10) {
            std::fprintf(stderr, "usage: %s [1..10]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0;
    for (const auto& c : kCriteria) {
        if (only && c.id != only) continue;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        if (out.ok) {
            std::printf("[PASS] %2d %s\n", c.id, c.name);
        } else {
            std::printf("[FAIL] %2d %s: %s\n", c.id, c.name, out.detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
