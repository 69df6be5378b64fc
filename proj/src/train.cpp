#include "weasl/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "weasl/error.hpp"
#include "weasl/kernels.hpp"
#include "weasl/rng.hpp"

namespace weasl::train {

namespace {

constexpr std::uint64_t kSaltMasks = 0xC1;
constexpr std::uint64_t kSaltBatch = 0xC2;
constexpr std::uint64_t kSaltCvFolds = 0xC3;
constexpr std::uint64_t kSaltCvRun = 0xC4;
constexpr std::uint64_t kSaltRestart = 0xC5;  // + restart index

std::vector<double> to01(const std::vector<std::int8_t>& v, const char* what) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == -1) throw ConfigError(std::string("missing ") + what + " label");
        out[i] = static_cast<double>(v[i]);
    }
    return out;
}

// One additive objective term bound to a dataset. Grouped terms aggregate
// instance scores to group means before the soft threshold.
struct RunTerm {
    const data::Dataset* ds = nullptr;
    std::vector<double> labels;  // per instance (or ignored when grouped)
    objective::TermKind kind = objective::TermKind::accuracy;
    double weight = 1.0;
    double beta = 0.0;
    bool grouped = false;
    data::FlatGroups flat;
    bool minibatch = false;  // weak-side terms may be chunked
};

// A term as seen by one optimizer step (full set, or one chunk of it).
struct StepTerm {
    const data::Dataset* ds = nullptr;
    std::span<const double> labels;
    objective::TermKind kind = objective::TermKind::accuracy;
    double weight = 1.0;
    double beta = 0.0;
    bool grouped = false;
    const data::FlatGroups* flat = nullptr;
    std::size_t term_index = 0;
};

std::uint64_t mask_key(std::uint64_t mask_root, std::size_t epoch, std::size_t step,
                       std::size_t term_index) {
    return rng::derive(rng::derive(rng::derive(mask_root, epoch), step), term_index);
}

std::string gamma_descriptor(const std::vector<double>& grid) {
    return data::format_double(grid.front()) + ".." + data::format_double(grid.back()) + "x" +
           std::to_string(grid.size());
}

// Evaluates the combined objective over the step's terms and, when `grads`
// is true, accumulates the parameter gradient into grad_total.
objective::CombineResult do_step(const model::ScorerSpec& spec, const model::ScorerParams& params,
                                 const TrainConfig& cfg, std::span<const StepTerm> terms,
                                 model::Mode mode, std::uint64_t mask_root, std::size_t epoch,
                                 std::size_t step, bool grads, std::vector<double>& grad_total,
                                 std::vector<double>& grad_term) {
    const std::size_t t_count = terms.size();
    std::vector<std::vector<double>> scores(t_count);       // instance scores
    std::vector<std::vector<double>> unit_scores(t_count);  // group means when grouped
    std::vector<std::vector<double>> unit_grads(t_count);
    std::vector<objective::TermData> term_data(t_count);
    std::vector<std::span<double>> grad_spans(t_count);

    for (std::size_t t = 0; t < t_count; ++t) {
        const StepTerm& term = terms[t];
        scores[t].resize(term.ds->size());
        model::forward_batch(spec, params, *term.ds, mode,
                             mask_key(mask_root, epoch, step, term.term_index), scores[t]);
        objective::TermData& td = term_data[t];
        td.kind = term.kind;
        td.weight = term.weight;
        td.beta = term.beta;
        if (term.grouped) {
            unit_scores[t].resize(term.flat->size());
            kernels::group_means(scores[t], term.flat->member_index, term.flat->offsets,
                                 unit_scores[t]);
            td.scores = unit_scores[t];
            td.labels = term.flat->labels;
        } else {
            td.scores = scores[t];
            td.labels = term.labels;
        }
        if (grads) {
            unit_grads[t].resize(td.scores.size());
            grad_spans[t] = unit_grads[t];
        }
    }

    objective::CombineResult result;
    if (grads) {
        result = objective::combine_with_grad(term_data, cfg.objective.gamma_grid,
                                              cfg.objective.s, cfg.objective.tau, grad_spans);
        std::vector<double> upstream;
        for (std::size_t t = 0; t < t_count; ++t) {
            const StepTerm& term = terms[t];
            std::span<const double> up = unit_grads[t];
            if (term.grouped) {
                upstream.resize(term.ds->size());
                kernels::group_scatter(unit_grads[t], term.flat->member_index,
                                       term.flat->offsets, upstream);
                up = upstream;
            }
            model::backward_batch(spec, params, *term.ds, mode,
                                  mask_key(mask_root, epoch, step, term.term_index), up,
                                  grad_term);
            for (std::size_t d = 0; d < grad_total.size(); ++d) grad_total[d] += grad_term[d];
        }
    } else {
        result = objective::combine(term_data, cfg.objective.gamma_grid, cfg.objective.s,
                                    cfg.objective.tau);
    }
    return result;
}

[[noreturn]] void abort_non_finite(std::size_t epoch, std::size_t step,
                                   const objective::CombineResult& result, double grad_norm) {
    std::ostringstream os;
    os << "non-finite objective or gradient at epoch " << epoch << " step " << step
       << ": value=" << result.value << ", grad_norm=" << grad_norm << ", per_gamma=[";
    const std::size_t k = result.per_gamma.size();
    for (std::size_t j = 0; j < std::min<std::size_t>(k, 5); ++j) {
        if (j) os << ", ";
        os << result.per_gamma[j];
    }
    if (k > 5) os << ", ..";
    os << "]";
    throw NumericError(os.str());
}

// Near-equal chunking of `order` into ceil(n/batch) pieces.
std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(std::size_t n, std::size_t batch) {
    const std::size_t chunks = (n + batch - 1) / batch;
    std::vector<std::pair<std::size_t, std::size_t>> ranges(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        ranges[c] = {n * c / chunks, n * (c + 1) / chunks};
    }
    return ranges;
}

TrainedModel run_single(const model::ScorerSpec& spec, const TrainConfig& cfg,
                        const std::vector<RunTerm>& terms, Method method, double lambda_used,
                        double beta_used) {
    const std::size_t p_count = spec.param_count();
    model::ScorerParams params = model::init_params(spec, cfg.seed);
    std::vector<double> velocity(p_count, 0.0);
    std::vector<double> grad_total(p_count, 0.0);
    std::vector<double> grad_term(p_count, 0.0);
    const std::uint64_t mask_root = rng::derive(cfg.seed, kSaltMasks);
    const std::uint64_t batch_root = rng::derive(cfg.seed, kSaltBatch);

    TrainedModel out;
    out.spec = spec;
    out.method = method;
    out.lambda = lambda_used;
    out.beta_hat = beta_used;
    out.seed = cfg.seed;

    std::vector<StepTerm> full_view(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const RunTerm& term = terms[t];
        full_view[t] = {term.ds,  term.labels, term.kind,  term.weight,
                        term.beta, term.grouped, &term.flat, t};
    }

    std::ptrdiff_t mb_index = -1;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (terms[t].minibatch) mb_index = static_cast<std::ptrdiff_t>(t);
    }
    const bool minibatched = cfg.batch > 0 && mb_index >= 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::size_t steps = 1;
        // Chunk assignments for the minibatched term, this epoch.
        std::vector<std::size_t> unit_order;
        std::vector<std::pair<std::size_t, std::size_t>> ranges;
        if (minibatched) {
            const RunTerm& mb = terms[static_cast<std::size_t>(mb_index)];
            const std::size_t units = mb.grouped ? mb.flat.size() : mb.ds->size();
            if (units > cfg.batch) {
                unit_order.resize(units);
                std::iota(unit_order.begin(), unit_order.end(), std::size_t{0});
                rng::Stream stream(rng::derive(batch_root, epoch));
                rng::shuffle(std::span<std::size_t>(unit_order), stream);
                ranges = chunk_ranges(units, cfg.batch);
                steps = ranges.size();
            }
        }

        for (std::size_t step = 0; step < steps; ++step) {
            std::fill(grad_total.begin(), grad_total.end(), 0.0);
            objective::CombineResult result;
            if (steps == 1) {
                result = do_step(spec, params, cfg, full_view, model::Mode::train, mask_root,
                                 epoch, step, true, grad_total, grad_term);
            } else {
                // Materialize the chunk of the minibatched term.
                const RunTerm& mb = terms[static_cast<std::size_t>(mb_index)];
                const auto [begin, end] = ranges[step];
                data::Dataset chunk_ds;
                std::vector<double> chunk_labels;
                data::FlatGroups chunk_flat;
                std::vector<std::size_t> instance_ids;
                if (mb.grouped) {
                    chunk_flat.offsets.push_back(0);
                    for (std::size_t c = begin; c < end; ++c) {
                        const std::size_t b = unit_order[c];
                        for (std::size_t m = mb.flat.offsets[b]; m < mb.flat.offsets[b + 1]; ++m) {
                            chunk_flat.member_index.push_back(instance_ids.size());
                            instance_ids.push_back(mb.flat.member_index[m]);
                        }
                        chunk_flat.offsets.push_back(chunk_flat.member_index.size());
                        chunk_flat.labels.push_back(mb.flat.labels[b]);
                    }
                } else {
                    instance_ids.assign(unit_order.begin() + static_cast<std::ptrdiff_t>(begin),
                                        unit_order.begin() + static_cast<std::ptrdiff_t>(end));
                    chunk_labels.reserve(instance_ids.size());
                    for (std::size_t i : instance_ids) chunk_labels.push_back(mb.labels[i]);
                }
                chunk_ds = data::subset(*mb.ds, instance_ids);

                std::vector<StepTerm> view = full_view;
                StepTerm& mb_view = view[static_cast<std::size_t>(mb_index)];
                mb_view.ds = &chunk_ds;
                mb_view.labels = chunk_labels;
                mb_view.flat = &chunk_flat;
                result = do_step(spec, params, cfg, view, model::Mode::train, mask_root, epoch,
                                 step, true, grad_total, grad_term);
            }

            double norm_sq = 0.0;
            for (double v : grad_total) norm_sq += v * v;
            if (!std::isfinite(result.value) || !std::isfinite(norm_sq)) {
                abort_non_finite(epoch, step, result, std::sqrt(norm_sq));
            }
            if (cfg.record_trace) out.trace.objective_values.push_back(result.value);

            for (std::size_t d = 0; d < p_count; ++d) {
                velocity[d] = cfg.momentum * velocity[d] + grad_total[d];
                params.w[d] += cfg.learning_rate * velocity[d];
            }
        }
    }

    // Final pass without dropout fixes the threshold and reported objective.
    const objective::CombineResult final_result =
        do_step(spec, params, cfg, full_view, model::Mode::eval, mask_root, cfg.epochs, 0, false,
                grad_total, grad_term);
    out.params = std::move(params);
    out.threshold = cfg.objective.gamma_grid[final_result.argmax];
    out.final_objective = final_result.value;

    out.provenance.emplace_back("method", method_name(method));
    out.provenance.emplace_back("scorer", spec.describe());
    out.provenance.emplace_back("seed", std::to_string(cfg.seed));
    out.provenance.emplace_back("learning_rate", data::format_double(cfg.learning_rate));
    out.provenance.emplace_back("momentum", data::format_double(cfg.momentum));
    out.provenance.emplace_back("epochs", std::to_string(cfg.epochs));
    out.provenance.emplace_back("batch", std::to_string(cfg.batch));
    out.provenance.emplace_back("lambda", data::format_double(lambda_used));
    out.provenance.emplace_back("mode", cfg.objective.mode == objective::ObjectiveConfig::Mode::balanced
                                            ? "balanced"
                                            : "imbalanced");
    out.provenance.emplace_back("beta_hat", data::format_double(beta_used));
    out.provenance.emplace_back("s", data::format_double(cfg.objective.s));
    out.provenance.emplace_back("tau", data::format_double(cfg.objective.tau));
    out.provenance.emplace_back("gamma_grid", gamma_descriptor(cfg.objective.gamma_grid));
    out.provenance.emplace_back("threshold", data::format_double(out.threshold));
    out.provenance.emplace_back("final_objective", data::format_double(out.final_objective));
    return out;
}

// Ascent on this objective can stall when the initial scorer ranks the
// classes backwards (the gamma-softmax then rewards sharpening a useless
// threshold). Independent restarts keep the best final objective; with
// restarts=1 the given seed is used as-is.
TrainedModel run_training(const model::ScorerSpec& spec, const TrainConfig& cfg,
                          std::vector<RunTerm> terms, Method method, double lambda_used,
                          double beta_used) {
    spec.validate();
    cfg.validate();
    for (const RunTerm& term : terms) {
        if (term.ds->empty()) throw ConfigError("training set is empty");
        if (term.grouped && term.flat.size() == 0) throw ConfigError("no groups to train on");
    }

    TrainedModel best = run_single(spec, cfg, terms, method, lambda_used, beta_used);
    std::size_t best_restart = 0;
    for (std::size_t r = 1; r < cfg.restarts; ++r) {
        TrainConfig rc = cfg;
        rc.seed = rng::derive(cfg.seed, kSaltRestart + r);
        TrainedModel cand = run_single(spec, rc, terms, method, lambda_used, beta_used);
        if (cand.final_objective > best.final_objective) {
            best = std::move(cand);
            best_restart = r;
        }
    }
    best.seed = cfg.seed;
    best.provenance.emplace_back("restarts", std::to_string(cfg.restarts));
    best.provenance.emplace_back("restart_chosen", std::to_string(best_restart));
    return best;
}

RunTerm strong_term(const data::Dataset& strong) {
    if (!strong.has_all_y()) throw ConfigError("strong set needs y on every instance");
    RunTerm term;
    term.ds = &strong;
    term.labels = to01(strong.y, "y");
    term.kind = objective::TermKind::accuracy;
    term.weight = 1.0;
    return term;
}

RunTerm weak_term(const data::Dataset& weak, const objective::ObjectiveConfig& obj,
                  double weight) {
    if (!weak.has_all_g()) throw ConfigError("weak set needs g on every instance");
    RunTerm term;
    term.ds = &weak;
    term.labels = to01(weak.g, "g");
    if (obj.mode == objective::ObjectiveConfig::Mode::imbalanced) {
        term.kind = objective::TermKind::gmeasure;
        term.beta = obj.beta_hat;
    } else {
        term.kind = objective::TermKind::accuracy;
    }
    term.weight = weight;
    term.minibatch = true;
    return term;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::weasl: return "weasl";
        case Method::only_strong: return "only_strong";
        case Method::only_weak: return "only_weak";
        case Method::mil_balanced: return "mil_balanced";
        case Method::mil_imbalanced: return "mil_imbalanced";
    }
    throw ConfigError("unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "weasl") return Method::weasl;
    if (name == "only_strong") return Method::only_strong;
    if (name == "only_weak") return Method::only_weak;
    if (name == "mil_balanced") return Method::mil_balanced;
    if (name == "mil_imbalanced") return Method::mil_imbalanced;
    throw ConfigError("unknown method '" + name + "'");
}

void TrainConfig::validate() const {
    objective.validate();
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0,1)");
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (restarts == 0) throw ConfigError("restarts must be at least 1");
}

TrainedModel train_weasl(const data::Dataset& strong, const data::Dataset& weak,
                         const model::ScorerSpec& spec, const TrainConfig& cfg) {
    if (cfg.lambda_grid.empty()) throw ConfigError("weasl needs a non-empty lambda grid");
    double lambda = cfg.lambda_grid.front();
    if (cfg.lambda_grid.size() > 1) lambda = select_lambda(strong, weak, spec, cfg);

    TrainConfig used = cfg;
    used.objective.lambda = lambda;
    std::vector<RunTerm> terms;
    terms.push_back(strong_term(strong));
    terms.push_back(weak_term(weak, used.objective, lambda));
    return run_training(spec, used, std::move(terms), Method::weasl, lambda,
                        used.objective.mode == objective::ObjectiveConfig::Mode::imbalanced
                            ? used.objective.beta_hat
                            : 0.0);
}

TrainedModel train_only_strong(const data::Dataset& strong, const model::ScorerSpec& spec,
                               const TrainConfig& cfg) {
    std::vector<RunTerm> terms;
    terms.push_back(strong_term(strong));
    return run_training(spec, cfg, std::move(terms), Method::only_strong, 0.0, 0.0);
}

TrainedModel train_only_weak(const data::Dataset& weak, const model::ScorerSpec& spec,
                             const TrainConfig& cfg) {
    std::vector<RunTerm> terms;
    terms.push_back(weak_term(weak, cfg.objective, 1.0));
    return run_training(spec, cfg, std::move(terms), Method::only_weak, 1.0,
                        cfg.objective.mode == objective::ObjectiveConfig::Mode::imbalanced
                            ? cfg.objective.beta_hat
                            : 0.0);
}

TrainedModel train_mil(const data::Dataset& weak, const data::GroupTable& gt,
                       const model::ScorerSpec& spec, const TrainConfig& cfg,
                       GroupMetric metric) {
    if (gt.groups.empty()) throw ConfigError("mil training needs at least one group");
    for (const data::Group& grp : gt.groups) {
        if (grp.members.empty()) throw ConfigError("mil training found an empty group");
        for (std::size_t m : grp.members) {
            if (m >= weak.size()) throw ConfigError("group table does not match the dataset");
        }
    }
    RunTerm term;
    term.ds = &weak;
    term.kind = metric == GroupMetric::accuracy ? objective::TermKind::accuracy
                                                : objective::TermKind::soft_f;
    term.weight = 1.0;
    term.grouped = true;
    term.flat = data::flatten(gt);
    term.minibatch = true;
    std::vector<RunTerm> terms;
    terms.push_back(std::move(term));
    return run_training(spec, cfg, std::move(terms),
                        metric == GroupMetric::accuracy ? Method::mil_balanced
                                                        : Method::mil_imbalanced,
                        0.0, 0.0);
}

double select_lambda(const data::Dataset& strong, const data::Dataset& weak,
                     const model::ScorerSpec& spec, const TrainConfig& cfg) {
    if (cfg.lambda_grid.empty()) throw ConfigError("lambda grid is empty");
    if (strong.size() < 2) throw ConfigError("lambda selection needs at least 2 strong instances");
    if (!strong.has_all_y()) throw ConfigError("strong set needs y on every instance");

    const std::size_t folds = std::min<std::size_t>(std::max<std::size_t>(cfg.cv_folds, 2),
                                                    strong.size());
    std::vector<std::size_t> order(strong.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::Stream stream(rng::derive(cfg.seed, kSaltCvFolds));
    rng::shuffle(std::span<std::size_t>(order), stream);

    std::vector<double> grid(cfg.lambda_grid);
    std::stable_sort(grid.begin(), grid.end());

    const bool imbalanced = cfg.objective.mode == objective::ObjectiveConfig::Mode::imbalanced;
    double best_lambda = grid.front();
    double best_score = -1.0;
    for (double lambda : grid) {
        double mean = 0.0;
        for (std::size_t fold = 0; fold < folds; ++fold) {
            const std::size_t begin = strong.size() * fold / folds;
            const std::size_t end = strong.size() * (fold + 1) / folds;
            std::vector<std::size_t> hold(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<std::size_t> rest;
            rest.reserve(strong.size() - hold.size());
            rest.insert(rest.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(begin));
            rest.insert(rest.end(), order.begin() + static_cast<std::ptrdiff_t>(end), order.end());
            if (hold.empty() || rest.empty()) continue;

            const data::Dataset fold_train = data::subset(strong, rest);
            const data::Dataset fold_test = data::subset(strong, hold);

            TrainConfig run = cfg;
            run.lambda_grid = {lambda};
            run.objective.lambda = lambda;
            run.seed = rng::derive(rng::derive(cfg.seed, kSaltCvRun), fold);
            run.record_trace = false;

            std::vector<RunTerm> terms;
            terms.push_back(strong_term(fold_train));
            terms.push_back(weak_term(weak, run.objective, lambda));
            const TrainedModel m =
                run_training(spec, run, std::move(terms), Method::weasl, lambda,
                             imbalanced ? run.objective.beta_hat : 0.0);
            const eval::MetricsReport report = evaluate(m, fold_test);
            mean += imbalanced ? report.f_measure : report.accuracy;
        }
        mean /= static_cast<double>(folds);
        if (mean > best_score) {
            best_score = mean;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

eval::MetricsReport evaluate(const TrainedModel& m, const data::Dataset& test) {
    return eval::evaluate(m.spec, m.params, m.threshold, test);
}

std::vector<int> predict(const TrainedModel& m, const data::Dataset& test) {
    return eval::predict(m.spec, m.params, m.threshold, test);
}

std::vector<std::size_t> error_venn(const std::vector<const TrainedModel*>& models,
                                    const data::Dataset& test) {
    if (!test.has_all_y()) throw ConfigError("venn accounting needs true labels");
    std::vector<std::vector<bool>> errors;
    errors.reserve(models.size());
    for (const TrainedModel* m : models) {
        const std::vector<int> pred = predict(*m, test);
        std::vector<bool> err(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            err[i] = pred[i] != static_cast<int>(test.y[i]);
        }
        errors.push_back(std::move(err));
    }
    return eval::venn_regions(errors);
}

void save_model(const TrainedModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "format=weasl-model-v1\n";
    out << "kind=" << (m.spec.kind == model::Kind::logistic ? "logistic" : "mlp") << '\n';
    if (m.spec.kind == model::Kind::mlp) {
        out << "hidden=";
        for (std::size_t i = 0; i < m.spec.hidden_sizes.size(); ++i) {
            if (i) out << ',';
            out << m.spec.hidden_sizes[i];
        }
        out << '\n';
    }
    out << "dropout=" << data::format_double(m.spec.dropout_rate) << '\n';
    out << "input_dim=" << m.spec.input_dim << '\n';
    out << "threshold=" << data::format_double(m.threshold) << '\n';
    out << "method=" << method_name(m.method) << '\n';
    out << "lambda=" << data::format_double(m.lambda) << '\n';
    out << "beta_hat=" << data::format_double(m.beta_hat) << '\n';
    out << "seed=" << m.seed << '\n';
    out << "final_objective=" << data::format_double(m.final_objective) << '\n';
    for (const auto& [key, value] : m.provenance) out << "prov." << key << '=' << value << '\n';
    out << "params=" << m.params.w.size() << '\n';
    for (double v : m.params.w) out << data::format_double(v) << '\n';
    if (!out) throw Error("failed while writing '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    TrainedModel m;
    std::string line;
    std::size_t n_params = 0;
    bool saw_params = false;
    std::string kind_text;
    std::string hidden_text;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("'" + path + "': expected key=value header");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "format") {
            if (value != "weasl-model-v1") throw ParseError("'" + path + "': unknown format");
        } else if (key == "kind") {
            kind_text = value;
        } else if (key == "hidden") {
            hidden_text = value;
        } else if (key == "dropout") {
            m.spec.dropout_rate = std::stod(value);
        } else if (key == "input_dim") {
            m.spec.input_dim = std::stoul(value);
        } else if (key == "threshold") {
            m.threshold = std::stod(value);
        } else if (key == "method") {
            m.method = parse_method(value);
        } else if (key == "lambda") {
            m.lambda = std::stod(value);
        } else if (key == "beta_hat") {
            m.beta_hat = std::stod(value);
        } else if (key == "seed") {
            m.seed = std::stoull(value);
        } else if (key == "final_objective") {
            m.final_objective = std::stod(value);
        } else if (key.rfind("prov.", 0) == 0) {
            m.provenance.emplace_back(key.substr(5), value);
        } else if (key == "params") {
            n_params = std::stoul(value);
            saw_params = true;
            break;
        } else {
            throw ParseError("'" + path + "': unknown header key '" + key + "'");
        }
    }
    if (!saw_params) throw ParseError("'" + path + "': missing params section");
    if (kind_text == "logistic") {
        m.spec.kind = model::Kind::logistic;
    } else if (kind_text == "mlp") {
        m.spec.kind = model::Kind::mlp;
        std::istringstream hs(hidden_text);
        std::string piece;
        while (std::getline(hs, piece, ',')) m.spec.hidden_sizes.push_back(std::stoul(piece));
    } else {
        throw ParseError("'" + path + "': bad scorer kind '" + kind_text + "'");
    }
    m.spec.validate();
    if (n_params != m.spec.param_count()) {
        throw ParseError("'" + path + "': parameter count does not match the layout");
    }
    m.params.w.reserve(n_params);
    for (std::size_t i = 0; i < n_params; ++i) {
        if (!std::getline(in, line)) throw ParseError("'" + path + "': truncated parameter list");
        m.params.w.push_back(std::stod(line));
    }
    return m;
}

}  // namespace weasl::train
