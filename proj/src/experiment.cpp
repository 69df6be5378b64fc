#include "weasl/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "weasl/error.hpp"
#include "weasl/noise.hpp"
#include "weasl/rng.hpp"

namespace weasl::experiment {

namespace {

constexpr std::uint64_t kSaltWeak = 1;
constexpr std::uint64_t kSaltStrong = 2;
constexpr std::uint64_t kSaltTest = 3;
constexpr std::uint64_t kSaltSubsample = 4;
constexpr std::uint64_t kSaltTestSub = 5;
constexpr std::uint64_t kSaltBeta = 6;
constexpr std::uint64_t kSaltTrain = 16;  // + method slot

struct KindInfo {
    const char* name;
    const char* x_label;
    const char* metric;  // plot/summary headline metric
};

const KindInfo& info(Kind kind) {
    static const KindInfo table[] = {
        {"purity_sweep", "f", "f_measure"},
        {"skew_sweep", "skew", "f_measure"},
        {"strong_count_sweep", "n_strong", "accuracy"},
        {"complexity_compare", "n_strong", "accuracy"},
        {"baseline_compare", "f", "f_measure"},
    };
    return table[static_cast<int>(kind)];
}

}  // namespace

Kind parse_kind(const std::string& name) {
    for (Kind k : {Kind::purity_sweep, Kind::skew_sweep, Kind::strong_count_sweep,
                   Kind::complexity_compare, Kind::baseline_compare})
        if (name == info(k).name) return k;
    throw ConfigError("unknown experiment: " + name);
}

std::string kind_name(Kind kind) { return info(kind).name; }

void ExperimentConfig::resolve() {
    using train::Method;
    if (methods.empty()) {
        switch (kind) {
            case Kind::purity_sweep:
                methods = {Method::weasl, Method::only_strong, Method::mil_balanced,
                           Method::mil_imbalanced};
                break;
            case Kind::skew_sweep:
                methods = {Method::weasl, Method::only_strong, Method::only_weak};
                break;
            case Kind::strong_count_sweep:
            case Kind::complexity_compare:
                methods = {Method::weasl, Method::only_strong};
                break;
            case Kind::baseline_compare:
                methods = {Method::weasl, Method::only_strong, Method::only_weak};
                break;
        }
    }
    if (sweep.empty()) {
        switch (kind) {
            case Kind::purity_sweep: sweep = {1.0, 0.8, 0.6, 0.4}; break;
            case Kind::skew_sweep: sweep = {2, 4, 6, 8, 10, 12}; break;
            case Kind::strong_count_sweep: sweep = {10, 30, 100, 300, 1000}; break;
            case Kind::complexity_compare: sweep = {20}; break;
            case Kind::baseline_compare: sweep = {0.6}; break;
        }
    }
    imbalanced = kind == Kind::purity_sweep || kind == Kind::skew_sweep ||
                 kind == Kind::baseline_compare;
    if (scorer.input_dim == 0) {
        scorer.kind = model::Kind::logistic;
        scorer.input_dim = 2;
    }
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw ConfigError("experiment: no methods");
    if (sweep.empty()) throw ConfigError("experiment: no sweep values");
    if (seeds.empty()) throw ConfigError("experiment: no seeds");
    if (jobs == 0) throw ConfigError("experiment: jobs must be >= 1");
    for (double x : sweep) {
        switch (kind) {
            case Kind::purity_sweep:
            case Kind::baseline_compare:
                if (!(x > 0.0 && x <= 1.0))
                    throw ConfigError("purity value out of (0,1]: " + data::format_double(x));
                break;
            case Kind::skew_sweep:
                if (!(x >= 1.0))
                    throw ConfigError("skew target below 1: " + data::format_double(x));
                break;
            case Kind::strong_count_sweep:
            case Kind::complexity_compare:
                if (!(x >= 2.0 && x == std::floor(x)))
                    throw ConfigError("strong count must be an integer >= 2: " +
                                      data::format_double(x));
                break;
        }
    }
    if (kind == Kind::baseline_compare && methods.size() > 16)
        throw ConfigError("baseline_compare: at most 16 methods");
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    out.n = values.size();
    if (out.n == 0) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(out.n - 1));
    }
    return out;
}

bool ExperimentReport::all_ok() const {
    for (const RunRow& r : rows)
        if (!r.ok) return false;
    return true;
}

namespace {

struct CellData {
    data::Dataset strong;
    data::Dataset weak;
    data::GroupTable groups;  // empty for count-style kinds until built
    data::Dataset test;
};

CellData build_cell_data(const ExperimentConfig& cfg, double x, std::uint64_t base) {
    CellData cd;
    const auto mixture = synth::GaussianMixtureSpec::purity_default();
    const DataParams& dp = cfg.data;
    const std::size_t ns =
        (cfg.kind == Kind::strong_count_sweep || cfg.kind == Kind::complexity_compare)
            ? static_cast<std::size_t>(x)
            : dp.n_strong;
    cd.strong = synth::gen_instances(mixture, ns / 2, ns - ns / 2, rng::derive(base, kSaltStrong));

    switch (cfg.kind) {
        case Kind::purity_sweep:
        case Kind::baseline_compare: {
            synth::PurityConfig pc;
            pc.f = x;
            pc.group_size = dp.group_size;
            pc.n_pos_groups = dp.pos_groups;
            pc.n_neg_groups = dp.neg_groups;
            pc.seed = rng::derive(base, kSaltWeak);
            auto weak = synth::gen_purity_dataset(pc, mixture);
            pc.seed = rng::derive(base, kSaltTest);
            auto test = synth::gen_purity_dataset(pc, mixture);
            cd.weak = std::move(weak.dataset);
            cd.groups = std::move(weak.groups);
            cd.test = std::move(test.dataset);
            break;
        }
        case Kind::skew_sweep: {
            synth::PurityConfig pc;
            pc.f = dp.base_f;
            pc.group_size = dp.group_size;
            pc.n_pos_groups = dp.pos_groups;
            pc.n_neg_groups = dp.neg_groups;
            pc.seed = rng::derive(base, kSaltWeak);
            auto weak = synth::gen_purity_dataset(pc, mixture);
            auto sub = synth::subsample_skew(weak.dataset, weak.groups, x,
                                             rng::derive(base, kSaltSubsample));
            pc.seed = rng::derive(base, kSaltTest);
            auto test = synth::gen_purity_dataset(pc, mixture);
            auto tsub = synth::subsample_skew(test.dataset, test.groups, x,
                                              rng::derive(base, kSaltTestSub));
            cd.weak = std::move(sub.dataset);
            cd.groups = std::move(sub.groups);
            cd.test = std::move(tsub.dataset);
            break;
        }
        case Kind::strong_count_sweep:
        case Kind::complexity_compare: {
            auto pool = synth::gen_instances(mixture, dp.weak_n / 2, dp.weak_n - dp.weak_n / 2,
                                             rng::derive(base, kSaltWeak));
            cd.weak = synth::inject_ccn_noise(pool, dp.ccn_alpha, dp.ccn_beta,
                                              rng::derive(base, kSaltSubsample));
            cd.groups = data::build_group_table(cd.weak);
            cd.test = synth::gen_instances(mixture, dp.test_n / 2, dp.test_n - dp.test_n / 2,
                                           rng::derive(base, kSaltTest));
            break;
        }
    }
    return cd;
}

RunRow run_one(const ExperimentConfig& cfg, const CellData& cd, double x, std::uint64_t seed,
               std::uint64_t base, train::Method method, std::size_t method_slot,
               const model::ScorerSpec& spec, double beta_hat,
               std::vector<bool>* error_mask) {
    RunRow row;
    row.x = x;
    row.method = method;
    row.model = spec.describe();
    row.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        train::TrainConfig tc = cfg.tcfg;
        tc.method = method;
        tc.seed = rng::derive(base, kSaltTrain + method_slot);
        // Only the CCN-modeling methods consume the mode/beta pair; MIL takes
        // its group metric from the method and OnlyStrong has no weak term.
        const bool ccn = method == train::Method::weasl || method == train::Method::only_weak;
        tc.objective.mode = (cfg.imbalanced && ccn) ? objective::ObjectiveConfig::Mode::imbalanced
                                                    : objective::ObjectiveConfig::Mode::balanced;
        tc.objective.beta_hat = (cfg.imbalanced && ccn) ? beta_hat : 0.0;

        train::TrainedModel m;
        switch (method) {
            case train::Method::weasl:
                m = train::train_weasl(cd.strong, cd.weak, spec, tc);
                break;
            case train::Method::only_strong:
                m = train::train_only_strong(cd.strong, spec, tc);
                break;
            case train::Method::only_weak:
                m = train::train_only_weak(cd.weak, spec, tc);
                break;
            case train::Method::mil_balanced:
                m = train::train_mil(cd.weak, cd.groups, spec, tc, train::GroupMetric::accuracy);
                break;
            case train::Method::mil_imbalanced:
                m = train::train_mil(cd.weak, cd.groups, spec, tc, train::GroupMetric::fmeasure);
                break;
        }
        row.metrics = train::evaluate(m, cd.test);
        row.threshold = m.threshold;
        row.lambda = m.lambda;
        row.beta_hat = m.beta_hat;
        row.objective = m.final_objective;
        row.ok = true;
        if (error_mask) {
            const std::vector<int> preds = train::predict(m, cd.test);
            error_mask->resize(preds.size());
            for (std::size_t i = 0; i < preds.size(); ++i)
                (*error_mask)[i] = preds[i] != cd.test.y[i];
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

struct CellOutput {
    std::vector<RunRow> rows;
    VennRow venn;
    bool venn_ok = false;
};

CellOutput run_cell(const ExperimentConfig& cfg, double x, std::size_t x_index,
                    std::uint64_t seed) {
    CellOutput out;
    const std::uint64_t base =
        rng::derive(rng::derive(seed, 0xE1), static_cast<std::uint64_t>(x_index));
    const CellData cd = build_cell_data(cfg, x, base);

    const bool wants_venn = cfg.kind == Kind::baseline_compare;
    bool needs_beta = false;
    if (cfg.imbalanced)
        for (train::Method m : cfg.methods)
            needs_beta |= m == train::Method::weasl || m == train::Method::only_weak;

    std::vector<model::ScorerSpec> specs;
    if (cfg.kind == Kind::complexity_compare) {
        model::ScorerSpec logistic;
        logistic.kind = model::Kind::logistic;
        logistic.input_dim = cfg.scorer.input_dim;
        model::ScorerSpec mlp;
        mlp.kind = model::Kind::mlp;
        mlp.hidden_sizes = {128, 64};
        mlp.dropout_rate = 0.5;
        mlp.input_dim = cfg.scorer.input_dim;
        specs = {logistic, mlp};
    } else {
        specs = {cfg.scorer};
    }

    std::vector<std::vector<bool>> error_masks;
    bool venn_complete = wants_venn;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        double beta_hat = 0.0;
        if (needs_beta) {
            if (cfg.beta_override >= 0.0) {
                beta_hat = cfg.beta_override;
            } else {
                auto ec = noise::default_estimation_config(rng::derive(base, kSaltBeta));
                beta_hat = noise::estimate_beta(cd.strong, cd.weak, specs[si], ec);
            }
        }
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            std::vector<bool> mask;
            RunRow row = run_one(cfg, cd, x, seed, base, cfg.methods[mi],
                                 si * cfg.methods.size() + mi, specs[si], beta_hat,
                                 wants_venn ? &mask : nullptr);
            if (wants_venn) {
                if (row.ok)
                    error_masks.push_back(std::move(mask));
                else
                    venn_complete = false;
            }
            out.rows.push_back(std::move(row));
        }
    }
    if (venn_complete && !error_masks.empty()) {
        out.venn.seed = seed;
        out.venn.counts = eval::venn_regions(error_masks);
        out.venn_ok = true;
    }
    return out;
}

std::string csv_safe(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return text;
}

void write_config_header(std::ofstream& os, const ExperimentConfig& cfg) {
    os << "# experiment=" << info(cfg.kind).name << "\n";
    os << "# sweep=";
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i)
        os << (i ? "," : "") << data::format_double(cfg.sweep[i]);
    os << "\n# methods=";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
        os << (i ? "," : "") << train::method_name(cfg.methods[i]);
    os << "\n# seeds=";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
    os << "\n";
    os << "# mode=" << (cfg.imbalanced ? "imbalanced" : "balanced") << "\n";
    os << "# scorer=" << cfg.scorer.describe() << "\n";
    os << "# group_size=" << cfg.data.group_size << "\n";
    os << "# pos_groups=" << cfg.data.pos_groups << "\n";
    os << "# neg_groups=" << cfg.data.neg_groups << "\n";
    os << "# n_strong=" << cfg.data.n_strong << "\n";
    os << "# base_f=" << data::format_double(cfg.data.base_f) << "\n";
    os << "# ccn_alpha=" << data::format_double(cfg.data.ccn_alpha) << "\n";
    os << "# ccn_beta=" << data::format_double(cfg.data.ccn_beta) << "\n";
    os << "# weak_n=" << cfg.data.weak_n << "\n";
    os << "# test_n=" << cfg.data.test_n << "\n";
    os << "# learning_rate=" << data::format_double(cfg.tcfg.learning_rate) << "\n";
    os << "# momentum=" << data::format_double(cfg.tcfg.momentum) << "\n";
    os << "# epochs=" << cfg.tcfg.epochs << "\n";
    os << "# batch=" << cfg.tcfg.batch << "\n";
    os << "# lambda_grid=";
    for (std::size_t i = 0; i < cfg.tcfg.lambda_grid.size(); ++i)
        os << (i ? "," : "") << data::format_double(cfg.tcfg.lambda_grid[i]);
    os << "\n";
    os << "# cv_folds=" << cfg.tcfg.cv_folds << "\n";
    os << "# s=" << data::format_double(cfg.tcfg.objective.s) << "\n";
    os << "# tau=" << data::format_double(cfg.tcfg.objective.tau) << "\n";
    os << "# beta=" << (cfg.beta_override >= 0.0 ? data::format_double(cfg.beta_override)
                                                 : std::string("estimate"))
       << "\n";
    os << "# jobs=" << cfg.jobs << "\n";
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    return os;
}

std::string series_name(const ExperimentConfig& cfg, const RunRow& r) {
    if (cfg.kind == Kind::complexity_compare)
        return r.model + ":" + train::method_name(r.method);
    return train::method_name(r.method);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    cfg.resolve();
    cfg.validate();
    cfg.tcfg.validate();

    ExperimentReport rep;
    rep.cfg = cfg;
    if (cfg.kind == Kind::baseline_compare)
        for (train::Method m : cfg.methods) rep.venn_methods.push_back(train::method_name(m));

    struct Cell {
        double x;
        std::size_t x_index;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t xi = 0; xi < cfg.sweep.size(); ++xi)
        for (std::uint64_t seed : cfg.seeds) cells.push_back({cfg.sweep[xi], xi, seed});

    std::vector<CellOutput> outputs(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            outputs[i] = run_cell(cfg, c.x, c.x_index, c.seed);
            std::lock_guard<std::mutex> lock(log_mutex);
            double secs = 0.0;
            bool ok = true;
            for (const RunRow& r : outputs[i].rows) {
                secs += r.seconds;
                ok &= r.ok;
            }
            std::printf("[%s] x=%s seed=%llu %s (%.1fs)\n", info(cfg.kind).name,
                        data::format_double(c.x).c_str(), (unsigned long long)c.seed,
                        ok ? "ok" : "FAILED", secs);
            std::fflush(stdout);
        }
    };
    const unsigned jobs = static_cast<unsigned>(std::min<std::size_t>(cfg.jobs, cells.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (CellOutput& out : outputs) {
        for (RunRow& r : out.rows) rep.rows.push_back(std::move(r));
        if (out.venn_ok) rep.venn.push_back(std::move(out.venn));
    }
    return rep;
}

void write_report(const ExperimentReport& rep) {
    const ExperimentConfig& cfg = rep.cfg;
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    {
        auto os = open_out(dir / "results.csv");
        write_config_header(os, cfg);
        os << "x,method,model,seed,status,error,accuracy,precision,recall,f_measure,"
              "g_measure,test_skew,threshold,lambda,beta_hat,objective,seconds\n";
        for (const RunRow& r : rep.rows) {
            os << data::format_double(r.x) << ',' << train::method_name(r.method) << ','
               << csv_safe(r.model) << ',' << r.seed << ',' << (r.ok ? "ok" : "error") << ','
               << csv_safe(r.error) << ',' << data::format_double(r.metrics.accuracy) << ','
               << data::format_double(r.metrics.precision) << ','
               << data::format_double(r.metrics.recall) << ','
               << data::format_double(r.metrics.f_measure) << ','
               << data::format_double(r.metrics.g_measure) << ','
               << data::format_double(r.metrics.skew) << ','
               << data::format_double(r.threshold) << ',' << data::format_double(r.lambda) << ','
               << data::format_double(r.beta_hat) << ',' << data::format_double(r.objective)
               << ',' << data::format_double(r.seconds) << "\n";
        }
    }

    // cell key: (x index within sweep, series); preserves sweep order
    struct CellStats {
        std::vector<double> accuracy, f_measure, g_measure;
    };
    std::map<std::pair<std::size_t, std::string>, CellStats> cells;
    auto x_index = [&](double x) {
        for (std::size_t i = 0; i < cfg.sweep.size(); ++i)
            if (cfg.sweep[i] == x) return i;
        return cfg.sweep.size();
    };
    for (const RunRow& r : rep.rows) {
        if (!r.ok) continue;
        CellStats& cs = cells[{x_index(r.x), series_name(cfg, r)}];
        cs.accuracy.push_back(r.metrics.accuracy);
        cs.f_measure.push_back(r.metrics.f_measure);
        cs.g_measure.push_back(r.metrics.g_measure);
    }

    {
        auto os = open_out(dir / "summary.csv");
        write_config_header(os, cfg);
        os << "x,series,n,accuracy_mean,accuracy_std,f_measure_mean,f_measure_std,"
              "g_measure_mean,g_measure_std\n";
        for (const auto& [key, cs] : cells) {
            const auto acc = mean_std(cs.accuracy);
            const auto f = mean_std(cs.f_measure);
            const auto g = mean_std(cs.g_measure);
            os << data::format_double(cfg.sweep[key.first]) << ',' << key.second << ',' << acc.n
               << ',' << data::format_double(acc.mean) << ',' << data::format_double(acc.std)
               << ',' << data::format_double(f.mean) << ',' << data::format_double(f.std) << ','
               << data::format_double(g.mean) << ',' << data::format_double(g.std) << "\n";
        }
    }

    {
        const std::string metric = info(cfg.kind).metric;
        auto os = open_out(dir / ("plot_" + kind_name(cfg.kind) + ".csv"));
        write_config_header(os, cfg);
        os << "# x_label=" << info(cfg.kind).x_label << "\n";
        os << "# metric=" << metric << "\n";
        os << "x,series,mean,std\n";
        for (const auto& [key, cs] : cells) {
            const auto ms = mean_std(metric == "accuracy" ? cs.accuracy : cs.f_measure);
            os << data::format_double(cfg.sweep[key.first]) << ',' << key.second << ','
               << data::format_double(ms.mean) << ',' << data::format_double(ms.std) << "\n";
        }
    }

    if (cfg.kind == Kind::baseline_compare) {
        auto os = open_out(dir / "venn.csv");
        write_config_header(os, cfg);
        os << "seed,region_mask,methods,count\n";
        for (const VennRow& v : rep.venn) {
            for (std::size_t mask = 0; mask < v.counts.size(); ++mask) {
                std::string names;
                for (std::size_t m = 0; m < rep.venn_methods.size(); ++m)
                    if (mask & (std::size_t{1} << m)) {
                        if (!names.empty()) names += '+';
                        names += rep.venn_methods[m];
                    }
                if (names.empty()) names = "none";
                os << v.seed << ',' << mask << ',' << names << ',' << v.counts[mask] << "\n";
            }
        }
    }
}

}  // namespace weasl::experiment
