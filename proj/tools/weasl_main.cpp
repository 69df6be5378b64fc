// weasl: dataset generation, training, evaluation, noise diagnostics, and
// experiment sweeps for instance classification from group-level weak labels.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weasl/dataset.hpp"
#include "weasl/error.hpp"
#include "weasl/eval.hpp"
#include "weasl/experiment.hpp"
#include "weasl/model.hpp"
#include "weasl/noise.hpp"
#include "weasl/parallel.hpp"
#include "weasl/rng.hpp"
#include "weasl/synth.hpp"
#include "weasl/train.hpp"

namespace {

using namespace weasl;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

void echo_config(const data::KvPairs& kv) {
    for (const auto& [key, value] : kv) std::printf("# %s=%s\n", key.c_str(), value.c_str());
    std::fflush(stdout);
}

std::vector<double> parse_doubles(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const std::string& s : items) out.push_back(std::stod(s));
    return out;
}

// Shared training knobs; every training-flavored subcommand mounts these.
struct TrainFlags {
    std::string scorer = "logistic";
    double dropout = 0.0;
    double lr = 0.1;
    double momentum = 0.9;
    std::size_t epochs = 200;
    std::size_t batch = 0;
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid = {1.0};
    std::size_t cv_folds = 3;
    std::size_t restarts = 1;
    std::string mode = "balanced";
    std::string beta = "0";  // numeric value, or "auto" to estimate
    double s = 100.0;
    double tau = 0.01;
    std::size_t gamma_points = 99;
    double quantile = 0.05;

    void mount(CLI::App* app, bool with_lambda) {
        app->add_option("--scorer", scorer, "logistic | mlp | mlp:h1,h2,...");
        app->add_option("--dropout", dropout, "dropout rate for mlp hidden layers");
        app->add_option("--lr", lr, "learning rate")->check(CLI::PositiveNumber);
        app->add_option("--momentum", momentum, "momentum in [0,1)");
        app->add_option("--epochs", epochs, "full passes over the data");
        app->add_option("--batch", batch, "weak-term minibatch size (0 = full batch)");
        app->add_option("--seed", seed, "PRNG seed");
        app->add_option("--restarts", restarts, "independent inits, best objective kept");
        if (with_lambda) {
            app->add_option("--lambda", lambda_grid,
                            "weak-term weight(s); several values trigger cross-validation")
                ->delimiter(',');
            app->add_option("--cv-folds", cv_folds, "folds for lambda selection");
        }
        app->add_option("--mode", mode, "balanced | imbalanced")
            ->check(CLI::IsMember({"balanced", "imbalanced"}));
        app->add_option("--beta", beta, "noise rate Pr(g=1|y=0): number or 'auto'");
        app->add_option("--s", s, "soft-threshold sharpness");
        app->add_option("--tau", tau, "gamma softmax temperature");
        app->add_option("--gamma-points", gamma_points, "gamma grid size, points i/(n+1)");
        app->add_option("--quantile", quantile, "estimate-beta quantile of lowest scores");
    }

    train::TrainConfig to_config() const {
        train::TrainConfig cfg;
        cfg.learning_rate = lr;
        cfg.momentum = momentum;
        cfg.epochs = epochs;
        cfg.batch = batch;
        cfg.seed = seed;
        cfg.lambda_grid = lambda_grid;
        cfg.cv_folds = cv_folds;
        cfg.restarts = restarts;
        cfg.objective.s = s;
        cfg.objective.tau = tau;
        cfg.objective.lambda = lambda_grid.empty() ? 1.0 : lambda_grid.front();
        cfg.objective.mode = mode == "imbalanced" ? objective::ObjectiveConfig::Mode::imbalanced
                                                  : objective::ObjectiveConfig::Mode::balanced;
        if (gamma_points != 99) {
            cfg.objective.gamma_grid.clear();
            for (std::size_t i = 0; i < gamma_points; ++i)
                cfg.objective.gamma_grid.push_back(static_cast<double>(i + 1) /
                                                   static_cast<double>(gamma_points + 1));
        }
        return cfg;
    }

    data::KvPairs resolved(bool with_lambda) const {
        data::KvPairs kv;
        kv.emplace_back("scorer", scorer);
        kv.emplace_back("dropout", data::format_double(dropout));
        kv.emplace_back("lr", data::format_double(lr));
        kv.emplace_back("momentum", data::format_double(momentum));
        kv.emplace_back("epochs", std::to_string(epochs));
        kv.emplace_back("batch", std::to_string(batch));
        kv.emplace_back("seed", std::to_string(seed));
        kv.emplace_back("restarts", std::to_string(restarts));
        if (with_lambda) {
            std::string grid;
            for (std::size_t i = 0; i < lambda_grid.size(); ++i)
                grid += (i ? "," : "") + data::format_double(lambda_grid[i]);
            kv.emplace_back("lambda", grid);
            kv.emplace_back("cv_folds", std::to_string(cv_folds));
        }
        kv.emplace_back("mode", mode);
        kv.emplace_back("beta", beta);
        kv.emplace_back("s", data::format_double(s));
        kv.emplace_back("tau", data::format_double(tau));
        kv.emplace_back("gamma_points", std::to_string(gamma_points));
        return kv;
    }
};

struct GenArgs {
    std::string generator = "purity";
    double f = 1.0;
    std::size_t groups = 50;
    std::size_t pos_groups = 0;  // 0: use --groups
    std::size_t neg_groups = 0;
    std::size_t group_size = 20;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    double ccn_alpha = -1.0;
    double ccn_beta = -1.0;
    std::uint64_t seed = 0;
    std::string out = "data.csv";
};

int cmd_gen(const GenArgs& a) {
    data::KvPairs meta;
    data::Dataset ds;
    if (a.generator == "purity") {
        synth::PurityConfig pc;
        pc.f = a.f;
        pc.group_size = a.group_size;
        pc.n_pos_groups = a.pos_groups ? a.pos_groups : a.groups;
        pc.n_neg_groups = a.neg_groups ? a.neg_groups : a.groups;
        pc.seed = a.seed;
        const auto mixture = synth::GaussianMixtureSpec::purity_default();
        auto gd = synth::gen_purity_dataset(pc, mixture);
        ds = std::move(gd.dataset);
        meta = synth::purity_metadata(pc, mixture);
    } else if (a.generator == "instances") {
        if (a.n_pos + a.n_neg == 0)
            throw ConfigError("gen instances: need --pos and/or --neg counts");
        const auto mixture = synth::GaussianMixtureSpec::purity_default();
        ds = synth::gen_instances(mixture, a.n_pos, a.n_neg, a.seed);
        meta.emplace_back("generator", "instances");
        meta.emplace_back("n_pos", std::to_string(a.n_pos));
        meta.emplace_back("n_neg", std::to_string(a.n_neg));
        meta.emplace_back("seed", std::to_string(a.seed));
        if (a.ccn_alpha >= 0.0 || a.ccn_beta >= 0.0) {
            const double alpha = a.ccn_alpha < 0.0 ? 0.0 : a.ccn_alpha;
            const double beta = a.ccn_beta < 0.0 ? 0.0 : a.ccn_beta;
            ds = synth::inject_ccn_noise(ds, alpha, beta, rng::derive(a.seed, 0xCC));
            meta.emplace_back("ccn_alpha", data::format_double(alpha));
            meta.emplace_back("ccn_beta", data::format_double(beta));
        }
    } else {
        throw ConfigError("unknown generator '" + a.generator + "' (purity | instances)");
    }
    echo_config(meta);
    data::save_csv(ds, a.out);
    data::save_kv(meta, a.out + ".meta");
    std::printf("wrote %s (%zu rows) and %s.meta\n", a.out.c_str(), ds.size(), a.out.c_str());
    return kExitOk;
}

// Resolves --beta: a number, or "auto" = estimate from the loaded sets.
double resolve_beta(const TrainFlags& tf, const data::Dataset& strong, const data::Dataset& weak,
                    std::size_t input_dim) {
    if (tf.beta != "auto") return std::stod(tf.beta);
    if (strong.empty() || weak.empty())
        throw ConfigError("--beta auto needs both --strong and --weak data");
    const model::ScorerSpec spec = model::parse_scorer(tf.scorer, input_dim, tf.dropout);
    auto ec = noise::default_estimation_config(rng::derive(tf.seed, 0xBE));
    const double est = noise::estimate_beta(strong, weak, spec, ec, tf.quantile);
    std::printf("# beta_estimate=%s\n", data::format_double(est).c_str());
    return est;
}

struct TrainArgs {
    std::string method = "weasl";
    std::string strong_path;
    std::string weak_path;
    std::string out = "model.weasl";
    TrainFlags tf;
};

int cmd_train(const TrainArgs& a) {
    const train::Method method = train::parse_method(a.method);
    data::Dataset strong, weak;
    std::optional<data::GroupTable> weak_groups;
    if (!a.strong_path.empty()) strong = data::load_csv(a.strong_path).dataset;
    if (!a.weak_path.empty()) {
        auto loaded = data::load_csv(a.weak_path);
        weak = std::move(loaded.dataset);
        weak_groups = std::move(loaded.groups);
    }
    const bool needs_strong =
        method == train::Method::weasl || method == train::Method::only_strong;
    const bool needs_weak = method != train::Method::only_strong;
    if (needs_strong && strong.empty())
        throw ConfigError("method " + a.method + " needs --strong data");
    if (needs_weak && weak.empty()) throw ConfigError("method " + a.method + " needs --weak data");

    const std::size_t dim = needs_strong ? strong.dim : weak.dim;
    if (!strong.empty() && !weak.empty() && strong.dim != weak.dim)
        throw ConsistencyError("strong and weak feature dimensions differ");

    train::TrainConfig cfg = a.tf.to_config();
    cfg.method = method;
    if (cfg.objective.mode == objective::ObjectiveConfig::Mode::imbalanced &&
        (method == train::Method::weasl || method == train::Method::only_weak))
        cfg.objective.beta_hat = resolve_beta(a.tf, strong, weak, dim);

    data::KvPairs resolved = a.tf.resolved(true);
    resolved.emplace_back("method", a.method);
    resolved.emplace_back("strong", a.strong_path);
    resolved.emplace_back("weak", a.weak_path);
    resolved.emplace_back("out", a.out);
    echo_config(resolved);

    const model::ScorerSpec spec = model::parse_scorer(a.tf.scorer, dim, a.tf.dropout);
    train::TrainedModel m;
    switch (method) {
        case train::Method::weasl: m = train::train_weasl(strong, weak, spec, cfg); break;
        case train::Method::only_strong: m = train::train_only_strong(strong, spec, cfg); break;
        case train::Method::only_weak: m = train::train_only_weak(weak, spec, cfg); break;
        case train::Method::mil_balanced:
        case train::Method::mil_imbalanced: {
            if (!weak_groups) throw ConfigError("MIL needs group ids in the weak data");
            const auto metric = method == train::Method::mil_balanced
                                    ? train::GroupMetric::accuracy
                                    : train::GroupMetric::fmeasure;
            m = train::train_mil(weak, *weak_groups, spec, cfg, metric);
            break;
        }
    }
    train::save_model(m, a.out);
    std::printf("model %s: threshold=%s objective=%s lambda=%s\n", a.out.c_str(),
                data::format_double(m.threshold).c_str(),
                data::format_double(m.final_objective).c_str(),
                data::format_double(m.lambda).c_str());

    // Training-set metrics when true labels are on hand, for eval round trips.
    const data::Dataset& scored = needs_strong ? strong : weak;
    if (scored.has_all_y()) {
        const auto rep = train::evaluate(m, scored);
        std::printf("train-set metrics: accuracy=%s f_measure=%s g_measure=%s\n",
                    data::format_double(rep.accuracy).c_str(),
                    data::format_double(rep.f_measure).c_str(),
                    data::format_double(rep.g_measure).c_str());
    }
    return kExitOk;
}

struct EvalArgs {
    std::string model_path;
    std::string data_path;
    std::string out;
};

int cmd_eval(const EvalArgs& a) {
    const train::TrainedModel m = train::load_model(a.model_path);
    const data::Dataset test = data::load_csv(a.data_path).dataset;
    const eval::MetricsReport rep = train::evaluate(m, test);
    data::KvPairs kv;
    kv.emplace_back("model", a.model_path);
    kv.emplace_back("data", a.data_path);
    kv.emplace_back("threshold", data::format_double(m.threshold));
    echo_config(kv);

    std::string csv = "tp,fp,tn,fn,accuracy,precision,recall,f_measure,g_measure,skew\n";
    csv += std::to_string(rep.tp) + ',' + std::to_string(rep.fp) + ',' + std::to_string(rep.tn) +
           ',' + std::to_string(rep.fn) + ',' + data::format_double(rep.accuracy) + ',' +
           data::format_double(rep.precision) + ',' + data::format_double(rep.recall) + ',' +
           data::format_double(rep.f_measure) + ',' + data::format_double(rep.g_measure) + ',' +
           data::format_double(rep.skew) + '\n';
    std::fputs(csv.c_str(), stdout);
    if (!a.out.empty()) {
        std::ofstream os(a.out);
        if (!os) throw Error("cannot write " + a.out);
        os << csv;
    }
    return kExitOk;
}

struct EstimateArgs {
    std::string strong_path;
    std::string weak_path;
    TrainFlags tf;
};

int cmd_estimate_beta(const EstimateArgs& a) {
    const data::Dataset strong = data::load_csv(a.strong_path).dataset;
    const data::Dataset weak = data::load_csv(a.weak_path).dataset;
    if (strong.dim != weak.dim) throw ConsistencyError("strong and weak dimensions differ");
    const model::ScorerSpec spec = model::parse_scorer(a.tf.scorer, strong.dim, a.tf.dropout);
    auto ec = noise::default_estimation_config(rng::derive(a.tf.seed, 0xBE));
    const double est = noise::estimate_beta(strong, weak, spec, ec, a.tf.quantile);
    data::KvPairs kv = a.tf.resolved(false);
    kv.emplace_back("strong", a.strong_path);
    kv.emplace_back("weak", a.weak_path);
    echo_config(kv);
    std::printf("beta_hat=%s\n", data::format_double(est).c_str());
    return kExitOk;
}

struct ExperimentArgs {
    std::string name = "purity_sweep";
    std::vector<std::string> methods;
    std::vector<std::string> sweep;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "experiment_out";
    unsigned jobs = 1;
    std::size_t group_size = 20;
    std::size_t pos_groups = 50;
    std::size_t neg_groups = 50;
    std::size_t n_strong = 20;
    double base_f = 0.8;
    double ccn_alpha = 0.1;
    double ccn_beta = 0.05;
    std::size_t weak_n = 2000;
    std::size_t test_n = 2000;
    TrainFlags tf;
};

int cmd_experiment(const ExperimentArgs& a) {
    experiment::ExperimentConfig cfg;
    cfg.kind = experiment::parse_kind(a.name);
    for (const std::string& m : a.methods) cfg.methods.push_back(train::parse_method(m));
    cfg.sweep = parse_doubles(a.sweep);
    if (!a.seeds.empty()) cfg.seeds = a.seeds;
    cfg.output_dir = a.out_dir;
    cfg.jobs = a.jobs;
    cfg.data.group_size = a.group_size;
    cfg.data.pos_groups = a.pos_groups;
    cfg.data.neg_groups = a.neg_groups;
    cfg.data.n_strong = a.n_strong;
    cfg.data.base_f = a.base_f;
    cfg.data.ccn_alpha = a.ccn_alpha;
    cfg.data.ccn_beta = a.ccn_beta;
    cfg.data.weak_n = a.weak_n;
    cfg.data.test_n = a.test_n;
    cfg.tcfg = a.tf.to_config();
    cfg.scorer = model::parse_scorer(a.tf.scorer, 2, a.tf.dropout);
    if (a.tf.beta != "auto") cfg.beta_override = std::stod(a.tf.beta);
    cfg.resolve();

    data::KvPairs kv = a.tf.resolved(true);
    kv.emplace_back("experiment", a.name);
    kv.emplace_back("output_dir", a.out_dir);
    kv.emplace_back("jobs", std::to_string(a.jobs));
    echo_config(kv);

    const auto rep = experiment::run_experiment(cfg);
    experiment::write_report(rep);
    std::size_t failed = 0;
    for (const auto& r : rep.rows) failed += !r.ok;
    std::printf("%zu rows (%zu failed) -> %s\n", rep.rows.size(), failed, a.out_dir.c_str());
    return failed == 0 ? kExitOk : kExitPartial;
}

struct ReportArgs {
    std::string plot_path;
    std::string out = "plot.svg";
    std::string style = "line";
};

// Minimal dependency-free SVG renderer for plot_*.csv (x,series,mean,std).
int cmd_report(const ReportArgs& a) {
    std::ifstream in(a.plot_path);
    if (!in) throw ParseError("cannot open '" + a.plot_path + "'");
    struct Point {
        double x, mean, std;
    };
    std::map<std::string, std::vector<Point>> series;
    std::string line;
    std::string x_label = "x", metric = "value";
    bool saw_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                const std::string key = line.substr(2, eq - 2);
                if (key == "x_label") x_label = line.substr(eq + 1);
                if (key == "metric") metric = line.substr(eq + 1);
            }
            continue;
        }
        if (!saw_header) {  // column header row
            saw_header = true;
            continue;
        }
        std::array<std::string, 4> cols;
        std::size_t start = 0;
        for (int c = 0; c < 4; ++c) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos && c < 3)
                throw ParseError(a.plot_path + ":" + std::to_string(lineno) +
                                 ": expected 4 columns");
            cols[static_cast<std::size_t>(c)] =
                line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma + 1;
        }
        series[cols[1]].push_back({std::stod(cols[0]), std::stod(cols[2]), std::stod(cols[3])});
    }
    if (series.empty()) throw ParseError(a.plot_path + ": no data rows");

    const double width = 640, height = 420, ml = 60, mr = 160, mt = 30, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymax = 0.0;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
        for (const Point& p : pts) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymax = std::max(ymax, p.mean + p.std);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    ymax = std::max(1e-9, ymax * 1.05);
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto Y = [&](double y) { return height - mb - y / ymax * (height - mt - mb); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif' font-size='12'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << ml << "' y1='" << Y(0) << "' x2='" << width - mr << "' y2='" << Y(0)
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << Y(0) << "' x2='" << ml << "' y2='" << mt
        << "' stroke='black'/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double yv = ymax * t / 5.0;
        svg << "<text x='" << ml - 8 << "' y='" << Y(yv) + 4
            << "' text-anchor='end'>" << data::format_double(std::round(yv * 100) / 100)
            << "</text>\n";
        svg << "<line x1='" << ml - 4 << "' y1='" << Y(yv) << "' x2='" << ml << "' y2='" << Y(yv)
            << "' stroke='black'/>\n";
    }
    svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
        << "' text-anchor='middle'>" << x_label << "</text>\n";
    svg << "<text x='16' y='" << (mt + height - mb) / 2 << "' text-anchor='middle' transform='rotate(-90 16 "
        << (mt + height - mb) / 2 << ")'>" << metric << "</text>\n";

    int color = 0;
    double legend_y = mt + 10;
    for (const auto& [name, pts] : series) {
        const char* stroke = palette[color % 8];
        if (a.style == "bar") {
            const double n_series = static_cast<double>(series.size());
            const double slot = (width - ml - mr) / (static_cast<double>(pts.size()) * n_series + 1);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double bx =
                    ml + slot * (static_cast<double>(i) * n_series + color + 0.5);
                svg << "<rect x='" << bx << "' y='" << Y(pts[i].mean) << "' width='" << slot * 0.9
                    << "' height='" << Y(0) - Y(pts[i].mean) << "' fill='" << stroke << "'/>\n";
            }
        } else {
            svg << "<polyline fill='none' stroke='" << stroke << "' stroke-width='2' points='";
            for (const Point& p : pts) svg << X(p.x) << ',' << Y(p.mean) << ' ';
            svg << "'/>\n";
            for (const Point& p : pts) {
                svg << "<circle cx='" << X(p.x) << "' cy='" << Y(p.mean) << "' r='3' fill='"
                    << stroke << "'/>\n";
                if (p.std > 0.0)
                    svg << "<line x1='" << X(p.x) << "' y1='" << Y(p.mean - p.std) << "' x2='"
                        << X(p.x) << "' y2='" << Y(p.mean + p.std) << "' stroke='" << stroke
                        << "'/>\n";
            }
        }
        svg << "<rect x='" << width - mr + 10 << "' y='" << legend_y - 9
            << "' width='10' height='10' fill='" << stroke << "'/>\n";
        svg << "<text x='" << width - mr + 26 << "' y='" << legend_y << "'>" << name
            << "</text>\n";
        legend_y += 18;
        ++color;
    }
    svg << "</svg>\n";

    std::ofstream os(a.out);
    if (!os) throw Error("cannot write " + a.out);
    os << svg.str();
    std::printf("wrote %s (%zu series)\n", a.out.c_str(), series.size());
    return kExitOk;
}

}  // namespace

// Pulls --config PATH out of the raw arguments, then appends "--key value"
// for every config-file entry whose flag the user did not pass, so CLI flags
// keep precedence over config values over built-in defaults.
int apply_config_file(std::vector<std::string>& args) {
    std::string path;
    for (auto it = args.begin(); it != args.end();) {
        if (*it == "--config") {
            if (std::next(it) == args.end()) {
                std::fprintf(stderr, "config error: --config needs a file path\n");
                return kExitUsage;
            }
            path = *std::next(it);
            it = args.erase(it, std::next(it, 2));
        } else if (it->rfind("--config=", 0) == 0) {
            path = it->substr(9);
            it = args.erase(it);
        } else {
            ++it;
        }
    }
    if (path.empty()) return kExitOk;
    data::KvPairs kv;
    try {
        kv = data::load_kv(path);
    } catch (const Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    }
    for (const auto& [key, value] : kv) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                given = true;
                break;
            }
        }
        if (!given) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return kExitOk;
}

int main(int argc, char** argv) {
    CLI::App app{"instance classification from group-level weak labels"};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads for batch kernels (0 = auto)");

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    gen_cmd->add_option("generator", gen.generator, "purity | instances")->required();
    gen_cmd->add_option("--f", gen.f, "positive-group purity fraction");
    gen_cmd->add_option("--groups", gen.groups, "positive and negative group count");
    gen_cmd->add_option("--pos-groups", gen.pos_groups, "override positive group count");
    gen_cmd->add_option("--neg-groups", gen.neg_groups, "override negative group count");
    gen_cmd->add_option("--group-size", gen.group_size, "instances per group");
    gen_cmd->add_option("--pos", gen.n_pos, "positive instances (instances generator)");
    gen_cmd->add_option("--neg", gen.n_neg, "negative instances (instances generator)");
    gen_cmd->add_option("--ccn-alpha", gen.ccn_alpha, "attach CCN labels: Pr(g=0|y=1)");
    gen_cmd->add_option("--ccn-beta", gen.ccn_beta, "attach CCN labels: Pr(g=1|y=0)");
    gen_cmd->add_option("--seed", gen.seed, "PRNG seed");
    gen_cmd->add_option("--out", gen.out, "output CSV path");

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--method", train_args.method,
                          "weasl | only_strong | only_weak | mil_balanced | mil_imbalanced");
    train_cmd->add_option("--strong", train_args.strong_path, "strong-labels CSV");
    train_cmd->add_option("--weak", train_args.weak_path, "weak-labels CSV");
    train_cmd->add_option("--out", train_args.out, "model output path");
    train_args.tf.mount(train_cmd, true);

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
    eval_cmd->add_option("--model", eval_args.model_path, "model path")->required();
    eval_cmd->add_option("--data", eval_args.data_path, "labeled CSV")->required();
    eval_cmd->add_option("--out", eval_args.out, "metrics CSV output path");

    EstimateArgs est_args;
    CLI::App* est_cmd = app.add_subcommand("estimate-beta", "estimate Pr(g=1|y=0)");
    est_cmd->add_option("--strong", est_args.strong_path, "strong-labels CSV")->required();
    est_cmd->add_option("--weak", est_args.weak_path, "weak-labels CSV")->required();
    est_args.tf.mount(est_cmd, false);

    ExperimentArgs exp_args;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "run a sweep grid");
    exp_cmd->add_option("--name", exp_args.name,
                        "purity_sweep | skew_sweep | strong_count_sweep | complexity_compare | "
                        "baseline_compare")
        ->required();
    exp_cmd->add_option("--methods", exp_args.methods, "methods (default per experiment)")
        ->delimiter(',');
    exp_cmd->add_option("--sweep", exp_args.sweep, "sweep values (default per experiment)")
        ->delimiter(',');
    exp_cmd->add_option("--seeds", exp_args.seeds, "seeds (default 1..5)")->delimiter(',');
    exp_cmd->add_option("--out-dir", exp_args.out_dir, "output directory");
    exp_cmd->add_option("--jobs", exp_args.jobs, "concurrent sweep cells");
    exp_cmd->add_option("--group-size", exp_args.group_size, "instances per group");
    exp_cmd->add_option("--pos-groups", exp_args.pos_groups, "positive groups");
    exp_cmd->add_option("--neg-groups", exp_args.neg_groups, "negative groups");
    exp_cmd->add_option("--n-strong", exp_args.n_strong, "strong samples (balanced)");
    exp_cmd->add_option("--base-f", exp_args.base_f, "purity before skew subsampling");
    exp_cmd->add_option("--ccn-alpha", exp_args.ccn_alpha, "weak noise for count sweeps");
    exp_cmd->add_option("--ccn-beta", exp_args.ccn_beta, "weak noise for count sweeps");
    exp_cmd->add_option("--weak-n", exp_args.weak_n, "weak instances for count sweeps");
    exp_cmd->add_option("--test-n", exp_args.test_n, "test instances for count sweeps");
    exp_args.tf.mount(exp_cmd, true);

    ReportArgs rep_args;
    CLI::App* rep_cmd = app.add_subcommand("report", "render a plot CSV to SVG");
    rep_cmd->add_option("--plot", rep_args.plot_path, "plot_*.csv from an experiment")->required();
    rep_cmd->add_option("--out", rep_args.out, "SVG output path");
    rep_cmd->add_option("--style", rep_args.style, "line | bar")
        ->check(CLI::IsMember({"line", "bar"}));

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    std::vector<std::string> args(argv + 1, argv + argc);
    if (const int rc = apply_config_file(args); rc != kExitOk) return rc;
    try {
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (threads > 0) parallel::set_threads(threads);
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (est_cmd->parsed()) return cmd_estimate_beta(est_args);
        if (exp_cmd->parsed()) return cmd_experiment(exp_args);
        if (rep_cmd->parsed()) return cmd_report(rep_args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: bad numeric value (%s)\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
