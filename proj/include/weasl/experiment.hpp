#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weasl/dataset.hpp"
#include "weasl/eval.hpp"
#include "weasl/model.hpp"
#include "weasl/synth.hpp"
#include "weasl/train.hpp"

namespace weasl::experiment {

enum class Kind {
    purity_sweep,       // x = group purity f, F-measure on skew-matched test set
    skew_sweep,         // x = target instance skew, F-measure
    strong_count_sweep, // x = strong-set size, accuracy
    complexity_compare, // x = strong-set size, logistic vs mlp per method, accuracy
    baseline_compare,   // x = group purity f, plus error-venn over the methods
};

Kind parse_kind(const std::string& name);
std::string kind_name(Kind kind);

// Shape of the synthetic data built for each sweep cell. Purity-style kinds
// (purity, skew, baseline) assemble groups; the count-style kinds draw flat
// instance sets and add exact-CCN weak labels.
struct DataParams {
    std::size_t group_size = 20;
    std::size_t pos_groups = 50;
    std::size_t neg_groups = 50;
    std::size_t n_strong = 20;   // balanced; ignored where the sweep sets it
    double base_f = 0.8;         // starting purity before skew subsampling
    double ccn_alpha = 0.1;      // weak-label noise for count-style kinds
    double ccn_beta = 0.05;
    std::size_t weak_n = 2000;   // weak instances for count-style kinds
    std::size_t test_n = 2000;   // test instances for count-style kinds
};

struct ExperimentConfig {
    Kind kind = Kind::purity_sweep;
    std::vector<train::Method> methods;        // empty: per-kind default
    std::vector<double> sweep;                 // empty: per-kind default
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string output_dir = ".";
    DataParams data;
    model::ScorerSpec scorer;                  // complexity_compare supplies its own pair
    train::TrainConfig tcfg;                   // template; seed/mode set per cell
    double beta_override = -1.0;               // < 0: estimate_beta on each cell's data
    unsigned jobs = 1;
    bool imbalanced = true;                    // per-kind default set by resolve()

    void resolve();        // fill empty fields with the kind's defaults
    void validate() const; // sweep values sane for the kind, seeds non-empty
};

struct RunRow {
    double x = 0.0;
    train::Method method = train::Method::weasl;
    std::string model;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    eval::MetricsReport metrics;
    double threshold = 0.0;
    double lambda = 0.0;
    double beta_hat = 0.0;
    double objective = 0.0;
    double seconds = 0.0;
};

struct VennRow {
    std::uint64_t seed = 0;
    std::vector<std::size_t> counts;  // 2^m regions, venn_regions order
};

struct ExperimentReport {
    ExperimentConfig cfg;
    std::vector<RunRow> rows;           // x-major, then seed, then method[,model]
    std::vector<std::string> venn_methods;
    std::vector<VennRow> venn;          // baseline_compare only, one per (x, seed)

    bool all_ok() const;
};

// Runs the full grid. Cells (one per x,seed pair) execute concurrently up to
// cfg.jobs; datasets are generated once per cell and shared by its methods.
// A failed run becomes an error row; the sweep continues.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// results.csv, summary.csv, plot_<kind>.csv (+ venn.csv) under cfg.output_dir,
// each headed by the resolved config as '#'-comment key=value lines.
void write_report(const ExperimentReport& rep);

// mean/std (sample, n-1) helper shared with the summary writer.
struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace weasl::experiment
