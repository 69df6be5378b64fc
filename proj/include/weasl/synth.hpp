#pragma once

#include <cstdint>
#include <vector>

#include "weasl/dataset.hpp"

namespace weasl::synth {

struct GaussianComponent {
    std::vector<double> mean;
    double std = 1.0;
};

struct GaussianMixtureSpec {
    std::vector<GaussianComponent> positive_components;
    std::vector<GaussianComponent> negative_components;

    std::size_t dim() const;
    void validate() const;

    // Positives from N((1,1), I) or N((3,3), I) with equal weight,
    // negatives from N((0,0), I).
    static GaussianMixtureSpec purity_default();

    // One positive and one negative component at the given separation along
    // the diagonal, unit std. Used by the noise-estimation oracles.
    static GaussianMixtureSpec separated(double separation, std::size_t dim);
};

struct PurityConfig {
    double f = 1.0;               // fraction of each positive group that is positive
    std::size_t group_size = 20;
    std::size_t n_pos_groups = 50;
    std::size_t n_neg_groups = 50;
    std::uint64_t seed = 0;

    void validate() const;  // f*group_size must be integral (1e-9)
    std::size_t positives_per_group() const;
};

struct GroupedData {
    data::Dataset dataset;
    data::GroupTable groups;
};

// Positive groups (g=1) hold round(f*group_size) positives and the rest
// negatives; negative groups (g=0) are all-negative. Every instance carries
// y, group_id, g. Pure function of (cfg, spec).
GroupedData gen_purity_dataset(const PurityConfig& cfg, const GaussianMixtureSpec& spec);

// n_pos positives then n_neg negatives with true labels only.
data::Dataset gen_instances(const GaussianMixtureSpec& spec, std::size_t n_pos, std::size_t n_neg,
                            std::uint64_t seed);

// Copy of ds where each instance gets a noisy label in g, held in a fresh
// singleton group per instance: y=1 flips to 0 with probability alpha, y=0
// flips to 1 with probability beta. Requires true labels everywhere.
data::Dataset inject_ccn_noise(const data::Dataset& ds, double alpha, double beta,
                               std::uint64_t seed);

// Removes whole positive-containing groups (chosen in seeded shuffle order)
// until #neg/#pos first reaches target_skew; lands within one group's effect
// of the target. Instance order of survivors is preserved.
GroupedData subsample_skew(const data::Dataset& ds, const data::GroupTable& gt,
                           double target_skew, std::uint64_t seed);

double instance_skew(const data::Dataset& ds);  // #neg / #pos over true labels

data::KvPairs purity_metadata(const PurityConfig& cfg, const GaussianMixtureSpec& spec);

}  // namespace weasl::synth
