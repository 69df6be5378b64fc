#include "weasl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "weasl/error.hpp"
#include "weasl/rng.hpp"

namespace weasl::synth {

namespace {

// Stream salts; children are derived per group or per instance so output is
// independent of generation order.
constexpr std::uint64_t kSaltPurity = 0xA1;
constexpr std::uint64_t kSaltInstances = 0xA2;
constexpr std::uint64_t kSaltCcn = 0xA3;
constexpr std::uint64_t kSaltSkew = 0xA4;

void sample_from(const GaussianComponent& comp, rng::Stream& stream, std::vector<double>& out) {
    out.resize(comp.mean.size());
    for (std::size_t d = 0; d < comp.mean.size(); ++d) {
        out[d] = comp.mean[d] + comp.std * stream.next_normal();
    }
}

void sample_class(const std::vector<GaussianComponent>& components, rng::Stream& stream,
                  std::vector<double>& out) {
    const std::size_t pick =
        components.size() == 1 ? 0 : static_cast<std::size_t>(stream.next_below(components.size()));
    sample_from(components[pick], stream, out);
}

}  // namespace

std::size_t GaussianMixtureSpec::dim() const {
    return positive_components.empty() ? 0 : positive_components.front().mean.size();
}

void GaussianMixtureSpec::validate() const {
    if (positive_components.empty() || negative_components.empty()) {
        throw ConfigError("mixture needs at least one component per class");
    }
    const std::size_t d = dim();
    for (const auto* side : {&positive_components, &negative_components}) {
        for (const auto& comp : *side) {
            if (comp.mean.size() != d) throw ConfigError("mixture component dims disagree");
            if (!(comp.std > 0.0)) throw ConfigError("mixture std must be positive");
        }
    }
}

GaussianMixtureSpec GaussianMixtureSpec::purity_default() {
    GaussianMixtureSpec spec;
    spec.positive_components = {{{1.0, 1.0}, 1.0}, {{3.0, 3.0}, 1.0}};
    spec.negative_components = {{{0.0, 0.0}, 1.0}};
    return spec;
}

GaussianMixtureSpec GaussianMixtureSpec::separated(double separation, std::size_t dim) {
    GaussianMixtureSpec spec;
    const double shift = separation / std::sqrt(static_cast<double>(dim));
    GaussianComponent neg{std::vector<double>(dim, 0.0), 1.0};
    GaussianComponent pos{std::vector<double>(dim, shift), 1.0};
    spec.positive_components = {pos};
    spec.negative_components = {neg};
    return spec;
}

void PurityConfig::validate() const {
    if (!(f > 0.0) || f > 1.0) throw ConfigError("purity f must be in (0,1]");
    if (group_size == 0 || n_pos_groups == 0 || n_neg_groups == 0) {
        throw ConfigError("group_size and group counts must be positive");
    }
    const double count = f * static_cast<double>(group_size);
    if (std::abs(count - std::round(count)) > 1e-9) {
        throw ConfigError("f*group_size must be an integer, got " + std::to_string(count));
    }
    if (std::llround(count) == 0) throw ConfigError("positive groups need at least one positive");
}

std::size_t PurityConfig::positives_per_group() const {
    return static_cast<std::size_t>(std::llround(f * static_cast<double>(group_size)));
}

GroupedData gen_purity_dataset(const PurityConfig& cfg, const GaussianMixtureSpec& spec) {
    cfg.validate();
    spec.validate();
    const std::size_t n_pos = cfg.positives_per_group();
    const std::size_t n_groups = cfg.n_pos_groups + cfg.n_neg_groups;

    GroupedData out;
    out.dataset.dim = spec.dim();
    out.dataset.reserve(n_groups * cfg.group_size);

    const std::uint64_t root = rng::derive(cfg.seed, kSaltPurity);
    std::vector<double> x;
    for (std::size_t b = 0; b < n_groups; ++b) {
        const bool positive_group = b < cfg.n_pos_groups;
        rng::Stream stream(rng::derive(root, b));
        for (std::size_t m = 0; m < cfg.group_size; ++m) {
            const bool positive = positive_group && m < n_pos;
            sample_class(positive ? spec.positive_components : spec.negative_components, stream, x);
            out.dataset.append(x, positive ? 1 : 0, static_cast<std::int64_t>(b),
                               positive_group ? 1 : 0);
        }
    }
    out.groups = data::build_group_table(out.dataset);
    return out;
}

data::Dataset gen_instances(const GaussianMixtureSpec& spec, std::size_t n_pos, std::size_t n_neg,
                            std::uint64_t seed) {
    spec.validate();
    data::Dataset ds(spec.dim());
    ds.reserve(n_pos + n_neg);
    const std::uint64_t root = rng::derive(seed, kSaltInstances);
    std::vector<double> x;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        const bool positive = i < n_pos;
        rng::Stream stream(rng::derive(root, i));
        sample_class(positive ? spec.positive_components : spec.negative_components, stream, x);
        ds.append(x, positive ? 1 : 0, -1, -1);
    }
    return ds;
}

data::Dataset inject_ccn_noise(const data::Dataset& ds, double alpha, double beta,
                               std::uint64_t seed) {
    if (!ds.has_all_y()) throw ConfigError("inject_ccn_noise needs true labels on every instance");
    if (alpha < 0.0 || alpha >= 1.0 || beta < 0.0 || beta >= 1.0) {
        throw ConfigError("noise rates must lie in [0,1)");
    }
    data::Dataset out = ds;
    const std::uint64_t root = rng::derive(seed, kSaltCcn);
    for (std::size_t i = 0; i < out.size(); ++i) {
        rng::Stream stream(rng::derive(root, i));
        const bool flip = stream.next_bernoulli(out.y[i] == 1 ? alpha : beta);
        const int noisy = flip ? 1 - out.y[i] : out.y[i];
        out.g[i] = static_cast<std::int8_t>(noisy);
        out.group_id[i] = static_cast<std::int64_t>(i);
    }
    return out;
}

double instance_skew(const data::Dataset& ds) {
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (std::int8_t v : ds.y) {
        if (v == 1) pos += 1;
        else if (v == 0) neg += 1;
    }
    if (pos == 0) throw ConfigError("skew undefined: no positive instances");
    return static_cast<double>(neg) / static_cast<double>(pos);
}

GroupedData subsample_skew(const data::Dataset& ds, const data::GroupTable& gt,
                           double target_skew, std::uint64_t seed) {
    if (!ds.has_all_y()) throw ConfigError("subsample_skew needs true labels");
    if (!(target_skew >= 1.0)) throw ConfigError("target skew must be >= 1");

    std::size_t pos = 0;
    std::size_t neg = 0;
    for (std::int8_t v : ds.y) (v == 1 ? pos : neg) += 1;
    if (pos == 0) throw ConfigError("no positive instances to subsample");

    // Candidate groups: those holding at least one positive.
    struct Candidate {
        std::size_t group;
        std::size_t pos;
        std::size_t neg;
    };
    std::vector<Candidate> candidates;
    for (std::size_t gi = 0; gi < gt.groups.size(); ++gi) {
        std::size_t p = 0;
        std::size_t n = 0;
        for (std::size_t m : gt.groups[gi].members) (ds.y[m] == 1 ? p : n) += 1;
        if (p > 0) candidates.push_back({gi, p, n});
    }

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::Stream stream(rng::derive(seed, kSaltSkew));
    rng::shuffle(std::span<std::size_t>(order), stream);

    auto skew = [&] { return static_cast<double>(neg) / static_cast<double>(pos); };
    const double start = skew();
    if (target_skew < start - 1e-12) {
        throw ConfigError("target skew " + std::to_string(target_skew) +
                          " below current skew " + std::to_string(start) +
                          "; removing positive groups can only raise skew");
    }

    std::vector<bool> removed(gt.groups.size(), false);
    std::size_t available = candidates.size();
    for (std::size_t oi = 0; oi < order.size() && skew() < target_skew; ++oi) {
        if (available <= 1) {
            throw ConfigError("target skew " + std::to_string(target_skew) +
                              " unreachable; max achievable about " + std::to_string(skew()) +
                              " before removing the last positive group");
        }
        const Candidate& c = candidates[order[oi]];
        removed[c.group] = true;
        pos -= c.pos;
        neg -= c.neg;
        available -= 1;
    }
    if (skew() < target_skew) {
        throw ConfigError("target skew " + std::to_string(target_skew) +
                          " unreachable; max achievable " + std::to_string(skew()));
    }

    std::vector<std::size_t> keep;
    std::vector<bool> drop_instance(ds.size(), false);
    for (std::size_t gi = 0; gi < gt.groups.size(); ++gi) {
        if (!removed[gi]) continue;
        for (std::size_t m : gt.groups[gi].members) drop_instance[m] = true;
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!drop_instance[i]) keep.push_back(i);
    }

    GroupedData out;
    out.dataset = data::subset(ds, keep);
    out.groups = data::build_group_table(out.dataset);
    return out;
}

data::KvPairs purity_metadata(const PurityConfig& cfg, const GaussianMixtureSpec& spec) {
    data::KvPairs kv;
    kv.emplace_back("generator", "purity");
    kv.emplace_back("f", data::format_double(cfg.f));
    kv.emplace_back("group_size", std::to_string(cfg.group_size));
    kv.emplace_back("n_pos_groups", std::to_string(cfg.n_pos_groups));
    kv.emplace_back("n_neg_groups", std::to_string(cfg.n_neg_groups));
    kv.emplace_back("seed", std::to_string(cfg.seed));
    kv.emplace_back("component_weights", "uniform");
    auto encode = [](const std::vector<GaussianComponent>& side) {
        std::ostringstream os;
        for (std::size_t i = 0; i < side.size(); ++i) {
            if (i) os << ';';
            for (std::size_t d = 0; d < side[i].mean.size(); ++d) {
                if (d) os << ',';
                os << data::format_double(side[i].mean[d]);
            }
            os << '@' << data::format_double(side[i].std);
        }
        return os.str();
    };
    kv.emplace_back("positive_components", encode(spec.positive_components));
    kv.emplace_back("negative_components", encode(spec.negative_components));
    return kv;
}

}  // namespace weasl::synth
