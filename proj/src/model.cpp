#include "weasl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "weasl/error.hpp"
#include "weasl/kernels.hpp"
#include "weasl/parallel.hpp"
#include "weasl/rng.hpp"

namespace weasl::model {

namespace {

constexpr std::uint64_t kSaltInit = 0xB1;
constexpr std::uint64_t kSaltMask = 0xB2;

// Per-thread forward/backward scratch.
struct Workspace {
    std::vector<double> tanhs;   // tanh(z) per hidden unit, all layers concatenated
    std::vector<double> masks;   // dropout multiplier per hidden unit
    std::vector<double> acts;    // post-dropout activations
    std::vector<double> delta;   // backprop buffer, two alternating slabs
    std::vector<std::size_t> unit_base;   // per-layer offset into tanhs/masks/acts
    std::vector<std::size_t> param_base;  // per-layer offset into the parameter vector
};

Workspace& workspace(const ScorerSpec& spec) {
    thread_local Workspace ws;
    std::size_t hidden_total = 0;
    std::size_t max_width = 1;
    for (std::size_t h : spec.hidden_sizes) {
        hidden_total += h;
        max_width = std::max(max_width, h);
    }
    ws.tanhs.resize(hidden_total);
    ws.masks.resize(hidden_total);
    ws.acts.resize(hidden_total);
    ws.delta.resize(2 * max_width);
    const std::size_t layers = spec.hidden_sizes.size();
    ws.unit_base.resize(layers);
    ws.param_base.resize(layers);
    std::size_t offset = 0;
    std::size_t at = 0;
    std::size_t fan_in = spec.input_dim;
    for (std::size_t layer = 0; layer < layers; ++layer) {
        ws.unit_base[layer] = offset;
        ws.param_base[layer] = at;
        offset += spec.hidden_sizes[layer];
        at += spec.hidden_sizes[layer] * fan_in + spec.hidden_sizes[layer];
        fan_in = spec.hidden_sizes[layer];
    }
    return ws;
}

void fill_masks(const ScorerSpec& spec, Mode mode, std::uint64_t mask_key, std::size_t instance,
                std::span<double> masks) {
    if (mode == Mode::eval || spec.dropout_rate <= 0.0) {
        std::fill(masks.begin(), masks.end(), 1.0);
        return;
    }
    const double p = spec.dropout_rate;
    const double scale = 1.0 / (1.0 - p);
    std::size_t at = 0;
    const std::uint64_t per_instance = rng::derive(rng::derive(mask_key, kSaltMask), instance);
    for (std::size_t layer = 0; layer < spec.hidden_sizes.size(); ++layer) {
        rng::Stream stream(rng::derive(per_instance, layer));
        for (std::size_t u = 0; u < spec.hidden_sizes[layer]; ++u) {
            masks[at++] = stream.next_bernoulli(p) ? 0.0 : scale;
        }
    }
}

// Runs the net for one instance, filling tanh values, masks, and post-dropout
// activations. Returns the pre-sigmoid output t.
double run_forward(const ScorerSpec& spec, std::span<const double> w, std::span<const double> x,
                   Mode mode, std::uint64_t mask_key, std::size_t instance, Workspace& ws) {
    if (spec.kind == Kind::logistic) {
        double t = w[spec.input_dim];
        for (std::size_t d = 0; d < spec.input_dim; ++d) t += w[d] * x[d];
        return t;
    }
    fill_masks(spec, mode, mask_key, instance, ws.masks);
    std::size_t offset = 0;   // layer base inside tanhs/masks/acts
    std::size_t at = 0;       // parameter cursor
    std::span<const double> prev = x;
    for (std::size_t layer = 0; layer < spec.hidden_sizes.size(); ++layer) {
        const std::size_t units = spec.hidden_sizes[layer];
        const std::size_t fan_in = prev.size();
        const double* weights = w.data() + at;
        const double* bias = weights + units * fan_in;
        for (std::size_t u = 0; u < units; ++u) {
            double z = bias[u];
            const double* row = weights + u * fan_in;
            for (std::size_t j = 0; j < fan_in; ++j) z += row[j] * prev[j];
            const double a = std::tanh(z);
            ws.tanhs[offset + u] = a;
            ws.acts[offset + u] = a * ws.masks[offset + u];
        }
        prev = {ws.acts.data() + offset, units};
        offset += units;
        at += units * fan_in + units;
    }
    const double* out_w = w.data() + at;
    double t = out_w[prev.size()];
    for (std::size_t u = 0; u < prev.size(); ++u) t += out_w[u] * prev[u];
    return t;
}

// Backward for one instance: acc += upstream * d f(x)/dw. Reuses the forward
// pass results left in ws.
void run_backward(const ScorerSpec& spec, std::span<const double> w, std::span<const double> x,
                  double score, double upstream, Workspace& ws, double* acc) {
    const double dt = upstream * score * (1.0 - score);
    if (spec.kind == Kind::logistic) {
        for (std::size_t d = 0; d < spec.input_dim; ++d) acc[d] += dt * x[d];
        acc[spec.input_dim] += dt;
        return;
    }
    const std::size_t layers = spec.hidden_sizes.size();
    const std::vector<std::size_t>& unit_base = ws.unit_base;
    const std::vector<std::size_t>& param_base = ws.param_base;
    const std::size_t last = layers - 1;
    const std::size_t last_fan_in = layers == 1 ? spec.input_dim : spec.hidden_sizes[last - 1];
    const std::size_t at =
        param_base[last] + spec.hidden_sizes[last] * last_fan_in + spec.hidden_sizes[last];
    const std::size_t last_units = spec.hidden_sizes[last];
    const double* out_w = w.data() + at;
    double* dh = ws.delta.data();
    for (std::size_t u = 0; u < last_units; ++u) {
        acc[at + u] += dt * ws.acts[unit_base[last] + u];
        dh[u] = dt * out_w[u];
    }
    acc[at + last_units] += dt;

    double* dh_prev = ws.delta.data() + ws.delta.size() / 2;
    for (std::size_t layer = layers; layer-- > 0;) {
        const std::size_t units = spec.hidden_sizes[layer];
        const std::size_t fi = layer == 0 ? spec.input_dim : spec.hidden_sizes[layer - 1];
        const double* weights = w.data() + param_base[layer];
        const std::span<const double> prev =
            layer == 0 ? x : std::span<const double>(ws.acts.data() + unit_base[layer - 1], fi);
        if (layer > 0) std::fill(dh_prev, dh_prev + fi, 0.0);
        for (std::size_t u = 0; u < units; ++u) {
            const std::size_t g = unit_base[layer] + u;
            const double a = ws.tanhs[g];
            const double dz = dh[u] * ws.masks[g] * (1.0 - a * a);
            double* grad_row = acc + param_base[layer] + u * fi;
            const double* w_row = weights + u * fi;
            for (std::size_t j = 0; j < fi; ++j) {
                grad_row[j] += dz * prev[j];
                if (layer > 0) dh_prev[j] += dz * w_row[j];
            }
            acc[param_base[layer] + units * fi + u] += dz;
        }
        std::swap(dh, dh_prev);
    }
}

}  // namespace

void ScorerSpec::validate() const {
    if (input_dim == 0) throw ConfigError("scorer input_dim must be positive");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("dropout_rate must be in [0,1)");
    if (kind == Kind::logistic) {
        if (!hidden_sizes.empty()) throw ConfigError("logistic scorer takes no hidden sizes");
    } else {
        if (hidden_sizes.empty()) throw ConfigError("mlp scorer needs hidden sizes");
        for (std::size_t h : hidden_sizes) {
            if (h == 0) throw ConfigError("hidden sizes must be positive");
        }
    }
}

std::size_t ScorerSpec::param_count() const {
    if (kind == Kind::logistic) return input_dim + 1;
    std::size_t count = 0;
    std::size_t fan_in = input_dim;
    for (std::size_t h : hidden_sizes) {
        count += fan_in * h + h;
        fan_in = h;
    }
    return count + fan_in + 1;
}

std::string ScorerSpec::describe() const {
    std::ostringstream os;
    if (kind == Kind::logistic) {
        os << "logistic(input_dim=" << input_dim << ")";
        return os.str();
    }
    os << "mlp(input_dim=" << input_dim << ",hidden=";
    for (std::size_t i = 0; i < hidden_sizes.size(); ++i) {
        if (i) os << 'x';
        os << hidden_sizes[i];
    }
    os << ",dropout=" << dropout_rate << ")";
    return os.str();
}

ScorerSpec parse_scorer(const std::string& text, std::size_t input_dim, double dropout_rate) {
    ScorerSpec spec;
    spec.input_dim = input_dim;
    spec.dropout_rate = dropout_rate;
    if (text == "logistic") {
        spec.kind = Kind::logistic;
        spec.validate();
        return spec;
    }
    if (text == "mlp") {
        spec.kind = Kind::mlp;
        spec.hidden_sizes = {128, 64};
        spec.validate();
        return spec;
    }
    if (text.rfind("mlp:", 0) == 0) {
        spec.kind = Kind::mlp;
        std::istringstream in(text.substr(4));
        std::string piece;
        while (std::getline(in, piece, ',')) {
            try {
                spec.hidden_sizes.push_back(std::stoul(piece));
            } catch (const std::exception&) {
                throw ConfigError("bad hidden size '" + piece + "' in scorer '" + text + "'");
            }
        }
        spec.validate();
        return spec;
    }
    throw ConfigError("unknown scorer '" + text + "' (expected logistic, mlp, or mlp:h1,h2,..)");
}

ScorerParams init_params(const ScorerSpec& spec, std::uint64_t seed) {
    spec.validate();
    ScorerParams params;
    params.w.assign(spec.param_count(), 0.0);
    rng::Stream stream(rng::derive(seed, kSaltInit));
    if (spec.kind == Kind::logistic) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
        for (std::size_t d = 0; d < spec.input_dim; ++d) params.w[d] = scale * stream.next_normal();
        return params;
    }
    std::size_t at = 0;
    std::size_t fan_in = spec.input_dim;
    for (std::size_t h : spec.hidden_sizes) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < h * fan_in; ++i) params.w[at + i] = scale * stream.next_normal();
        at += h * fan_in + h;  // biases stay zero
        fan_in = h;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < fan_in; ++i) params.w[at + i] = scale * stream.next_normal();
    return params;
}

double forward_one(const ScorerSpec& spec, const ScorerParams& params, std::span<const double> x) {
    if (x.size() != spec.input_dim) throw ConfigError("feature length does not match scorer");
    if (params.w.size() != spec.param_count()) throw ConfigError("parameter vector length mismatch");
    Workspace& ws = workspace(spec);
    return kernels::sigmoid(run_forward(spec, params.w, x, Mode::eval, 0, 0, ws));
}

void forward_batch(const ScorerSpec& spec, const ScorerParams& params, const data::Dataset& ds,
                   Mode mode, std::uint64_t mask_key, std::span<double> out_scores) {
    if (ds.dim != spec.input_dim) throw ConfigError("dataset dim does not match scorer");
    if (params.w.size() != spec.param_count()) throw ConfigError("parameter vector length mismatch");
    if (out_scores.size() != ds.size()) throw ConfigError("score buffer size mismatch");
    parallel::for_each_index(ds.size(), [&](std::size_t i) {
        Workspace& ws = workspace(spec);
        out_scores[i] =
            kernels::sigmoid(run_forward(spec, params.w, ds.x(i), mode, mask_key, i, ws));
    });
}

void backward_batch(const ScorerSpec& spec, const ScorerParams& params, const data::Dataset& ds,
                    Mode mode, std::uint64_t mask_key, std::span<const double> upstream,
                    std::span<double> out_grad) {
    if (ds.dim != spec.input_dim) throw ConfigError("dataset dim does not match scorer");
    if (upstream.size() != ds.size()) throw ConfigError("upstream size mismatch");
    if (out_grad.size() != spec.param_count()) throw ConfigError("gradient buffer size mismatch");
    parallel::accumulate_indexed(ds.size(), out_grad.size(), out_grad.data(),
                                 [&](std::size_t i, double* acc) {
        Workspace& ws = workspace(spec);
        const auto x = ds.x(i);
        const double t = run_forward(spec, params.w, x, mode, mask_key, i, ws);
        const double score = kernels::sigmoid(t);
        run_backward(spec, params.w, x, score, upstream[i], ws, acc);
    });
}

}  // namespace weasl::model
