// Timings for the hot per-gamma and per-group kernels, parallel vs the serial
// reference. Prints one line per kernel and size with the speedup, and checks
// that both paths agree bitwise while it is at it.
//
// Usage: bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "weasl/kernels.hpp"
#include "weasl/parallel.hpp"
#include "weasl/rng.hpp"

using namespace weasl;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        fn();
        const auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

struct Inputs {
    std::vector<double> scores;
    std::vector<double> labels;
    std::vector<double> gammas;
    std::vector<double> coeff_label;
    std::vector<double> coeff_unit;
    std::vector<std::size_t> member_index;
    std::vector<std::size_t> offsets;
};

Inputs make_inputs(std::size_t n, std::size_t n_gamma, std::size_t group_size) {
    Inputs in;
    rng::Stream r(12345);
    in.scores.resize(n);
    in.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        in.scores[i] = r.next_unit();
        in.labels[i] = static_cast<double>(r.next_below(2));
    }
    in.gammas.resize(n_gamma);
    for (std::size_t k = 0; k < n_gamma; ++k)
        in.gammas[k] = (static_cast<double>(k) + 1.0) / (static_cast<double>(n_gamma) + 1.0);
    in.coeff_label.assign(n_gamma, 0.7);
    in.coeff_unit.assign(n_gamma, -0.2);
    in.member_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) in.member_index[i] = i;
    rng::shuffle(std::span<std::size_t>(in.member_index), r);
    for (std::size_t at = 0; at <= n; at += group_size) in.offsets.push_back(std::min(at, n));
    if (in.offsets.back() != n) in.offsets.push_back(n);
    return in;
}

bool bits_equal(std::span<const double> a, std::span<const double> b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
    parallel::set_threads(threads);
    std::printf("threads: %d (0 = runtime default)\n", threads);
    std::printf("%-16s %10s %8s %10s %10s %8s %6s\n", "kernel", "n", "gammas", "serial_ms",
                "parallel_ms", "speedup", "match");

    for (const std::size_t n : {10000ul, 100000ul, 1000000ul}) {
        const std::size_t n_gamma = 99;
        const auto in = make_inputs(n, n_gamma, 20);
        const int reps = n >= 1000000 ? 3 : 5;

        kernels::GammaSums ref_sums, par_sums;
        const double t_ref_sums =
            time_best_of(reps, [&] { ref_sums = kernels::reference::gamma_sums(in.scores, in.labels, in.gammas, 100.0); });
        const double t_par_sums =
            time_best_of(reps, [&] { par_sums = kernels::gamma_sums(in.scores, in.labels, in.gammas, 100.0); });
        const bool sums_ok = bits_equal(ref_sums.weighted, par_sums.weighted) &&
                             bits_equal(ref_sums.total, par_sums.total);
        std::printf("%-16s %10zu %8zu %10.2f %10.2f %7.2fx %6s\n", "gamma_sums", n, n_gamma,
                    1e3 * t_ref_sums, 1e3 * t_par_sums, t_ref_sums / t_par_sums,
                    sums_ok ? "yes" : "NO");

        std::vector<double> ref_up(n), par_up(n);
        const double t_ref_up = time_best_of(reps, [&] {
            kernels::reference::gamma_upstream(in.scores, in.labels, in.gammas, 100.0,
                                               in.coeff_label, in.coeff_unit, ref_up);
        });
        const double t_par_up = time_best_of(reps, [&] {
            kernels::gamma_upstream(in.scores, in.labels, in.gammas, 100.0, in.coeff_label,
                                    in.coeff_unit, par_up);
        });
        std::printf("%-16s %10zu %8zu %10.2f %10.2f %7.2fx %6s\n", "gamma_upstream", n, n_gamma,
                    1e3 * t_ref_up, 1e3 * t_par_up, t_ref_up / t_par_up,
                    bits_equal(ref_up, par_up) ? "yes" : "NO");

        const std::size_t n_groups = in.offsets.size() - 1;
        std::vector<double> ref_means(n_groups), par_means(n_groups);
        const double t_ref_means = time_best_of(reps, [&] {
            kernels::reference::group_means(in.scores, in.member_index, in.offsets, ref_means);
        });
        const double t_par_means = time_best_of(reps, [&] {
            kernels::group_means(in.scores, in.member_index, in.offsets, par_means);
        });
        std::printf("%-16s %10zu %8zu %10.2f %10.2f %7.2fx %6s\n", "group_means", n, n_groups,
                    1e3 * t_ref_means, 1e3 * t_par_means, t_ref_means / t_par_means,
                    bits_equal(ref_means, par_means) ? "yes" : "NO");

        std::vector<double> up(n_groups, 0.5), ref_scatter(n), par_scatter(n);
        const double t_ref_scatter = time_best_of(reps, [&] {
            kernels::reference::group_scatter(up, in.member_index, in.offsets, ref_scatter);
        });
        const double t_par_scatter = time_best_of(reps, [&] {
            kernels::group_scatter(up, in.member_index, in.offsets, par_scatter);
        });
        std::printf("%-16s %10zu %8zu %10.2f %10.2f %7.2fx %6s\n", "group_scatter", n, n_groups,
                    1e3 * t_ref_scatter, 1e3 * t_par_scatter, t_ref_scatter / t_par_scatter,
                    bits_equal(ref_scatter, par_scatter) ? "yes" : "NO");
    }
    return 0;
}
