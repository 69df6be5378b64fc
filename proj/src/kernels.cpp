#include "weasl/kernels.hpp"

#include <algorithm>
#include <cassert>

#include "weasl/parallel.hpp"

namespace weasl::kernels {

GammaSums gamma_sums(std::span<const double> scores, std::span<const double> labels,
                     std::span<const double> gammas, double s) {
    assert(scores.size() == labels.size());
    const std::size_t n = scores.size();
    const std::size_t k = gammas.size();
    GammaSums sums;
    sums.weighted.assign(k, 0.0);
    sums.total.assign(k, 0.0);
    if (k == 0 || n == 0) return sums;

    // Partial layout per block: [weighted_0..weighted_{k-1}, total_0..total_{k-1}].
    std::vector<double> flat(2 * k);
    parallel::accumulate_indexed(n, 2 * k, flat.data(), [&](std::size_t i, double* acc) {
        const double score = scores[i];
        const double label = labels[i];
        for (std::size_t j = 0; j < k; ++j) {
            const double p = soft_threshold(score, gammas[j], s);
            acc[j] += p * label;
            acc[k + j] += p;
        }
    });
    std::copy_n(flat.data(), k, sums.weighted.data());
    std::copy_n(flat.data() + k, k, sums.total.data());
    return sums;
}

void gamma_upstream(std::span<const double> scores, std::span<const double> labels,
                    std::span<const double> gammas, double s,
                    std::span<const double> coeff_label, std::span<const double> coeff_unit,
                    std::span<double> out) {
    assert(scores.size() == labels.size() && scores.size() == out.size());
    assert(gammas.size() == coeff_label.size() && gammas.size() == coeff_unit.size());
    const std::size_t k = gammas.size();
    parallel::for_each_index(scores.size(), [&](std::size_t i) {
        const double score = scores[i];
        const double label = labels[i];
        double u = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double p = soft_threshold(score, gammas[j], s);
            u += (coeff_label[j] * label + coeff_unit[j]) * s * p * (1.0 - p);
        }
        out[i] = u;
    });
}

void group_means(std::span<const double> scores, std::span<const std::size_t> member_index,
                 std::span<const std::size_t> group_offsets, std::span<double> out_means) {
    assert(group_offsets.size() == out_means.size() + 1);
    parallel::for_each_index(out_means.size(), [&](std::size_t b) {
        const std::size_t begin = group_offsets[b];
        const std::size_t end = group_offsets[b + 1];
        double acc = 0.0;
        for (std::size_t m = begin; m < end; ++m) acc += scores[member_index[m]];
        out_means[b] = end > begin ? acc / static_cast<double>(end - begin) : 0.0;
    });
}

void group_scatter(std::span<const double> group_upstream,
                   std::span<const std::size_t> member_index,
                   std::span<const std::size_t> group_offsets, std::span<double> out) {
    assert(group_offsets.size() == group_upstream.size() + 1);
    std::fill(out.begin(), out.end(), 0.0);
    parallel::for_each_index(group_upstream.size(), [&](std::size_t b) {
        const std::size_t begin = group_offsets[b];
        const std::size_t end = group_offsets[b + 1];
        if (begin == end) return;
        const double share = group_upstream[b] / static_cast<double>(end - begin);
        for (std::size_t m = begin; m < end; ++m) out[member_index[m]] += share;
    });
}

namespace reference {

GammaSums gamma_sums(std::span<const double> scores, std::span<const double> labels,
                     std::span<const double> gammas, double s) {
    const std::size_t n = scores.size();
    const std::size_t k = gammas.size();
    GammaSums sums;
    sums.weighted.assign(k, 0.0);
    sums.total.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double weighted = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = soft_threshold(scores[i], gammas[j], s);
            weighted += p * labels[i];
            total += p;
        }
        sums.weighted[j] = weighted;
        sums.total[j] = total;
    }
    return sums;
}

void gamma_upstream(std::span<const double> scores, std::span<const double> labels,
                    std::span<const double> gammas, double s,
                    std::span<const double> coeff_label, std::span<const double> coeff_unit,
                    std::span<double> out) {
    const std::size_t k = gammas.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        double u = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double p = soft_threshold(scores[i], gammas[j], s);
            u += (coeff_label[j] * labels[i] + coeff_unit[j]) * s * p * (1.0 - p);
        }
        out[i] = u;
    }
}

void group_means(std::span<const double> scores, std::span<const std::size_t> member_index,
                 std::span<const std::size_t> group_offsets, std::span<double> out_means) {
    for (std::size_t b = 0; b < out_means.size(); ++b) {
        const std::size_t begin = group_offsets[b];
        const std::size_t end = group_offsets[b + 1];
        double acc = 0.0;
        for (std::size_t m = begin; m < end; ++m) acc += scores[member_index[m]];
        out_means[b] = end > begin ? acc / static_cast<double>(end - begin) : 0.0;
    }
}

void group_scatter(std::span<const double> group_upstream,
                   std::span<const std::size_t> member_index,
                   std::span<const std::size_t> group_offsets, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t b = 0; b < group_upstream.size(); ++b) {
        const std::size_t begin = group_offsets[b];
        const std::size_t end = group_offsets[b + 1];
        if (begin == end) continue;
        const double share = group_upstream[b] / static_cast<double>(end - begin);
        for (std::size_t m = begin; m < end; ++m) out[member_index[m]] += share;
    }
}

}  // namespace reference

}  // namespace weasl::kernels
