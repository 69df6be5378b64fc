#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace weasl::kernels {

// Overflow-safe logistic.
inline double sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double soft_threshold(double score, double gamma, double s) {
    return sigmoid(s * (score - gamma));
}

// Per-gamma reductions of soft predictions p_ik = sigmoid(s*(score_i - gamma_k)):
//   weighted[k] = sum_i p_ik * label_i
//   total[k]    = sum_i p_ik
struct GammaSums {
    std::vector<double> weighted;
    std::vector<double> total;
};

GammaSums gamma_sums(std::span<const double> scores, std::span<const double> labels,
                     std::span<const double> gammas, double s);

// Backward pass of gamma_sums composed with any per-gamma objective whose
// per-unit derivative is affine in the label:
//   out[i] = sum_k (coeff_label[k]*label_i + coeff_unit[k]) * s * p_ik * (1 - p_ik)
// Overwrites out.
void gamma_upstream(std::span<const double> scores, std::span<const double> labels,
                    std::span<const double> gammas, double s,
                    std::span<const double> coeff_label, std::span<const double> coeff_unit,
                    std::span<double> out);

// Group mean aggregation. Group b holds member_index[group_offsets[b] .. group_offsets[b+1]).
// out_means[b] = mean of scores over members.
void group_means(std::span<const double> scores, std::span<const std::size_t> member_index,
                 std::span<const std::size_t> group_offsets, std::span<double> out_means);

// Backward of group_means: out[member] += group_upstream[b] / |group b|.
// Zeroes out first; every instance belongs to at most one group.
void group_scatter(std::span<const double> group_upstream,
                   std::span<const std::size_t> member_index,
                   std::span<const std::size_t> group_offsets, std::span<double> out);

// Plain serial implementations, kept as the comparison oracle for the
// parallel versions above.
namespace reference {
GammaSums gamma_sums(std::span<const double> scores, std::span<const double> labels,
                     std::span<const double> gammas, double s);
void gamma_upstream(std::span<const double> scores, std::span<const double> labels,
                    std::span<const double> gammas, double s,
                    std::span<const double> coeff_label, std::span<const double> coeff_unit,
                    std::span<double> out);
void group_means(std::span<const double> scores, std::span<const std::size_t> member_index,
                 std::span<const std::size_t> group_offsets, std::span<double> out_means);
void group_scatter(std::span<const double> group_upstream,
                   std::span<const std::size_t> member_index,
                   std::span<const std::size_t> group_offsets, std::span<double> out);
}  // namespace reference

}  // namespace weasl::kernels
