#pragma once

#include <cstddef>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weasl::parallel {

// Thread budget for the kernels. 0 = hardware default. Every reduction in
// this project combines fixed per-block partials in block order, so results
// are bit-identical for any thread count, including 1.
void set_threads(int n);
int threads();

// Fixed blocking: block boundaries depend only on n, never on the thread
// count or schedule.
inline constexpr std::size_t kMinBlock = 1024;
inline constexpr std::size_t kMaxBlocks = 256;

inline std::size_t block_count(std::size_t n) {
    if (n == 0) return 0;
    std::size_t blocks = (n + kMinBlock - 1) / kMinBlock;
    return blocks > kMaxBlocks ? kMaxBlocks : blocks;
}

struct BlockRange {
    std::size_t begin;
    std::size_t end;
};

inline BlockRange block_range(std::size_t n, std::size_t block, std::size_t blocks) {
    return {n * block / blocks, n * (block + 1) / blocks};
}

namespace detail {
bool use_openmp(std::size_t blocks);
}

// fn(block_index, begin, end) for each block; blocks may run concurrently.
template <typename Fn>
void for_blocks(std::size_t n, Fn&& fn) {
    const std::size_t blocks = block_count(n);
    if (blocks == 0) return;
#ifdef _OPENMP
    if (detail::use_openmp(blocks)) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads())
        for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
            const auto r = block_range(n, static_cast<std::size_t>(b), blocks);
            fn(static_cast<std::size_t>(b), r.begin, r.end);
        }
        return;
    }
#endif
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto r = block_range(n, b, blocks);
        fn(b, r.begin, r.end);
    }
}

// fn(i) for i in [0, n); independent writes only.
template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn) {
    for_blocks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

// Deterministic sum of fn(i): serial accumulation inside each block, block
// partials combined in block order.
template <typename Fn>
double sum_indexed(std::size_t n, Fn&& fn) {
    const std::size_t blocks = block_count(n);
    if (blocks == 0) return 0.0;
    std::vector<double> partial(blocks, 0.0);
    for_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += fn(i);
        partial[b] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

// Deterministic accumulation of dim-length contributions: fn(i, acc) adds
// instance i into acc; per-block buffers are combined in block order.
template <typename Fn>
void accumulate_indexed(std::size_t n, std::size_t dim, double* out, Fn&& fn) {
    std::memset(out, 0, dim * sizeof(double));
    const std::size_t blocks = block_count(n);
    if (blocks == 0) return;
    std::vector<double> partial(blocks * dim, 0.0);
    for_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double* acc = partial.data() + b * dim;
        for (std::size_t i = begin; i < end; ++i) fn(i, acc);
    });
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* acc = partial.data() + b * dim;
        for (std::size_t d = 0; d < dim; ++d) out[d] += acc[d];
    }
}

}  // namespace weasl::parallel
