// Seeded randomness: the streams must be portable, so the outputs are pinned
// against the canonical SplitMix64 sequence, not just self-consistent.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "weasl/rng.hpp"

using namespace weasl;

TEST_CASE("stream reproduces the canonical splitmix64 sequence") {
    rng::Stream a(0);
    CHECK(a.next_u64() == 0xE220A8397B1DCDAFull);
    CHECK(a.next_u64() == 0x6E789E6AA1B965F4ull);
    CHECK(a.next_u64() == 0x06C45D188009454Full);

    rng::Stream b(42);
    CHECK(b.next_u64() == 0xBDD732262FEB6E95ull);
    CHECK(b.next_u64() == 0x28EFE333B266F103ull);
}

TEST_CASE("same seed, same stream; different seed, different stream") {
    rng::Stream a(123), b(123), c(124);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t va = a.next_u64();
        all_equal &= va == b.next_u64();
        any_diff |= va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derive separates child streams and is order-sensitive") {
    const std::uint64_t k = 987654321;
    CHECK(rng::derive(k, 1) != rng::derive(k, 2));
    CHECK(rng::derive(k, 1) != k);
    CHECK(rng::derive(rng::derive(k, 1), 2) != rng::derive(rng::derive(k, 2), 1));
    // Deterministic.
    CHECK(rng::derive(k, 7) == rng::derive(k, 7));
}

TEST_CASE("next_unit stays in [0,1) and fills the range") {
    rng::Stream s(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("next_below is in range and roughly uniform") {
    rng::Stream s(11);
    const std::uint64_t n = 10;
    std::vector<int> counts(n, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const std::uint64_t v = s.next_below(n);
        REQUIRE(v < n);
        ++counts[v];
    }
    // Expected 10000 per bucket; 5 sigma of a binomial is ~474.
    for (int c : counts) {
        CHECK(c > 10000 - 500);
        CHECK(c < 10000 + 500);
    }
}

TEST_CASE("next_normal has standard moments") {
    rng::Stream s(13);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = s.next_normal();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // 5 sigma bounds: sd(mean) = 1/sqrt(n), sd(var) ~ sqrt(2/n).
    CHECK(std::abs(mean) < 5.0 / std::sqrt(double(n)));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("shuffle permutes, depends on seed, and is reproducible") {
    std::vector<std::size_t> v(50);
    std::iota(v.begin(), v.end(), std::size_t{0});
    auto a = v, b = v;

    rng::Stream s1(99), s2(99), s3(100);
    rng::shuffle(std::span<std::size_t>(a), s1);
    rng::shuffle(std::span<std::size_t>(b), s2);
    CHECK(a == b);

    auto c = v;
    rng::shuffle(std::span<std::size_t>(c), s3);
    CHECK(a != c);

    std::sort(a.begin(), a.end());
    CHECK(a == v);
}
