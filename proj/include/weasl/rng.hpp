#pragma once

#include <cstdint>
#include <span>

namespace weasl::rng {

// All randomness in the library derives from SplitMix64 counter streams.
// The generator, the distributions below, and the shuffle are spelled out
// here (rather than using std:: distributions, whose output is
// implementation-defined) so that seeded outputs are identical across
// platforms and compilers.

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Derives an independent child stream key from a parent key and a salt.
inline std::uint64_t derive(std::uint64_t key, std::uint64_t salt) {
    return mix64(key ^ mix64(salt * kGamma + 0x5851F42D4C957F2Dull));
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n); unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double next_normal();

    bool next_bernoulli(double p) { return next_unit() < p; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Fisher-Yates, high index down.
template <typename T>
void shuffle(std::span<T> values, Stream& stream) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.next_below(i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace weasl::rng
