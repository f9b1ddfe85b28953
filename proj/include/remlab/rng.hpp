#pragma once

// Counter-based random numbers. Every value is a pure function of
// (key, counter), so landscapes and Monte Carlo streams can be evaluated in
// any order, on any number of workers, with bit-identical results.

#include <cstdint>

namespace remlab::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t domain) noexcept
{
    return mix64(mix64(seed + kGolden) ^ (domain * 0xd1b54a32d192ed03ull));
}

// Word `lane` of block `counter` under `key`.
constexpr std::uint64_t block_word(std::uint64_t key, std::uint64_t counter,
                                   std::uint64_t lane) noexcept
{
    return mix64(mix64(counter ^ key) + (2 * lane + 1) * kGolden);
}

// Uniform on the open interval (0, 1) with 53-bit resolution.
constexpr double open_unit(std::uint64_t word) noexcept
{
    // k + 0.5 rounds up to 2^53 for the top word; clamp below 1.
    const double u = (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
    return u < 1.0 ? u : 0x1.fffffffffffffp-1;
}

// Inverse of the standard normal CDF (Wichura, AS 241 PPND16).
// Relative accuracy about 1e-16 on (0, 1).
double normal_quantile(double p);

// Standard normal deviate keyed on (key, counter). The magnitude comes from
// the lower half of the quantile function and the sign from an independent
// word, so the law is exactly symmetric.
double standard_normal(std::uint64_t key, std::uint64_t counter);

// Sequential view of a counter-based stream: (master seed, stream index)
// selects the key, successive draws advance the counter.
class Stream
{
  public:
    Stream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : key_(derive_key(master_seed, stream_index + 1)), counter_(0)
    {
    }

    std::uint64_t next_u64() noexcept { return block_word(key_, counter_++, 0); }

    double uniform() noexcept { return open_unit(next_u64()); }

    // Exponential waiting time with the given rate.
    double exponential(double rate);

    // Uniform integer in [0, bound), bound > 0 (Lemire's method with rejection).
    std::uint64_t below(std::uint64_t bound);

    // Uniform integer with `bits` random low bits (bits <= 64).
    std::uint64_t bits(int bits) noexcept
    {
        return bits == 0 ? 0 : next_u64() >> (64 - bits);
    }

    std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace remlab::rng
