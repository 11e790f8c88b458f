#pragma once

#include <cstdint>
#include <string_view>

namespace gqc {

// Deterministic pseudo-random stream. Every stochastic call site in the
// project derives its own stream from (master seed, call-path label, counter),
// so whole runs are reproducible and resumable without carrying engine state.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();

    // Standard normal (polar Box-Muller).
    double normal();

    // Binomial(n, p) draw. BINV inversion for small n*p, BTRS rejection
    // otherwise; both are exact samplers.
    long binomial(long n, double p);

  private:
    std::uint64_t state_[4]; // xoshiro256**
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable 64-bit hash of a label string (FNV-1a).
std::uint64_t hash_label(std::string_view label);

// Substream derivation: mixes (seed, label hash, counter) through SplitMix64.
RandomStream substream(std::uint64_t master_seed, std::string_view label,
                       std::uint64_t counter = 0);

} // namespace gqc
