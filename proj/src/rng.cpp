#include "gqc/rng.hpp"

#include <cmath>
#include <limits>

namespace gqc {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

long RandomStream::binomial(long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);

    const double np = static_cast<double>(n) * p;
    if (np < 14.0) {
        // BINV: sequential inversion of the CDF.
        const double q = 1.0 - p;
        const double s = p / q;
        const double a = static_cast<double>(n + 1) * s;
        const double r0 = std::pow(q, static_cast<double>(n));
        for (;;) {
            double u = uniform();
            double r = r0;
            long x = 0;
            while (u > r) {
                u -= r;
                ++x;
                if (x > n) break; // rounding fell off the tail; redraw
                r *= (a / static_cast<double>(x) - s);
            }
            if (x <= n) return x;
        }
    }

    // BTRS transformed rejection (Hoermann 1993).
    const double q = 1.0 - p;
    const double spq = std::sqrt(np * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = np + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const long m = static_cast<long>(std::floor((n + 1) * p));
    const double h = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0);

    for (;;) {
        const double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + c));
        if (k < 0 || k > n) continue;
        if (us >= 0.07 && v <= v_r) return k;
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                     (k - m) * lpq)
            return k;
    }
}

std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

RandomStream substream(std::uint64_t master_seed, std::string_view label,
                       std::uint64_t counter) {
    std::uint64_t x = master_seed;
    std::uint64_t a = splitmix64(x) ^ hash_label(label);
    std::uint64_t b = splitmix64(a) ^ (counter * 0xD1342543DE82EF95ULL + 1);
    return RandomStream(splitmix64(b));
}

} // namespace gqc
