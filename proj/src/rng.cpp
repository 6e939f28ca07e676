#include "cpm/rng.hpp"

#include <cmath>

namespace cpm {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

RandomStream RandomStream::substream(std::uint64_t index) const {
    // Mix (seed, index) through splitmix so substreams of distinct indices
    // and substreams of distinct parents never collide in practice.
    std::uint64_t sm = seed_ ^ 0xd1342543de82ef95ULL;
    std::uint64_t mixed = splitmix64(sm) ^ (index * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL);
    return RandomStream(splitmix64(mixed));
}

std::uint64_t RandomStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double a, double b) {
    return a + (b - a) * uniform();
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
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

double RandomStream::normal(double mean, double sd) {
    return mean + sd * normal();
}

long RandomStream::poisson(double mean) {
    require(mean >= 0.0, "poisson: mean must be nonnegative");
    long n = 0;
    // Split large means into chunks; counts add by Poisson additivity.
    while (mean > 10.0) {
        double l = std::exp(-10.0);
        double p = uniform();
        long k = 0;
        while (p > l) {
            ++k;
            p *= uniform();
        }
        n += k;
        mean -= 10.0;
    }
    const double l = std::exp(-mean);
    double p = uniform();
    long k = 0;
    while (p > l) {
        ++k;
        p *= uniform();
    }
    return n + k;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    require(n > 0, "uniform_index: empty range");
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % n;
}

Vec RandomStream::unit_vector(int dim) {
    require(dim >= 1, "unit_vector: dim must be >= 1");
    if (dim == 1) return Vec{uniform() < 0.5 ? -1.0 : 1.0};
    Vec v(dim);
    double n2;
    do {
        for (auto& c : v) c = normal();
        n2 = dot(v, v);
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : v) c *= inv;
    return v;
}

}  // namespace cpm
