#pragma once

#include <cstdint>

#include "cpm/common.hpp"

namespace cpm {

/// Counter-free random stream (xoshiro256++) with deterministic substream
/// derivation.  All samplers are hand-rolled so results do not depend on the
/// standard library implementation; given the same seed path the byte stream
/// is reproducible across builds.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Independent stream derived from (this stream's seed, index); safe to
    /// call repeatedly with distinct indices (replicas, nested MC loops).
    RandomStream substream(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform on [0,1).
    double uniform();
    /// Uniform on [a,b).
    double uniform(double a, double b);
    /// Standard normal (polar method).
    double normal();
    double normal(double mean, double sd);
    /// Poisson count, exact for any mean >= 0 (additivity split + product method).
    long poisson(double mean);
    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);
    /// Uniform direction on the unit sphere in R^d (d >= 1).
    Vec unit_vector(int dim);

private:
    std::uint64_t s_[4];
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cpm
