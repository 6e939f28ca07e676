#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cpm/rng.hpp"

namespace cpm {

/// Replica kernel: maps (replica index, its private random stream) to a value.
using ReplicaFn = std::function<double(std::size_t, RandomStream&)>;

/// Runs `fn` for replicas 0..n-1, each on rng.substream(i).  The OpenMP
/// variant writes results by index, so the output is identical to the serial
/// reference for every thread count.
std::vector<double> run_replicas(std::size_t n, const RandomStream& rng, const ReplicaFn& fn);

/// Serial reference implementation with the identical seeding scheme.
std::vector<double> run_replicas_serial(std::size_t n, const RandomStream& rng,
                                        const ReplicaFn& fn);

/// Caps the OpenMP thread pool; 0 restores the default.
void set_thread_count(int threads);
int thread_count();

}  // namespace cpm
