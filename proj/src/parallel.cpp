#include "cpm/parallel.hpp"

#ifdef CPM_HAVE_OPENMP
#include <omp.h>
#endif

namespace cpm {

std::vector<double> run_replicas_serial(std::size_t n, const RandomStream& rng,
                                        const ReplicaFn& fn) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream local = rng.substream(i);
        out[i] = fn(i, local);
    }
    return out;
}

std::vector<double> run_replicas(std::size_t n, const RandomStream& rng, const ReplicaFn& fn) {
#ifdef CPM_HAVE_OPENMP
    std::vector<double> out(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) {
        RandomStream local = rng.substream(static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i), local);
    }
    return out;
#else
    return run_replicas_serial(n, rng, fn);
#endif
}

void set_thread_count(int threads) {
#ifdef CPM_HAVE_OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int thread_count() {
#ifdef CPM_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace cpm
