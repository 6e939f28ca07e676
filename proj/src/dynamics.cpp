#include "cpm/dynamics.hpp"

#include <cmath>

#include "cpm/parallel.hpp"
#include "cpm/stats.hpp"

namespace cpm {

namespace {

double wrap_coordinate(double x, double lo, double hi) {
    if (x >= lo && x < hi) return x;  // exact no-op inside the box
    const double len = hi - lo;
    double t = std::fmod(x - lo, len);
    if (t < 0.0) t += len;
    return lo + t;
}

// Minimal-image displacement on the periodic box.
Vec periodic_diff(const Vec& a, const Vec& b, const Window& box) {
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double len = box.hi[i] - box.lo[i];
        double t = a[i] - b[i];
        t -= len * std::round(t / len);
        d[i] = t;
    }
    return d;
}

}  // namespace

MarkedConfiguration langevin_step(const MarkedConfiguration& state, const ClusterKernel& kernel,
                                  const DynamicsConfig& cfg, RandomStream& rng) {
    require(kernel.is_translation_gaussian(),
            "langevin_step: translation-Gaussian kernels only");
    require(cfg.box.kind == Window::Kind::Box && cfg.box.geom.flat(),
            "langevin_step: periodic box on a flat backend required");
    const double sigma2 = sqr(kernel.gaussian_sigma());
    require(cfg.time_step <= 0.01 * sigma2 + 1e-300,
            "langevin_step: time step violates the stability bound dt <= 0.01 sigma^2");

    const double dt = cfg.time_step;
    const double noise = std::sqrt(2.0 * dt);
    MarkedConfiguration next = state;
    for (auto& pair : next.pairs) {
        for (auto& y : pair.cluster) {
            const Vec drift = (-1.0 / sigma2) * periodic_diff(y.x, pair.centre.x, cfg.box);
            for (std::size_t i = 0; i < y.x.size(); ++i) {
                const double moved = y.x[i] + drift[i] * dt + noise * rng.normal();
                y.x[i] = wrap_coordinate(moved, cfg.box.lo[i], cfg.box.hi[i]);
            }
        }
    }
    return next;
}

Point ou_exact_step(const Point& centre, const Point& y, double sigma, double dt,
                    RandomStream& rng) {
    const double rate = 1.0 / sqr(sigma);
    const double decay = std::exp(-rate * dt);
    const double sd = std::sqrt(sqr(sigma) * (1.0 - sqr(decay)));
    Vec out(y.x.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = centre.x[i] + (y.x[i] - centre.x[i]) * decay + sd * rng.normal();
    return Point{y.geom, std::move(out)};
}

StationarityResult stationarity_test(const ClusterProcessModel& model, const DynamicsConfig& cfg,
                                     const TestFunction& f, RandomStream& rng,
                                     std::size_t n_replicas) {
    require(n_replicas >= 2, "stationarity_test: need replicas");
    require(cfg.stride >= 1, "stationarity_test: stride must be >= 1");
    const std::size_t n_records = cfg.n_steps / cfg.stride + 1;

    std::vector<std::vector<double>> series(n_replicas);
    run_replicas(n_replicas, rng, [&](std::size_t i, RandomStream& local) {
        MarkedConfiguration state = sample_marked(model, local);
        std::vector<double> row;
        row.reserve(n_records);
        row.push_back(pair_functional(f, project_uncropped(state)));
        for (std::size_t step = 1; step <= cfg.n_steps; ++step) {
            state = langevin_step(state, model.kernel, cfg, local);
            if (step % cfg.stride == 0) row.push_back(pair_functional(f, project_uncropped(state)));
        }
        series[i] = std::move(row);
        return 0.0;
    });

    StationarityResult out;
    out.times.reserve(n_records);
    out.means.reserve(n_records);
    out.std_errors.reserve(n_records);
    for (std::size_t t = 0; t < n_records; ++t) {
        MeanAccumulator acc;
        for (const auto& row : series) acc.add(row[t]);
        const auto est = acc.estimate();
        out.times.push_back(static_cast<double>(t * cfg.stride) * cfg.time_step);
        out.means.push_back(est.value);
        out.std_errors.push_back(est.std_error);
    }

    // The recorded series is autocorrelated within a replica, so the slope
    // variance must come from the independent replicas: fit one slope per
    // replica and average.
    MeanAccumulator slopes;
    for (const auto& row : series) slopes.add(slope_fit(out.times, row).slope);
    out.drift.slope = slopes.mean();
    out.drift.std_error = slopes.std_error();
    out.drift.z = slopes.std_error() == 0.0
                      ? (slopes.mean() == 0.0 ? 0.0 : HUGE_VAL)
                      : slopes.mean() / slopes.std_error();
    return out;
}

}  // namespace cpm
