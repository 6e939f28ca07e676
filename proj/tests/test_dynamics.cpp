#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cpm/dynamics.hpp"
#include "cpm/parallel.hpp"
#include "doctest.h"

using namespace cpm;

namespace {

const Geometry kE2 = Geometry::euclidean(2);
const Geometry kE1 = Geometry::euclidean(1);

ClusterProcessModel single_point_model(double sigma) {
    // one frozen centre, one Gaussian satellite: the coordinate process is
    // an Ornstein-Uhlenbeck motion with rate 1/sigma^2 and variance sigma^2
    const Window w = Window::box(kE1, {-10.0}, {10.0});
    const auto centres = CentreProcess::lattice(w, {Point{kE1, {0.0}}});
    return ClusterProcessModel::make(
        centres, ClusterKernel::translation_gaussian(kE1, SizeDistribution::fixed(1), sigma));
}

DynamicsConfig config_for(const ClusterProcessModel& model, double dt_factor = 0.01) {
    DynamicsConfig cfg;
    const double sigma2 = sqr(model.kernel.gaussian_sigma());
    cfg.time_step = dt_factor * sigma2;
    cfg.box = model.dilated_window();
    return cfg;
}

}  // namespace

TEST_CASE("zero time step leaves the state unchanged") {
    const auto model = single_point_model(1.0);
    DynamicsConfig cfg = config_for(model);
    cfg.time_step = 0.0;
    RandomStream rng(1);
    const MarkedConfiguration state = sample_marked(model, rng);
    const MarkedConfiguration next = langevin_step(state, model.kernel, cfg, rng);
    REQUIRE(next.pairs.size() == state.pairs.size());
    CHECK(next.pairs[0].cluster[0].x == state.pairs[0].cluster[0].x);
}

TEST_CASE("empty state stays empty") {
    const Window w = Window::box(kE2, {0.0, 0.0}, {1.0, 1.0});
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(w, 0.0)),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(1), 0.1));
    RandomStream rng(2);
    MarkedConfiguration state = sample_marked(model, rng);
    REQUIRE(state.pairs.empty());
    const auto cfg = config_for(model);
    CHECK(langevin_step(state, model.kernel, cfg, rng).pairs.empty());
}

TEST_CASE("the stability bound on the time step is enforced") {
    const auto model = single_point_model(0.1);
    DynamicsConfig cfg = config_for(model);
    cfg.time_step = 0.02 * sqr(0.1);  // above 0.01 sigma^2
    RandomStream rng(3);
    const MarkedConfiguration state = sample_marked(model, rng);
    CHECK_THROWS(langevin_step(state, model.kernel, cfg, rng));
}

TEST_CASE("one Euler step has the discretized mean reversion") {
    const double sigma = 1.0;
    const auto model = single_point_model(sigma);
    const auto cfg = config_for(model);  // dt = 0.01
    const double y0 = 1.7;

    const RandomStream rng(4);
    const std::size_t n = 100000;
    const auto next = run_replicas(n, rng, [&](std::size_t, RandomStream& local) {
        MarkedConfiguration state;
        state.window = model.window();
        state.pairs.push_back({Point{kE1, {0.0}}, {Point{kE1, {y0}}}});
        return langevin_step(state, model.kernel, cfg, local).pairs[0].cluster[0].x[0];
    });
    const auto est = estimate_of(next);
    const double expected = y0 * (1.0 - cfg.time_step / sqr(sigma));
    CHECK(std::abs(est.value - expected) < 3.0 * est.std_error);
}

TEST_CASE("stationary variance matches the kernel variance") {
    const double sigma = 0.1;
    const auto model = single_point_model(sigma);
    const auto cfg = config_for(model);  // dt = 1e-4

    const RandomStream rng(5);
    const std::size_t n = 4000;
    const auto squares = run_replicas(n, rng, [&](std::size_t, RandomStream& local) {
        MarkedConfiguration state = sample_marked(model, local);  // equilibrium start
        for (int step = 0; step < 500; ++step)
            state = langevin_step(state, model.kernel, cfg, local);
        return sqr(state.pairs[0].cluster[0].x[0]);
    });
    const auto est = estimate_of(squares);
    CHECK(std::abs(est.value - sqr(sigma)) < 3.0 * est.std_error);

    // Euler bias against the exact transition is below dt/sigma^2 relative
    const auto exact = run_replicas(n, rng.substream(1), [&](std::size_t, RandomStream& local) {
        MarkedConfiguration state = sample_marked(model, local);
        Point y = state.pairs[0].cluster[0];
        const Point centre = state.pairs[0].centre;
        for (int step = 0; step < 500; ++step)
            y = ou_exact_step(centre, y, sigma, cfg.time_step, local);
        return sqr(y.x[0]);
    });
    const auto exact_est = estimate_of(exact);
    const double rel = std::abs(est.value - exact_est.value) / exact_est.value;
    const double stat_slack =
        3.0 * std::sqrt(sqr(est.std_error) + sqr(exact_est.std_error)) / exact_est.value;
    CHECK(rel < cfg.time_step / sqr(sigma) + stat_slack);
}

TEST_CASE("deterministic start relaxes along the exact exponential") {
    const double sigma = 0.5;
    const double y0 = 5.0 * sigma;
    const double dt = 0.01 * sqr(sigma);

    const RandomStream rng(6);
    const std::size_t n = 20000;
    const int records = 6;
    const int stride = 40;
    std::vector<std::vector<double>> rows(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        Point y{kE1, {y0}};
        const Point centre{kE1, {0.0}};
        std::vector<double> row;
        for (int rec = 0; rec < records; ++rec) {
            for (int s = 0; s < stride; ++s) y = ou_exact_step(centre, y, sigma, dt, local);
            row.push_back(y.x[0]);
        }
        rows[i] = std::move(row);
        return 0.0;
    });
    std::vector<MeanAccumulator> acc(records);
    for (const auto& row : rows)
        for (int rec = 0; rec < records; ++rec) acc[rec].add(row[rec]);

    double previous = y0;
    for (int rec = 0; rec < records; ++rec) {
        const double t = (rec + 1.0) * stride * dt;
        const double expected = y0 * std::exp(-t / sqr(sigma));
        CHECK(std::abs(acc[rec].mean() - expected) < 3.0 * acc[rec].std_error());
        CHECK(acc[rec].mean() < previous + 3.0 * acc[rec].std_error());  // monotone decay
        previous = acc[rec].mean();
    }
}

TEST_CASE("equilibrium start has no drift in the recorded series") {
    const Window w = Window::box(kE2, {0.0, 0.0}, {1.0, 1.0});
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(w, 5.0)),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(1), 0.1));
    DynamicsConfig cfg;
    cfg.time_step = 1e-4 * sqr(0.1);  // fine step: integrator bias far below noise
    cfg.n_steps = 300;
    cfg.stride = 10;
    cfg.box = model.dilated_window();
    const TestFunction f = TestFunction::bump(Point{kE2, {0.5, 0.5}}, 0.4, 1.0);

    RandomStream rng(7);
    const StationarityResult res = stationarity_test(model, cfg, f, rng, 400);
    REQUIRE(res.times.size() == 31);
    CHECK(std::abs(res.drift.z) <= 3.0);
}

TEST_CASE("a zero test function produces the zero series") {
    const auto model = single_point_model(0.2);
    DynamicsConfig cfg = config_for(model);
    cfg.n_steps = 50;
    cfg.stride = 10;
    const TestFunction zero = TestFunction::indicator(0.0, Region::box({-1.0}, {1.0}));
    RandomStream rng(8);
    const StationarityResult res = stationarity_test(model, cfg, zero, rng, 50);
    for (double m : res.means) CHECK(m == 0.0);
    CHECK(res.drift.slope == 0.0);
    CHECK(res.drift.z == 0.0);
}

TEST_CASE("the motion is reversible at equilibrium") {
    // E[F1(g_0) F2(g_t)] = E[F2(g_0) F1(g_t)] for the stationary chain
    const Window w = Window::box(kE2, {0.0, 0.0}, {1.0, 1.0});
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(w, 8.0)),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(1), 0.1));
    DynamicsConfig cfg;
    cfg.time_step = 0.01 * sqr(0.1);
    cfg.box = model.dilated_window();

    const TestFunction f1 = TestFunction::bump(Point{kE2, {0.4, 0.5}}, 0.35, 1.0);
    const TestFunction f2 = TestFunction::bump(Point{kE2, {0.6, 0.5}}, 0.3, 0.8);

    const RandomStream rng(9);
    const std::size_t n = 20000;
    std::vector<double> forward(n), backward(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        MarkedConfiguration state = sample_marked(model, local);
        const Configuration start = project_uncropped(state);
        for (int s = 0; s < 100; ++s) state = langevin_step(state, model.kernel, cfg, local);
        const Configuration end = project_uncropped(state);
        const auto value = [](const TestFunction& f, const Configuration& g) {
            double s = 0.0;
            for (const auto& p : g.points) s += f(p);
            return s;
        };
        forward[i] = value(f1, start) * value(f2, end);
        backward[i] = value(f2, start) * value(f1, end);
        return 0.0;
    });
    CHECK(std::abs(z_score(estimate_of(forward), estimate_of(backward))) <= 3.0);
}
