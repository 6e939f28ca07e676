#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cpm/centres.hpp"
#include "cpm/estimate.hpp"
#include "cpm/parallel.hpp"
#include "doctest.h"

using namespace cpm;

namespace {

const Geometry kE2 = Geometry::euclidean(2);
const Window kUnitSquare = Window::box(kE2, {0.0, 0.0}, {1.0, 1.0});

std::size_t count_in(const Configuration& cfg, const Region& region) {
    std::size_t n = 0;
    for (const auto& p : cfg.points)
        if (region.contains(p)) ++n;
    return n;
}

}  // namespace

TEST_CASE("homogeneous Poisson mean count") {
    const auto process = CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 50.0));
    const RandomStream rng(1);
    const auto counts = run_replicas(10000, rng, [&](std::size_t, RandomStream& local) {
        return static_cast<double>(sample_centres(process, local).size());
    });
    const auto est = estimate_of(counts);
    CHECK(std::abs(est.value - 50.0) < 3.0 * std::sqrt(50.0 / 10000.0));
}

TEST_CASE("zero intensity gives the empty configuration") {
    const auto process = CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 0.0));
    RandomStream rng(2);
    for (int i = 0; i < 50; ++i) CHECK(sample_centres(process, rng).empty());
}

TEST_CASE("lattice centres are returned exactly, duplicates preserved") {
    const std::vector<Point> pts = {Point{kE2, {0.0, 0.0}}, Point{kE2, {1.0, 0.0}},
                                    Point{kE2, {1.0, 0.0}}};
    const auto process = CentreProcess::lattice(kUnitSquare, pts);
    RandomStream rng(3);
    for (int i = 0; i < 20; ++i) {
        const Configuration cfg = sample_centres(process, rng);
        REQUIRE(cfg.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) CHECK(cfg.points[k].x == pts[k].x);
    }
}

TEST_CASE("counts in disjoint regions are uncorrelated") {
    const auto process = CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 30.0));
    const Region left = Region::box({0.0, 0.0}, {0.5, 1.0});
    const Region right = Region::box({0.5, 0.0}, {1.0, 1.0});

    const RandomStream rng(4);
    const std::size_t n = 10000;
    std::vector<double> a(n), b(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        const Configuration cfg = sample_centres(process, local);
        a[i] = static_cast<double>(count_in(cfg, left));
        b[i] = static_cast<double>(count_in(cfg, right));
        return 0.0;
    });
    MeanAccumulator ma, mb;
    for (std::size_t i = 0; i < n; ++i) {
        ma.add(a[i]);
        mb.add(b[i]);
    }
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) cov += (a[i] - ma.mean()) * (b[i] - mb.mean());
    cov /= static_cast<double>(n - 1);
    const double corr = cov / std::sqrt(ma.variance() * mb.variance());
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("inhomogeneous thinning: linear intensity integrates to the mean") {
    // lambda(x) = 100 x1 on the unit square: total mass 50
    const auto ref = ReferenceMeasure::with_intensity(
        kUnitSquare, [](const Point& p) { return 100.0 * p.x[0]; }, 100.0);
    const auto process = CentreProcess::poisson(ref);
    const RandomStream rng(5);
    const auto counts = run_replicas(10000, rng, [&](std::size_t, RandomStream& local) {
        return static_cast<double>(sample_centres(process, local).size());
    });
    const auto est = estimate_of(counts);
    CHECK(std::abs(est.value - 50.0) < 3.0 * est.std_error);

    // more points where the intensity is higher
    RandomStream r2(6);
    std::size_t low = 0, high = 0;
    for (int i = 0; i < 400; ++i) {
        const Configuration cfg = sample_centres(process, r2);
        low += count_in(cfg, Region::box({0.0, 0.0}, {0.5, 1.0}));
        high += count_in(cfg, Region::box({0.5, 0.0}, {1.0, 1.0}));
    }
    CHECK(high > low);
}

TEST_CASE("intensity exceeding its declared bound is a hard error") {
    const auto ref = ReferenceMeasure::with_intensity(
        kUnitSquare, [](const Point&) { return 2.0; }, 1.0);
    const auto process = CentreProcess::poisson(ref);
    RandomStream rng(7);
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 200; ++i) sample_centres(process, rng);
        }(),
        std::invalid_argument);
}

TEST_CASE("Gibbs chain with zero potential is Poisson") {
    GibbsSpec spec;
    spec.potential = [](const Point&, const Point&) { return 0.0; };
    spec.sweeps = 200;
    const auto process =
        CentreProcess::gibbs(ReferenceMeasure::constant(kUnitSquare, 25.0), spec);

    const RandomStream rng(8);
    const std::size_t n = 2000;
    std::vector<double> counts(n), laplace(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        const Configuration cfg = sample_centres(process, local);
        counts[i] = static_cast<double>(cfg.size());
        laplace[i] =
            std::exp(-static_cast<double>(count_in(cfg, Region::box({0.0, 0.0}, {0.5, 0.5}))));
        return 0.0;
    });
    const auto mean_count = estimate_of(counts);
    CHECK(std::abs(mean_count.value - 25.0) < 3.0 * mean_count.std_error);

    // Laplace functional of the restriction: exp(-lambda |B| (1 - 1/e))
    const double expected = std::exp(-25.0 * 0.25 * (1.0 - std::exp(-1.0)));
    const auto lap = estimate_of(laplace);
    CHECK(std::abs(lap.value - expected) < 3.0 * lap.std_error);
}

TEST_CASE("hard-core Gibbs output never violates the exclusion radius") {
    const double r = 0.08;
    GibbsSpec spec;
    spec.potential = hard_core_potential(r);
    spec.sweeps = 150;
    const auto process =
        CentreProcess::gibbs(ReferenceMeasure::constant(kUnitSquare, 40.0), spec);

    RandomStream rng(9);
    for (int k = 0; k < 30; ++k) {
        const Configuration cfg = sample_centres(process, rng);
        for (std::size_t i = 0; i < cfg.size(); ++i)
            for (std::size_t j = i + 1; j < cfg.size(); ++j)
                CHECK(distance(cfg.points[i], cfg.points[j]) >= r);
    }
}

TEST_CASE("repulsive Strauss potential suppresses short-range pairs") {
    const double r = 0.1;
    GibbsSpec spec;
    spec.potential = strauss_potential(r, 4.0);
    spec.sweeps = 150;
    const auto theta = ReferenceMeasure::constant(kUnitSquare, 40.0);
    const auto gibbs = CentreProcess::gibbs(theta, spec);
    const auto poisson = CentreProcess::poisson(theta);

    const RandomStream rng(10);
    const std::size_t n = 600;
    std::vector<double> close_gibbs(n), close_poisson(n);
    run_replicas(n, rng, [&](std::size_t i, RandomStream& local) {
        const auto pairs_within = [&](const Configuration& cfg) {
            double c = 0.0;
            for (std::size_t a = 0; a < cfg.size(); ++a)
                for (std::size_t b = a + 1; b < cfg.size(); ++b)
                    if (distance(cfg.points[a], cfg.points[b]) < r) c += 1.0;
            return c;
        };
        close_gibbs[i] = pairs_within(sample_centres(gibbs, local));
        RandomStream other = local.substream(77);
        close_poisson[i] = pairs_within(sample_centres(poisson, other));
        return 0.0;
    });
    const auto g = estimate_of(close_gibbs);
    const auto p = estimate_of(close_poisson);
    // empirical short-range pair correlation well below 1
    CHECK(g.value < p.value);
    CHECK(z_score(g, p) < -3.0);
}

TEST_CASE("gibbs_step preserves the window and rejects non-Gibbs processes") {
    const auto poisson = CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 10.0));
    RandomStream rng(11);
    Configuration state = sample_centres(poisson, rng);
    CHECK_THROWS(gibbs_step(state, poisson, rng));

    GibbsSpec spec;
    spec.potential = [](const Point&, const Point&) { return 0.0; };
    const auto gibbs = CentreProcess::gibbs(ReferenceMeasure::constant(kUnitSquare, 10.0), spec);
    for (int i = 0; i < 50; ++i) {
        state = gibbs_step(std::move(state), gibbs, rng);
        for (const auto& p : state.points) CHECK(kUnitSquare.contains(p));
    }
}
