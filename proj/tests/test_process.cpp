#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cpm/parallel.hpp"
#include "cpm/process.hpp"
#include "cpm/stats.hpp"
#include "doctest.h"

using namespace cpm;

namespace {

const Geometry kE2 = Geometry::euclidean(2);
const Window kUnitSquare = Window::box(kE2, {0.0, 0.0}, {1.0, 1.0});

ClusterKernel dirac_point_kernel() {
    // one cluster point exactly at the centre
    ClusterKernel k;
    k.placement = PlacementMap::translation(kE2);
    k.parent.size = SizeDistribution::fixed(1);
    k.parent.component.kind = ComponentModel::Kind::DiracOffset;
    k.parent.component.dim = 2;
    return k;
}

}  // namespace

TEST_CASE("zero-intensity centres give the empty marked configuration") {
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 0.0)),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(1), 0.1));
    RandomStream rng(1);
    for (int i = 0; i < 20; ++i) {
        CHECK(sample_marked(model, rng).pairs.empty());
        CHECK(sample_cluster_process(model, rng).empty());
    }
}

TEST_CASE("lattice centre with a fixed-size kernel has deterministic structure") {
    const auto centres =
        CentreProcess::lattice(kUnitSquare, {Point{kE2, {0.5, 0.5}}});
    const auto model = ClusterProcessModel::make(
        centres, ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(2), 0.05));
    RandomStream rng(2);
    for (int i = 0; i < 50; ++i) {
        const MarkedConfiguration m = sample_marked(model, rng);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.pairs[0].centre.x == Vec{0.5, 0.5});
        CHECK(m.pairs[0].cluster.size() == 2);
    }
}

TEST_CASE("total cluster points follow the product of means") {
    // E N_total = E #centres * E cluster size, centres on the dilated window
    const auto kernel =
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::poisson(3.0), 0.05);
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 10.0)), kernel);
    const double dilated_area = model.dilated_window().volume();

    const RandomStream rng(3);
    const auto totals = run_replicas(10000, rng, [&](std::size_t, RandomStream& local) {
        return static_cast<double>(sample_marked(model, local).total_points());
    });
    const auto est = estimate_of(totals);
    CHECK(std::abs(est.value - 30.0 * dilated_area) < 3.0 * est.std_error);
}

TEST_CASE("projection unpacks, crops, and preserves multiplicity") {
    MarkedConfiguration m;
    m.window = kUnitSquare;
    CHECK(project(m).empty());

    const Point inside1{kE2, {0.25, 0.5}};
    const Point inside2{kE2, {0.75, 0.5}};
    const Point outside{kE2, {1.5, 0.5}};
    m.pairs.push_back({Point{kE2, {0.2, 0.2}}, {inside1, inside2}});
    CHECK(project(m).size() == 2);

    m.pairs.push_back({Point{kE2, {0.8, 0.8}}, {inside1, outside}});
    const Configuration cropped = project(m);
    CHECK(cropped.size() == 3);  // duplicate of inside1 kept, outside dropped

    // size additivity before cropping
    const Configuration full = project_uncropped(m);
    CHECK(full.size() == m.total_points());
    CHECK(full.size() == 4);
}

TEST_CASE("degenerate single-point clusters reproduce the centre law") {
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 50.0)),
        dirac_point_kernel());
    CHECK(model.cluster_range == 0.0);

    // shared seed: outputs equal the centre draw itself
    RandomStream a(4), b(4);
    const Configuration via_clusters = sample_cluster_process(model, a);
    const Configuration plain = sample_centres_on(model.centres, kUnitSquare, b);
    REQUIRE(via_clusters.size() == plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i)
        CHECK(via_clusters.points[i].x == plain.points[i].x);

    // law: Poisson counts
    const RandomStream rng(5);
    const auto counts = run_replicas(10000, rng, [&](std::size_t, RandomStream& local) {
        return static_cast<double>(sample_cluster_process(model, local).size());
    });
    const auto est = estimate_of(counts);
    CHECK(std::abs(est.value - 50.0) < 3.0 * est.std_error);

    // Laplace functional against the Poisson closed form
    const TestFunction f = TestFunction::indicator(1.0, Region::box({0.0, 0.0}, {0.5, 0.5}));
    std::vector<Configuration> samples;
    RandomStream lr(6);
    for (int i = 0; i < 10000; ++i) {
        RandomStream local = lr.substream(static_cast<std::uint64_t>(i));
        samples.push_back(sample_cluster_process(model, local));
    }
    const auto lap = empirical_laplace(samples, f);
    const double expected = std::exp(-50.0 * 0.25 * (1.0 - std::exp(-1.0)));
    CHECK(std::abs(lap.value - expected) < 3.0 * lap.std_error);
}

TEST_CASE("lattice centres with tight Gaussian clusters keep the lattice size") {
    std::vector<Point> lattice;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            lattice.push_back(Point{kE2, {0.2 + 0.2 * i, 0.2 + 0.2 * j}});
    const auto model = ClusterProcessModel::make(
        CentreProcess::lattice(kUnitSquare, lattice),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(1), 0.01));
    RandomStream rng(7);
    for (int i = 0; i < 2000; ++i) {
        CHECK(sample_cluster_process(model, rng).size() == 16);
    }
}

TEST_CASE("both sampling pipelines agree: bytes under shared seeds, law under independent ones") {
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 20.0)),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::poisson(3.0), 0.05));

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        RandomStream a(seed), b(seed);
        const Configuration c1 = sample_cluster_process(model, a);
        const Configuration c2 = sample_via_varpi(model, b);
        REQUIRE(c1.size() == c2.size());
        for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1.points[i].x == c2.points[i].x);
    }

    const TestFunction f = TestFunction::indicator(0.7, Region::box({0.1, 0.1}, {0.6, 0.9}));
    const std::size_t n = 10000;
    std::vector<double> s1(n), s2(n);
    const RandomStream rng(8);
    run_replicas(n, rng.substream(1), [&](std::size_t i, RandomStream& local) {
        s1[i] = pair_functional(f, sample_cluster_process(model, local));
        return 0.0;
    });
    run_replicas(n, rng.substream(2), [&](std::size_t i, RandomStream& local) {
        s2[i] = pair_functional(f, sample_via_varpi(model, local));
        return 0.0;
    });

    // two-sample KS at significance 0.001
    const KsResult ks = ks_two_sample(s1, s2);
    CHECK(ks.p_value >= 0.001);

    // Laplace agreement within 3 joint SE
    MeanAccumulator la, lb;
    for (std::size_t i = 0; i < n; ++i) {
        la.add(std::exp(-s1[i]));
        lb.add(std::exp(-s2[i]));
    }
    CHECK(std::abs(z_score(la.estimate(), lb.estimate())) < 3.0);
}

TEST_CASE("properness diagnostics") {
    const Region window_region = Region::box({0.0, 0.0}, {1.0, 1.0});

    SUBCASE("continuous kernels never produce exact duplicates") {
        const auto model = ClusterProcessModel::make(
            CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 10.0)),
            ClusterKernel::translation_gaussian(kE2, SizeDistribution::poisson(3.0), 0.1));
        RandomStream rng(9);
        const PropernessReport report = properness_report(model, window_region, rng, 10000);
        CHECK(report.multiplicity_count == 0);
        CHECK(report.min_pairwise_distance > 0.0);
    }

    SUBCASE("forced collision is detected") {
        const auto centres = CentreProcess::lattice(
            kUnitSquare, {Point{kE2, {0.5, 0.5}}, Point{kE2, {0.5, 0.5}}});
        const auto model = ClusterProcessModel::make(centres, dirac_point_kernel());
        RandomStream rng(10);
        const PropernessReport report = properness_report(model, window_region, rng, 100);
        CHECK(report.multiplicity_count == 100);
        CHECK(report.min_pairwise_distance == 0.0);
    }

    SUBCASE("mean clusters hitting the window matches the intensity mass") {
        const double rate = 15.0;
        const auto model = ClusterProcessModel::make(
            CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, rate)),
            dirac_point_kernel());
        RandomStream rng(11);
        const PropernessReport report = properness_report(model, window_region, rng, 10000);
        // single-point clusters at their centres: a cluster hits B iff its centre is in B
        CHECK(std::abs(report.mean_clusters_hitting.value - rate) <
              3.0 * report.mean_clusters_hitting.std_error);
    }
}

TEST_CASE("moments of the pair functional are finite and stable across replica counts") {
    const auto model = ClusterProcessModel::make(
        CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 20.0)),
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::poisson(2.0), 0.05));
    const TestFunction f = TestFunction::indicator(1.0, Region::box({0.2, 0.2}, {0.8, 0.8}));

    const auto collect = [&](std::uint64_t seed, std::size_t n) {
        std::vector<Configuration> samples;
        RandomStream rng(seed);
        for (std::size_t i = 0; i < n; ++i) {
            RandomStream local = rng.substream(i);
            samples.push_back(sample_cluster_process(model, local));
        }
        return samples;
    };
    const auto small = collect(12, 2000);
    const auto large = collect(13, 8000);
    for (int order : {1, 2}) {
        const auto a = moment_estimate(small, f, order);
        const auto b = moment_estimate(large, f, order);
        CHECK(std::isfinite(a.value));
        CHECK(std::isfinite(b.value));
        CHECK(std::abs(z_score(a, b)) < 3.0);
    }
}

TEST_CASE("cluster range validation") {
    auto kernel = ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(1), 0.1);
    kernel.parent.component.kind = ComponentModel::Kind::UniformBallOffset;
    kernel.parent.component.ball_radius = 0.5;
    const auto centres = CentreProcess::poisson(ReferenceMeasure::constant(kUnitSquare, 5.0));
    CHECK_THROWS(ClusterProcessModel::make(centres, kernel, 0.2));  // below the hard support
    const auto ok = ClusterProcessModel::make(centres, kernel, 0.5);
    CHECK(ok.cluster_range == 0.5);
}
