#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cpm/droplet.hpp"
#include "doctest.h"

using namespace cpm;

namespace {

const Geometry kE2 = Geometry::euclidean(2);

DropletQuery translation_query(const Region& shape, const Window& window, double rate = 1.0) {
    return DropletQuery{PlacementMap::translation(kE2), shape,
                        ReferenceMeasure::constant(window, rate)};
}

ClusterProcessModel model_with(const ClusterKernel& kernel, const Window& window,
                               double rate = 1.0, double range = -1.0) {
    const auto centres = CentreProcess::poisson(ReferenceMeasure::constant(window, rate));
    if (range >= 0.0) return ClusterProcessModel::make(centres, kernel, range);
    return ClusterProcessModel::make(centres, kernel);
}

}  // namespace

TEST_CASE("droplet membership for translations") {
    const Region disk = Region::ball(Point{kE2, {0.0, 0.0}}, 1.0);
    const Window w = Window::box(kE2, {-5.0, -5.0}, {5.0, 5.0});
    const auto q = translation_query(disk, w);

    // anchored at the origin the droplet is the shape itself
    CHECK(droplet_contains(q, {0.0, 0.0}, Point{kE2, {0.5, 0.5}}));
    CHECK(!droplet_contains(q, {0.0, 0.0}, Point{kE2, {1.5, 0.0}}));

    // offset w shifts the droplet to B - w
    CHECK(droplet_contains(q, {3.0, 0.0}, Point{kE2, {-3.0, 0.0}}));
    CHECK(droplet_contains(q, {3.0, 0.0}, Point{kE2, {-2.2, 0.5}}));
    CHECK(!droplet_contains(q, {3.0, 0.0}, Point{kE2, {0.0, 0.0}}));
}

TEST_CASE("droplet membership for the group action at the identity") {
    const Geometry g = Geometry::se2_on_r2();
    const Region box = Region::box({-0.5, -0.5}, {0.5, 0.5});
    DropletQuery q{PlacementMap::group_action(), box,
                   ReferenceMeasure::constant(Window::box(g, {-2, -2}, {2, 2}), 1.0)};
    // identity rotation: droplet equals the shape
    CHECK(droplet_contains(q, {0.0, 0.0, 0.0}, Point{g, {0.3, 0.0}}));
    CHECK(!droplet_contains(q, {0.0, 0.0, 0.0}, Point{g, {0.8, 0.0}}));
}

TEST_CASE("droplet-cluster measure: unit disks under Lebesgue") {
    const Region disk = Region::ball(Point{kE2, {0.0, 0.0}}, 1.0);
    const Window w = Window::box(kE2, {-6.0, -6.0}, {6.0, 6.0});
    const auto q = translation_query(disk, w);

    RandomStream rng(1);
    const std::size_t n = 200000;

    // single offset: area pi by translation invariance
    auto m1 = droplet_cluster_measure(q, {{0.7, -0.3}}, rng, n);
    CHECK(!m1.truncated);
    CHECK(std::abs(m1.theta_measure.value - M_PI) < 3.0 * m1.theta_measure.std_error);

    // two offsets far apart: disjoint union, 2 pi
    auto m2 = droplet_cluster_measure(q, {{0.0, 0.0}, {3.0, 0.0}}, rng, n);
    CHECK(std::abs(m2.theta_measure.value - 2.0 * M_PI) < 3.0 * m2.theta_measure.std_error);

    // identical offsets: idempotent union, pi
    auto m3 = droplet_cluster_measure(q, {{1.0, 1.0}, {1.0, 1.0}}, rng, n);
    CHECK(std::abs(m3.theta_measure.value - M_PI) < 3.0 * m3.theta_measure.std_error);

    // droplet reaching beyond the window is flagged
    const Window tight = Window::box(kE2, {-1.0, -1.0}, {1.0, 1.0});
    auto m4 = droplet_cluster_measure(translation_query(disk, tight), {{1.5, 0.0}}, rng, 2000);
    CHECK(m4.truncated);

    CHECK_THROWS(droplet_cluster_measure(q, {{0.0, 0.0}}, rng, 10));  // n_mc too small
}

TEST_CASE("monotone and subadditive in the parent vector") {
    const Region disk = Region::ball(Point{kE2, {0.0, 0.0}}, 0.8);
    const Window w = Window::box(kE2, {-4.0, -4.0}, {4.0, 4.0});
    const auto q = translation_query(disk, w);
    RandomStream rng(2);
    const std::size_t n = 100000;

    ParentVector acc;
    double previous = 0.0;
    double singles = 0.0;
    for (const Vec& offset : {Vec{0.0, 0.0}, Vec{0.5, 0.2}, Vec{-0.4, 0.9}, Vec{2.0, -1.0}}) {
        acc.push_back(offset);
        RandomStream local = rng.substream(acc.size());
        const auto m = droplet_cluster_measure(q, acc, local, n);
        RandomStream single_rng = rng.substream(100 + acc.size());
        const auto s = droplet_cluster_measure(q, {offset}, single_rng, n);
        singles += s.theta_measure.value;
        const double joint_se = 3.0 * (m.theta_measure.std_error + s.theta_measure.std_error);
        CHECK(m.theta_measure.value >= previous - joint_se);           // monotone
        CHECK(m.theta_measure.value <= singles + joint_se);            // subadditive
        previous = m.theta_measure.value;
    }
}

TEST_CASE("mean droplet-cluster measure equals the hitting mass, translation Fubini case") {
    // single uniform-disk offset, Lebesgue reference, box shape: both sides = |B|
    ClusterKernel kernel;
    kernel.placement = PlacementMap::translation(kE2);
    kernel.parent.size = SizeDistribution::fixed(1);
    kernel.parent.component.kind = ComponentModel::Kind::UniformBallOffset;
    kernel.parent.component.dim = 2;
    kernel.parent.component.ball_radius = 1.0;

    const Window w = Window::box(kE2, {-3.0, -3.0}, {3.0, 3.0});
    const Region b = Region::box({-0.5, -0.25}, {0.5, 0.25});  // area 0.5
    const auto model = model_with(kernel, w);

    RandomStream rng(3);
    const SigmaBarCheck check = sigma_bar_check(model, b, rng, 1 << 17);
    CHECK(std::abs(check.z) <= 3.0);
    CHECK(std::abs(check.lhs.value - 0.5) < 3.0 * check.lhs.std_error);
    CHECK(std::abs(check.rhs.value - 0.5) < 3.0 * check.rhs.std_error);
}

TEST_CASE("point-mass parent reduces both routes to the shape mass") {
    ClusterKernel kernel;
    kernel.placement = PlacementMap::translation(kE2);
    kernel.parent.size = SizeDistribution::fixed(1);
    kernel.parent.component.kind = ComponentModel::Kind::DiracOffset;
    kernel.parent.component.dim = 2;

    const Window w = Window::box(kE2, {-2.0, -2.0}, {2.0, 2.0});
    const Region b = Region::ball(Point{kE2, {0.2, 0.1}}, 0.6);
    const double rate = 2.5;
    const auto model = model_with(kernel, w, rate);

    RandomStream rng(4);
    const SigmaBarCheck check = sigma_bar_check(model, b, rng, 1 << 16);
    const double expected = rate * M_PI * 0.36;
    CHECK(std::abs(check.z) <= 3.0);
    CHECK(std::abs(check.lhs.value - expected) < 3.0 * check.lhs.std_error);
}

TEST_CASE("two i.i.d. offsets far apart relative to the shape give twice its mass") {
    // offsets spread over a disk of radius 2, shape of diameter 0.28: the two
    // component droplets overlap with probability ~2%, so the union mass sits
    // at 2|B| up to a sub-tolerance bias
    ClusterKernel kernel;
    kernel.placement = PlacementMap::translation(kE2);
    kernel.parent.size = SizeDistribution::fixed(2);
    kernel.parent.component.kind = ComponentModel::Kind::UniformBallOffset;
    kernel.parent.component.dim = 2;
    kernel.parent.component.ball_radius = 2.0;

    const Window w = Window::box(kE2, {-2.5, -2.5}, {2.5, 2.5});
    const Region b = Region::box({-0.1, -0.1}, {0.1, 0.1});  // area 0.04
    const auto model = model_with(kernel, w);

    RandomStream rng(5);
    const SigmaBarCheck check = sigma_bar_check(model, b, rng, 1 << 18);
    CHECK(std::abs(check.z) <= 3.0);
    CHECK(std::abs(check.rhs.value - 0.08) < 3.0 * check.rhs.std_error + 0.002);
    CHECK(std::abs(check.lhs.value - 0.08) < 3.0 * check.lhs.std_error + 0.002);
}

TEST_CASE("sigma-bar identity across placement variants") {
    RandomStream rng(6);

    SUBCASE("group action") {
        ClusterKernel kernel;
        kernel.placement = PlacementMap::group_action();
        kernel.parent.size = SizeDistribution::poisson(2.0);
        kernel.parent.component.kind = ComponentModel::Kind::Se2Rotation;
        kernel.parent.component.angle_uniform = true;
        kernel.parent.component.rot_centre_mean = {0.0, 0.0};
        kernel.parent.component.rot_centre_sigma = 0.4;
        const Geometry g = Geometry::se2_on_r2();
        const Window w = Window::box(g, {-1.0, -1.0}, {1.0, 1.0});
        const Region b = Region::ball(Point{g, {0.0, 0.0}}, 0.5);
        const auto model = ClusterProcessModel::make(
            CentreProcess::poisson(ReferenceMeasure::constant(w, 1.0)), kernel);
        const SigmaBarCheck check = sigma_bar_check(model, b, rng, 1 << 16);
        CHECK(std::abs(check.z) <= 3.0);
    }

    SUBCASE("geodesic transport on the hyperbolic plane") {
        const Geometry h = Geometry::hyperbolic2();
        ClusterKernel kernel;
        kernel.placement = PlacementMap::geodesic_transport(origin(h));
        kernel.parent.size = SizeDistribution::fixed(2);
        kernel.parent.component.kind = ComponentModel::Kind::TangentGaussian;
        kernel.parent.component.dim = 2;
        kernel.parent.component.sigma = 0.3;
        const Window w = Window::metric_ball(origin(h), 2.0);
        const Region b = Region::ball(exp_map(origin(h), make_tangent(origin(h), {0.0, 0.5, 0.0})),
                                      0.4);
        const auto model = ClusterProcessModel::make(
            CentreProcess::poisson(ReferenceMeasure::constant(w, 1.0)), kernel);
        const SigmaBarCheck check = sigma_bar_check(model, b, rng, 1 << 16);
        CHECK(std::abs(check.z) <= 3.0);
    }

    SUBCASE("radial-angular") {
        ClusterKernel kernel;
        kernel.placement = PlacementMap::radial_angular(kE2);
        kernel.parent.size = SizeDistribution::fixed(2);
        kernel.parent.component.kind = ComponentModel::Kind::Radius;
        kernel.parent.component.radius_lo = 0.3;
        kernel.parent.component.radius_hi = 0.9;
        const Window w = Window::box(kE2, {-2.0, -2.0}, {2.0, 2.0});
        const Region b = Region::box({-0.3, -0.3}, {0.3, 0.3});
        const auto model = model_with(kernel, w);
        const SigmaBarCheck check = sigma_bar_check(model, b, rng, 1 << 16);
        CHECK(std::abs(check.z) <= 3.0);
    }
}

TEST_CASE("condition probe: droplet mass bound and mean size") {
    // translation with Lebesgue reference: theta(D_B(w)) = |B| for every w
    const auto kernel =
        ClusterKernel::translation_gaussian(kE2, SizeDistribution::poisson(3.0), 0.2);
    const Window w = Window::box(kE2, {-3.0, -3.0}, {3.0, 3.0});
    const Region b = Region::box({-0.5, -0.5}, {0.5, 0.5});
    const auto model = model_with(kernel, w);

    RandomStream rng(7);
    const ConditionProbe probe = condition_probe(model, b, rng, 40);
    CHECK(probe.sup_droplet_measure_lower_bound == doctest::Approx(1.0).epsilon(0.075));
    CHECK(std::abs(probe.mean_cluster_size.value - 3.0) < 4.0 * probe.mean_cluster_size.std_error);

    // empty clusters
    auto empty_kernel = ClusterKernel::translation_gaussian(kE2, SizeDistribution::fixed(0), 0.2);
    RandomStream rng2(8);
    const ConditionProbe p0 = condition_probe(model_with(empty_kernel, w), b, rng2, 30);
    CHECK(p0.mean_cluster_size.value == 0.0);
    CHECK(p0.sup_droplet_measure_lower_bound == 0.0);
}
