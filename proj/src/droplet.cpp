#include "cpm/droplet.hpp"

#include <algorithm>
#include <cmath>

namespace cpm {

namespace {

// Bounding ball (centre, radius) of a region, in the region's geometry.
std::pair<Point, double> region_bounding_ball(const Region& region, const Geometry& g) {
    if (region.kind == Region::Kind::Ball) return {region.centre, region.radius};
    Vec c(region.lo.size());
    double r2 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = 0.5 * (region.lo[i] + region.hi[i]);
        r2 += sqr(0.5 * (region.hi[i] - region.lo[i]));
    }
    return {Point{g, std::move(c)}, std::sqrt(r2)};
}

bool window_contains_ball(const Window& w, const Point& centre, double radius) {
    if (w.kind == Window::Kind::MetricBall)
        return distance(w.centre, centre) + radius <= w.radius;
    for (std::size_t i = 0; i < w.lo.size(); ++i)
        if (centre.x[i] - radius < w.lo[i] || centre.x[i] + radius > w.hi[i]) return false;
    return true;
}

// Reach of the droplet of one component: every x in D_B(w) lies within this
// ball.  Conservative per placement variant.
std::pair<Point, double> droplet_bound(const PlacementMap& placement, const Region& shape,
                                       const Vec& w) {
    const auto [c, r] = region_bounding_ball(shape, placement.geom);
    switch (placement.kind) {
        case PlacementMap::Kind::Translation: {
            // D_B(w) = B - w
            return {Point{placement.geom, c.x - w}, r};
        }
        case PlacementMap::Kind::GroupAction: {
            // rotation about (w1,w2) preserves distance to the rotation centre
            const Point xi{placement.geom, Vec{w[1], w[2]}};
            return {xi, distance(xi, c) + r};
        }
        case PlacementMap::Kind::GeodesicTransport:
        case PlacementMap::Kind::RadialAngular: {
            // placed point sits at distance |w| (or radius w0) from the centre
            const double reach = placement.kind == PlacementMap::Kind::RadialAngular
                                     ? w[0]
                                     : norm(w);
            return {c, r + reach};
        }
    }
    fail("droplet_bound: unreachable");
}

}  // namespace

bool droplet_contains(const DropletQuery& query, const Vec& w, const Point& x,
                      RandomStream* rng) {
    return query.shape.contains(query.placement.place(x, w, rng));
}

DropletMeasure droplet_cluster_measure(const DropletQuery& query, const ParentVector& w,
                                       RandomStream& rng, std::size_t n_mc) {
    require(n_mc >= 1000, "droplet_cluster_measure: n_mc must be >= 1e3");
    const Window& window = query.reference.window;
    const double vol = window.volume();

    DropletMeasure out;
    for (const auto& comp : w) {
        const auto [c, reach] = droplet_bound(query.placement, query.shape, comp);
        if (!window_contains_ball(window, c, reach)) out.truncated = true;
    }

    MeanAccumulator acc;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const Point x = window.sample_uniform(rng);
        bool hit = false;
        for (const auto& comp : w)
            if (droplet_contains(query, comp, x, &rng)) {
                hit = true;
                break;
            }
        acc.add(hit ? query.reference.intensity(x) : 0.0);
    }
    auto est = acc.estimate();
    est.value *= vol;
    est.std_error *= vol;
    out.theta_measure = est;
    return out;
}

SigmaBarCheck sigma_bar_check(const ClusterProcessModel& model, const Region& shape,
                              RandomStream& rng, std::size_t n_mc) {
    require(n_mc >= 1000, "sigma_bar_check: n_mc must be >= 1e3");
    const Window domain = model.dilated_window();
    const double vol = domain.volume();
    const auto& ref = model.centres.reference;

    DropletQuery query{model.kernel.placement, shape, ref};
    query.reference.window = domain;

    // Direct route: theta x Q mass of {placed cluster hits B}.
    RandomStream lhs_rng = rng.substream(1);
    MeanAccumulator lhs_acc;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const Point x = domain.sample_uniform(lhs_rng);
        const ParentVector w = sample_parent(model.kernel.parent, lhs_rng);
        const ClusterVector y = place_cluster(model.kernel, x, w, &lhs_rng);
        bool hit = false;
        for (const auto& p : y)
            if (shape.contains(p)) {
                hit = true;
                break;
            }
        lhs_acc.add(hit ? ref.intensity(x) : 0.0);
    }
    auto lhs = lhs_acc.estimate();
    lhs.value *= vol;
    lhs.std_error *= vol;

    // Nested route: mean over parent draws of the droplet-cluster measure.
    RandomStream rhs_rng = rng.substream(2);
    const std::size_t inner = 1000;
    const std::size_t outer = std::max<std::size_t>(8, n_mc / inner);
    MeanAccumulator rhs_acc;
    for (std::size_t j = 0; j < outer; ++j) {
        const ParentVector w = sample_parent(model.kernel.parent, rhs_rng);
        RandomStream inner_rng = rhs_rng.substream(j);
        rhs_acc.add(droplet_cluster_measure(query, w, inner_rng, inner).theta_measure.value);
    }
    const auto rhs = rhs_acc.estimate();

    SigmaBarCheck out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.z = z_score(lhs, rhs);
    return out;
}

ConditionProbe condition_probe(const ClusterProcessModel& model, const Region& shape,
                               RandomStream& rng, std::size_t n_samples) {
    require(n_samples >= 1, "condition_probe: need samples");
    const Window domain = model.dilated_window();
    DropletQuery query{model.kernel.placement, shape, model.centres.reference};
    query.reference.window = domain;
    const double vol = domain.volume();

    // One common point pool for every component: the max over components is
    // then a max of comparable estimates, not of independent noise draws.
    const std::size_t pool_size = 200000;
    RandomStream pool_rng = rng.substream(1);
    std::vector<Point> pool;
    std::vector<double> weight;
    pool.reserve(pool_size);
    weight.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) {
        Point x = domain.sample_uniform(pool_rng);
        weight.push_back(query.reference.intensity(x));
        pool.push_back(std::move(x));
    }

    ConditionProbe probe;
    probe.samples = n_samples;
    MeanAccumulator sizes;
    RandomStream parent_rng = rng.substream(2);
    RandomStream angular_rng = rng.substream(3);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const ParentVector w = sample_parent(model.kernel.parent, parent_rng);
        sizes.add(static_cast<double>(w.size()));
        for (const auto& comp : w) {
            double mass = 0.0;
            for (std::size_t k = 0; k < pool_size; ++k)
                if (droplet_contains(query, comp, pool[k], &angular_rng)) mass += weight[k];
            probe.sup_droplet_measure_lower_bound = std::max(
                probe.sup_droplet_measure_lower_bound,
                vol * mass / static_cast<double>(pool_size));
        }
    }
    probe.mean_cluster_size = sizes.estimate();
    return probe;
}

}  // namespace cpm
