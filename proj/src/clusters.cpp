#include "cpm/clusters.hpp"

#include <cmath>
#include <numeric>

namespace cpm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double poisson_pmf(int k, double mean) {
    return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

}  // namespace

SizeDistribution SizeDistribution::fixed(int n) {
    require(n >= 0, "size fixed(n): n must be >= 0");
    SizeDistribution s;
    s.kind = Kind::Fixed;
    s.fixed_n = n;
    return s;
}

SizeDistribution SizeDistribution::poisson(double mean, int n_max) {
    require(mean >= 0.0 && n_max >= 1, "size poisson: bad parameters");
    SizeDistribution s;
    s.kind = Kind::Poisson;
    s.poisson_mean = mean;
    s.n_max = n_max;
    return s;
}

SizeDistribution SizeDistribution::explicit_probs(std::vector<double> p) {
    require(!p.empty(), "size explicit: empty vector");
    double total = 0.0;
    for (double v : p) {
        require(v >= 0.0, "size explicit: negative probability");
        total += v;
    }
    require(std::abs(total - 1.0) <= 1e-12, "size explicit: probabilities must sum to 1");
    SizeDistribution s;
    s.kind = Kind::Explicit;
    s.probs = std::move(p);
    return s;
}

int SizeDistribution::sample(RandomStream& rng) const {
    switch (kind) {
        case Kind::Fixed:
            return fixed_n;
        case Kind::Poisson: {
            long n;
            do {
                n = rng.poisson(poisson_mean);
            } while (n > n_max);
            return static_cast<int>(n);
        }
        case Kind::Explicit: {
            double u = rng.uniform();
            for (std::size_t k = 0; k < probs.size(); ++k) {
                u -= probs[k];
                if (u < 0.0) return static_cast<int>(k);
            }
            return static_cast<int>(probs.size()) - 1;
        }
    }
    fail("size sample: unreachable");
}

double SizeDistribution::mean() const {
    switch (kind) {
        case Kind::Fixed:
            return fixed_n;
        case Kind::Poisson: {
            // mean of the conditioned-on-{<= n_max} law
            double num = 0.0, den = 0.0;
            for (int k = 0; k <= n_max; ++k) {
                const double p = poisson_pmf(k, poisson_mean);
                num += k * p;
                den += p;
            }
            return num / den;
        }
        case Kind::Explicit: {
            double m = 0.0;
            for (std::size_t k = 0; k < probs.size(); ++k) m += k * probs[k];
            return m;
        }
    }
    fail("size mean: unreachable");
}

double SizeDistribution::truncation_mass() const {
    if (kind != Kind::Poisson) return 0.0;
    double inside = 0.0;
    for (int k = 0; k <= n_max; ++k) inside += poisson_pmf(k, poisson_mean);
    return std::max(0.0, 1.0 - inside);
}

Vec ComponentModel::sample(RandomStream& rng) const {
    switch (kind) {
        case Kind::GaussianOffset: {
            Vec w(dim);
            for (auto& c : w) c = sigma * rng.normal();
            return w;
        }
        case Kind::UniformBallOffset: {
            Vec dir = rng.unit_vector(dim);
            const double r = ball_radius * std::pow(rng.uniform(), 1.0 / dim);
            return r * dir;
        }
        case Kind::DiracOffset:
            return offset.empty() ? Vec(dim, 0.0) : offset;
        case Kind::Se2Rotation: {
            const double a = angle_uniform ? rng.uniform(-M_PI, M_PI) : angle;
            Vec c(2);
            for (int i = 0; i < 2; ++i)
                c[i] = rot_centre_mean[i] + rot_centre_sigma * rng.normal();
            return Vec{a, c[0], c[1]};
        }
        case Kind::TangentGaussian: {
            Vec w(dim);
            for (auto& c : w) c = sigma * rng.normal();
            return w;
        }
        case Kind::Radius:
            return Vec{radius_lo == radius_hi ? radius_lo : rng.uniform(radius_lo, radius_hi)};
    }
    fail("component sample: unreachable");
}

double ComponentModel::support_radius() const {
    switch (kind) {
        case Kind::GaussianOffset:
        case Kind::TangentGaussian:
        case Kind::Se2Rotation:
            return HUGE_VAL;
        case Kind::UniformBallOffset:
            return ball_radius;
        case Kind::DiracOffset:
            return offset.empty() ? 0.0 : norm(offset);
        case Kind::Radius:
            return radius_hi;
    }
    fail("component support_radius: unreachable");
}

double ComponentModel::effective_range() const {
    // Plus-sampling margin.  Gaussian tails are cut at 6 sigma; the ignored
    // mass is ~1.5e-8 per component in 2-d and enters only through centres
    // just outside the dilated window.
    switch (kind) {
        case Kind::GaussianOffset:
        case Kind::TangentGaussian:
            return 6.0 * sigma;
        default:
            return support_radius();
    }
}

double ComponentModel::log_density(const Vec& w) const {
    require(has_log_density(), "component log_density unavailable for this model");
    require(static_cast<int>(w.size()) == dim, "component log_density: dimension mismatch");
    double s = 0.0;
    for (double c : w) s += c * c;
    return -0.5 * s / (sigma * sigma) - 0.5 * dim * (kLog2Pi + 2.0 * std::log(sigma));
}

Vec ComponentModel::log_density_gradient(const Vec& w) const {
    require(has_log_density(), "component gradient unavailable for this model");
    return (-1.0 / (sigma * sigma)) * w;
}

ParentVector ParentClusterLaw::sample(RandomStream& rng) const {
    const int n = size.sample(rng);
    ParentVector w;
    w.reserve(static_cast<std::size_t>(n));
    const double rad = component.support_radius();
    for (int i = 0; i < n; ++i) {
        Vec c = component.sample(rng);
        if (std::isfinite(rad))
            require(norm(c) <= rad + kGeomTol, "parent component escaped its support radius");
        w.push_back(std::move(c));
    }
    return w;
}

PlacementMap PlacementMap::translation(const Geometry& g) {
    require(g.flat(), "translation placement needs a flat backend");
    PlacementMap p;
    p.kind = Kind::Translation;
    p.geom = g;
    return p;
}

PlacementMap PlacementMap::group_action() {
    PlacementMap p;
    p.kind = Kind::GroupAction;
    p.geom = Geometry::se2_on_r2();
    return p;
}

PlacementMap PlacementMap::geodesic_transport(const Point& base) {
    PlacementMap p;
    p.kind = Kind::GeodesicTransport;
    p.geom = base.geom;
    p.base = base;
    return p;
}

PlacementMap PlacementMap::radial_angular(const Geometry& g) {
    PlacementMap p;
    p.kind = Kind::RadialAngular;
    p.geom = g;
    return p;
}

Point PlacementMap::place(const Point& x, const Vec& w, RandomStream* rng) const {
    require(x.geom == geom, "place: centre on a different geometry");
    switch (kind) {
        case Kind::Translation:
            require(w.size() == x.x.size(), "place: offset dimension mismatch");
            return Point{geom, x.x + w};
        case Kind::GroupAction: {
            require(w.size() == 3, "place: group component must be (angle, cx, cy)");
            const GroupElement g = se2_rotation_about(w[0], Vec{w[1], w[2]});
            return group_act(g, x);
        }
        case Kind::GeodesicTransport: {
            require(w.size() == base.x.size() - (geom.flat() ? 0 : 1),
                    "place: tangent component dimension mismatch");
            // components are coordinates in the orthonormal frame at the base
            const auto frame0 = tangent_basis(base);
            Vec ambient(base.x.size(), 0.0);
            for (std::size_t i = 0; i < w.size(); ++i) ambient = ambient + w[i] * frame0[i].v;
            const TangentVector at_base{base, std::move(ambient)};
            const TangentVector moved = parallel_transport(base, x, at_base);
            return exp_map(x, moved);
        }
        case Kind::RadialAngular: {
            require(w.size() == 1, "place: radial component must be a single radius");
            require(rng != nullptr, "place: radial-angular placement needs a random stream");
            if (w[0] == 0.0) return x;
            return sample_sphere(x, w[0], *rng);
        }
    }
    fail("place: unreachable");
}

ClusterKernel ClusterKernel::translation_gaussian(const Geometry& g, SizeDistribution size,
                                                  double sigma) {
    require(sigma > 0.0, "translation_gaussian: sigma must be positive");
    ClusterKernel k;
    k.parent.size = std::move(size);
    k.parent.component.kind = ComponentModel::Kind::GaussianOffset;
    k.parent.component.dim = g.dim;
    k.parent.component.sigma = sigma;
    k.placement = PlacementMap::translation(g);
    return k;
}

bool ClusterKernel::is_translation_gaussian() const {
    return placement.kind == PlacementMap::Kind::Translation &&
           parent.component.kind == ComponentModel::Kind::GaussianOffset;
}

double ClusterKernel::cluster_range(const Window& base_window) const {
    if (parent.component.kind == ComponentModel::Kind::Se2Rotation) {
        // A rotation about c keeps d(y, c) = d(x, c), so placed points stay
        // within 2*max|c| + max|x| of the origin; bound the swing by that.
        const auto& cm = parent.component;
        const double c_max = norm(cm.rot_centre_mean) + 6.0 * cm.rot_centre_sigma;
        double x_max = 0.0;
        require(base_window.kind == Window::Kind::Box, "group-action range needs a box window");
        for (std::size_t i = 0; i < base_window.lo.size(); ++i)
            x_max += std::max(sqr(base_window.lo[i]), sqr(base_window.hi[i]));
        x_max = std::sqrt(x_max);
        return 2.0 * (c_max + x_max);
    }
    return parent.effective_range();
}

ParentVector sample_parent(const ParentClusterLaw& q, RandomStream& rng) {
    return q.sample(rng);
}

ClusterVector place_cluster(const ClusterKernel& kernel, const Point& x, const ParentVector& w,
                            RandomStream* rng) {
    ClusterVector y;
    y.reserve(w.size());
    for (const auto& c : w) y.push_back(kernel.placement.place(x, c, rng));
    return y;
}

ClusterVector sample_cluster(const ClusterKernel& kernel, const Point& x, RandomStream& rng) {
    const ParentVector w = sample_parent(kernel.parent, rng);
    return place_cluster(kernel, x, w, &rng);
}

double cluster_log_density(const ClusterKernel& kernel, const Point& x, const ClusterVector& y) {
    require(kernel.is_translation_gaussian(),
            "cluster density unavailable: translation-Gaussian kernels only");
    double s = 0.0;
    for (const auto& p : y) {
        require(p.geom == x.geom, "cluster_log_density: point on a different geometry");
        s += kernel.parent.component.log_density(p.x - x.x);
    }
    return s;
}

std::vector<Vec> cluster_log_density_gradient(const ClusterKernel& kernel, const Point& x,
                                              const ClusterVector& y) {
    require(kernel.is_translation_gaussian(),
            "cluster density gradient unavailable: translation-Gaussian kernels only");
    const double inv_s2 = 1.0 / sqr(kernel.gaussian_sigma());
    std::vector<Vec> grad;
    grad.reserve(y.size());
    for (const auto& p : y) grad.push_back((-inv_s2) * (p.x - x.x));
    return grad;
}

}  // namespace cpm
