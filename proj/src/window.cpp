#include "cpm/window.hpp"

#include <cmath>

namespace cpm {

Window Window::box(const Geometry& g, Vec lo, Vec hi) {
    require(g.flat(), "Window::box: box windows are for flat backends");
    require(static_cast<int>(lo.size()) == g.dim && lo.size() == hi.size(),
            "Window::box: bound dimensions do not match the chart");
    for (std::size_t i = 0; i < lo.size(); ++i)
        require(lo[i] < hi[i], "Window::box: empty extent");
    Window w;
    w.geom = g;
    w.kind = Kind::Box;
    w.lo = std::move(lo);
    w.hi = std::move(hi);
    return w;
}

Window Window::metric_ball(const Point& centre, double radius) {
    require(radius > 0.0, "Window::metric_ball: radius must be positive");
    Window w;
    w.geom = centre.geom;
    w.kind = Kind::MetricBall;
    w.centre = centre;
    w.radius = radius;
    return w;
}

bool Window::contains(const Point& p) const {
    require(p.geom == geom, "Window::contains: point on a different geometry");
    if (kind == Kind::Box) {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (p.x[i] < lo[i] || p.x[i] > hi[i]) return false;
        return true;
    }
    return distance(centre, p) <= radius;
}

double Window::volume() const {
    if (kind == Kind::Box) {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
    if (geom.kind == GeometryKind::Hyperbolic2)
        return 2.0 * M_PI * (std::cosh(radius) - 1.0);
    // flat metric ball
    const int d = geom.dim;
    if (d == 1) return 2.0 * radius;
    if (d == 2) return M_PI * radius * radius;
    double v = (d % 2 == 0) ? M_PI : 2.0;
    for (int k = (d % 2 == 0) ? 2 : 1; k + 2 <= d; k += 2) v *= 2.0 * M_PI / (k + 2);
    return v * std::pow(radius, d);
}

Window Window::dilated(double r) const {
    require(r >= 0.0, "Window::dilated: negative margin");
    Window w = *this;
    if (kind == Kind::Box) {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            w.lo[i] -= r;
            w.hi[i] += r;
        }
    } else {
        w.radius += r;
    }
    return w;
}

Point Window::sample_uniform(RandomStream& rng) const {
    if (kind == Kind::Box) {
        Vec x(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
        return Point{geom, std::move(x)};
    }
    if (geom.kind == GeometryKind::Hyperbolic2) {
        // area element 2*pi*sinh(r) dr: invert the cdf (cosh r - 1)/(cosh R - 1)
        const double u = rng.uniform();
        const double r = std::acosh(1.0 + u * (std::cosh(radius) - 1.0));
        if (r == 0.0) return centre;
        return sample_sphere(centre, r, rng);
    }
    const int d = geom.dim;
    const double r = radius * std::pow(rng.uniform(), 1.0 / d);
    if (r == 0.0) return centre;
    return sample_sphere(centre, r, rng);
}

Region Region::box(Vec lo, Vec hi) {
    require(lo.size() == hi.size() && !lo.empty(), "Region::box: bad bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
        require(lo[i] < hi[i], "Region::box: empty extent");
    Region r;
    r.kind = Kind::Box;
    r.lo = std::move(lo);
    r.hi = std::move(hi);
    return r;
}

Region Region::ball(const Point& centre, double radius) {
    require(radius > 0.0, "Region::ball: radius must be positive");
    Region r;
    r.kind = Kind::Ball;
    r.centre = centre;
    r.radius = radius;
    return r;
}

bool Region::contains(const Point& p) const {
    if (kind == Kind::Box) {
        require(p.geom.flat(), "Region: box regions need a flat backend");
        require(p.x.size() == lo.size(), "Region: dimension mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (p.x[i] < lo[i] || p.x[i] > hi[i]) return false;
        return true;
    }
    return distance(centre, p) <= radius;
}

double Region::flat_volume(const Geometry& g) const {
    require(g.flat(), "Region::flat_volume: flat backends only");
    if (kind == Kind::Box) {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
    const int d = g.dim;
    if (d == 1) return 2.0 * radius;
    if (d == 2) return M_PI * radius * radius;
    double v = (d % 2 == 0) ? M_PI : 2.0;
    for (int k = (d % 2 == 0) ? 2 : 1; k + 2 <= d; k += 2) v *= 2.0 * M_PI / (k + 2);
    return v * std::pow(radius, d);
}

}  // namespace cpm
