#include "cpm/functions.hpp"

#include <cmath>

namespace cpm {

namespace {

// Peak of |d/ds exp(1 - 1/(1-s))| scaled profile, for the invertibility bound
// of bump flows: max over t in [0,1) of exp(1 - 1/(1-t^2)) * 2t/(1-t^2)^2.
double bump_profile_max_slope() {
    double best = 0.0;
    for (int i = 1; i < 4096; ++i) {
        const double t = i / 4096.0;
        const double s = t * t;
        const double v = std::exp(1.0 - 1.0 / (1.0 - s)) * 2.0 * t / sqr(1.0 - s);
        best = std::max(best, v);
    }
    return best;
}

}  // namespace

TestFunction TestFunction::indicator(double s, Region support) {
    require(s >= 0.0, "indicator: scale must be nonnegative");
    TestFunction f;
    f.kind = Kind::IndicatorScaled;
    f.scale = s;
    f.region = std::move(support);
    return f;
}

TestFunction TestFunction::bump(const Point& centre, double radius, double height) {
    require(radius > 0.0 && height >= 0.0, "bump: bad parameters");
    TestFunction f;
    f.kind = Kind::SmoothBump;
    f.scale = height;
    f.centre = centre;
    f.radius = radius;
    return f;
}

double TestFunction::operator()(const Point& p) const {
    if (kind == Kind::IndicatorScaled) return region.contains(p) ? scale : 0.0;
    const double d = distance(centre, p);
    const double s = sqr(d / radius);
    if (s >= 1.0) return 0.0;
    return scale * std::exp(1.0 - 1.0 / (1.0 - s));
}

Vec TestFunction::gradient(const Point& p) const {
    require(has_gradient(), "gradient: indicator test functions are not differentiable");
    require(p.geom.flat(), "gradient: flat backends only");
    const Vec d = p.x - centre.x;
    const double s = dot(d, d) / sqr(radius);
    if (s >= 1.0) return Vec(p.x.size(), 0.0);
    const double value = scale * std::exp(1.0 - 1.0 / (1.0 - s));
    const double ds = -value / sqr(1.0 - s);
    return (ds * 2.0 / sqr(radius)) * d;
}

Region TestFunction::support() const {
    if (kind == Kind::IndicatorScaled) return region;
    return Region::ball(centre, radius);
}

VectorField VectorField::bump_directional(const Point& centre, double radius, Vec direction) {
    require(!direction.empty(), "vector field: direction required");
    VectorField v;
    v.bump = TestFunction::bump(centre, radius, 1.0);
    v.direction = std::move(direction);
    return v;
}

Vec VectorField::operator()(const Point& p) const {
    return bump(p) * direction;
}

double VectorField::divergence(const Point& p) const {
    return dot(bump.gradient(p), direction);
}

Diffeomorphism Diffeomorphism::bump_flow(const Point& centre, double radius, Vec direction,
                                         double strength) {
    require(centre.geom.flat(), "bump_flow: flat backends only");
    Diffeomorphism d;
    d.bump = TestFunction::bump(centre, radius, 1.0);
    d.direction = std::move(direction);
    d.strength = strength;
    const double max_grad = bump_profile_max_slope() / radius;
    require(std::abs(strength) * max_grad * norm(d.direction) < 0.95,
            "bump_flow: strength too large for global invertibility");
    return d;
}

Diffeomorphism Diffeomorphism::identity(const Geometry& g) {
    Diffeomorphism d;
    d.bump = TestFunction::bump(origin(g), 1.0, 1.0);
    d.direction = Vec(g.dim, 0.0);
    d.strength = 0.0;
    return d;
}

Point Diffeomorphism::forward(const Point& p) const {
    if (is_identity()) return p;
    return Point{p.geom, p.x + (strength * bump(p)) * direction};
}

Point Diffeomorphism::inverse(const Point& p) const {
    if (is_identity()) return p;
    // Fixed point of x = y - s*b(x)*u; the map is a contraction by the
    // construction bound, so plain iteration converges fast.
    Point x = p;
    for (int it = 0; it < 200; ++it) {
        Point next{p.geom, p.x - (strength * bump(x)) * direction};
        const double step = norm(next.x - x.x);
        x = std::move(next);
        if (step < 1e-15) break;
    }
    require(norm(forward(x).x - p.x) <= 1e-12, "diffeomorphism inverse failed to converge");
    return x;
}

double Diffeomorphism::jacobian_det(const Point& p) const {
    if (is_identity()) return 1.0;
    // d(x + s b(x) u) = I + s u grad b(x)^T, so det = 1 + s grad b . u
    return 1.0 + strength * dot(bump.gradient(p), direction);
}

}  // namespace cpm
