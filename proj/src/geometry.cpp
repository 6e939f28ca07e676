#include "cpm/geometry.hpp"

#include <cmath>

namespace cpm {

namespace {

void check_same_geometry(const Point& p, const Point& q, const char* op) {
    require(p.geom == q.geom, std::string(op) + ": points on different geometries");
}

void check_on_hyperboloid(const Point& p) {
    require(p.x.size() == 3, "hyperboloid point needs 3 ambient coordinates");
    require(p.x[0] > 0.0, "hyperboloid point must lie on the upper sheet");
    require(std::abs(minkowski_dot(p.x, p.x) + 1.0) <= 1e-6,
            "point off the hyperboloid sheet");
}

// Re-normalise onto the sheet; keeps long exp/transport chains on-manifold.
Vec project_to_sheet(Vec a) {
    a[0] = std::sqrt(1.0 + a[1] * a[1] + a[2] * a[2]);
    return a;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

Vec rotate2(double angle, const Vec& p) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Vec{c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

}  // namespace

std::string Geometry::name() const {
    switch (kind) {
        case GeometryKind::Euclidean: return "euclidean(" + std::to_string(dim) + ")";
        case GeometryKind::Hyperbolic2: return "hyperbolic2";
        case GeometryKind::Se2OnR2: return "se2-on-r2";
    }
    return "?";
}

Point make_point(const Geometry& g, Vec coords) {
    require(static_cast<int>(coords.size()) == g.dim,
            "make_point: coordinate length does not match chart dimension of " + g.name());
    Point p{g, std::move(coords)};
    if (g.kind == GeometryKind::Hyperbolic2) check_on_hyperboloid(p);
    return p;
}

Point origin(const Geometry& g) {
    if (g.kind == GeometryKind::Hyperbolic2) return Point{g, Vec{1.0, 0.0, 0.0}};
    return Point{g, Vec(g.dim, 0.0)};
}

TangentVector make_tangent(const Point& base, Vec components) {
    require(components.size() == base.x.size(), "make_tangent: dimension mismatch");
    if (base.geom.kind == GeometryKind::Hyperbolic2) {
        require(std::abs(minkowski_dot(base.x, components)) <= 1e-6,
                "make_tangent: vector not tangent to the hyperboloid");
    }
    return TangentVector{base, std::move(components)};
}

double minkowski_dot(const Vec& a, const Vec& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double distance(const Point& p, const Point& q) {
    check_same_geometry(p, q, "distance");
    if (p.geom.kind == GeometryKind::Hyperbolic2) {
        const double c = -minkowski_dot(p.x, q.x);
        return std::acosh(std::max(c, 1.0));
    }
    return norm(p.x - q.x);
}

double tangent_dot(const TangentVector& a, const TangentVector& b) {
    require(a.base.geom == b.base.geom, "tangent_dot: different geometries");
    if (a.base.geom.kind == GeometryKind::Hyperbolic2) return minkowski_dot(a.v, b.v);
    return dot(a.v, b.v);
}

double tangent_norm(const TangentVector& v) {
    return std::sqrt(std::max(tangent_dot(v, v), 0.0));
}

Point exp_map(const Point& p, const TangentVector& v) {
    require(p == v.base, "exp_map: tangent vector based at a different point");
    if (p.geom.kind == GeometryKind::Hyperbolic2) {
        const double n = tangent_norm(v);
        if (n == 0.0) return p;
        Vec a = std::cosh(n) * p.x + (std::sinh(n) / n) * v.v;
        return Point{p.geom, project_to_sheet(std::move(a))};
    }
    return Point{p.geom, p.x + v.v};
}

TangentVector parallel_transport(const Point& p, const Point& q, const TangentVector& v) {
    check_same_geometry(p, q, "parallel_transport");
    require(p == v.base, "parallel_transport: vector based elsewhere");
    if (p.geom.kind == GeometryKind::Hyperbolic2) {
        // Closed form along the unique geodesic from p to q.
        const double qv = minkowski_dot(q.x, v.v);
        const double denom = 1.0 - minkowski_dot(p.x, q.x);  // = 1 + cosh d
        Vec w = v.v + (qv / denom) * (p.x + q.x);
        return TangentVector{q, std::move(w)};
    }
    return TangentVector{q, v.v};
}

std::vector<TangentVector> tangent_basis(const Point& p) {
    if (p.geom.kind != GeometryKind::Hyperbolic2) {
        std::vector<TangentVector> basis;
        for (int i = 0; i < p.geom.dim; ++i) {
            Vec e(p.geom.dim, 0.0);
            e[i] = 1.0;
            basis.push_back(TangentVector{p, std::move(e)});
        }
        return basis;
    }
    // Minkowski Gram-Schmidt of the spatial axes projected onto T_p.
    std::vector<TangentVector> basis;
    for (int i = 1; i <= 2; ++i) {
        Vec e(3, 0.0);
        e[i] = 1.0;
        Vec u = e + minkowski_dot(p.x, e) * p.x;  // projection onto T_p
        for (const auto& b : basis) u = u - minkowski_dot(b.v, u) * b.v;
        const double n = std::sqrt(minkowski_dot(u, u));
        basis.push_back(TangentVector{p, (1.0 / n) * u});
    }
    return basis;
}

Point sample_sphere(const Point& p, double r, RandomStream& rng) {
    require(r > 0.0, "sample_sphere: radius must be positive");
    if (p.geom.flat()) {
        return Point{p.geom, p.x + r * rng.unit_vector(p.geom.dim)};
    }
    const auto basis = tangent_basis(p);
    const Vec u = rng.unit_vector(2);
    Vec dir = u[0] * basis[0].v + u[1] * basis[1].v;
    return exp_map(p, TangentVector{p, r * dir});
}

GroupElement group_identity() { return GroupElement{}; }

GroupElement group_compose(const GroupElement& g, const GroupElement& h) {
    return GroupElement{wrap_angle(g.angle + h.angle), rotate2(g.angle, h.trans) + g.trans};
}

GroupElement group_inverse(const GroupElement& g) {
    return GroupElement{wrap_angle(-g.angle), -1.0 * rotate2(-g.angle, g.trans)};
}

Point group_act(const GroupElement& g, const Point& p) {
    require(p.geom.kind == GeometryKind::Se2OnR2,
            "group_act: SE(2) acts on the se2-on-r2 backend only");
    return Point{p.geom, rotate2(g.angle, p.x) + g.trans};
}

GroupElement se2_rotation_about(double angle, const Vec& centre) {
    // R(p - c) + c = R p + (I - R) c
    return GroupElement{wrap_angle(angle), centre - rotate2(angle, centre)};
}

Vec to_poincare_disk(const Point& p) {
    require(p.geom.kind == GeometryKind::Hyperbolic2, "to_poincare_disk: hyperbolic points only");
    return Vec{p.x[1] / (1.0 + p.x[0]), p.x[2] / (1.0 + p.x[0])};
}

}  // namespace cpm
