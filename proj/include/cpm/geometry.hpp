#pragma once

#include <string>

#include "cpm/common.hpp"
#include "cpm/rng.hpp"

namespace cpm {

enum class GeometryKind { Euclidean, Hyperbolic2, Se2OnR2 };

/// A manifold backend.  Euclidean(d) and Se2OnR2 use plain chart coordinates
/// in R^d (Se2OnR2 is the Euclidean plane with the rigid-motion group action
/// on top); Hyperbolic2 uses the hyperboloid model embedded in Minkowski
/// R^{2,1}, points (t,x,y) with -t^2+x^2+y^2 = -1, t > 0.
struct Geometry {
    GeometryKind kind = GeometryKind::Euclidean;
    int dim = 2;  // chart dimension: d, 3 (ambient), or 2

    static Geometry euclidean(int d) { return {GeometryKind::Euclidean, d}; }
    static Geometry hyperbolic2() { return {GeometryKind::Hyperbolic2, 3}; }
    static Geometry se2_on_r2() { return {GeometryKind::Se2OnR2, 2}; }

    bool flat() const { return kind != GeometryKind::Hyperbolic2; }
    bool operator==(const Geometry&) const = default;
    std::string name() const;
};

/// A location on a geometry backend.  Cross-geometry operations are hard
/// errors, never coercions.
struct Point {
    Geometry geom;
    Vec x;

    bool operator==(const Point&) const = default;
};

/// A vector in the tangent space at `base`.  Hyperboloid tangents satisfy
/// <base, v>_Minkowski = 0.
struct TangentVector {
    Point base;
    Vec v;
};

/// Element of SE(2) acting on R^2 as p -> R(angle) p + trans.
struct GroupElement {
    double angle = 0.0;  // radians in (-pi, pi]
    Vec trans{0.0, 0.0};
};

Point make_point(const Geometry& g, Vec coords);
Point origin(const Geometry& g);
TangentVector make_tangent(const Point& base, Vec components);

double minkowski_dot(const Vec& a, const Vec& b);

double distance(const Point& p, const Point& q);
Point exp_map(const Point& p, const TangentVector& v);
TangentVector parallel_transport(const Point& p, const Point& q, const TangentVector& v);
/// Uniform point on the geodesic sphere of radius r about p.
Point sample_sphere(const Point& p, double r, RandomStream& rng);

double tangent_norm(const TangentVector& v);
double tangent_dot(const TangentVector& a, const TangentVector& b);
/// Orthonormal tangent basis at p (Minkowski-orthonormal on the hyperboloid).
std::vector<TangentVector> tangent_basis(const Point& p);

// SE(2) group operations; valid on the Se2OnR2 backend only.
GroupElement group_identity();
GroupElement group_compose(const GroupElement& g, const GroupElement& h);
GroupElement group_inverse(const GroupElement& g);
Point group_act(const GroupElement& g, const Point& p);
/// Rotation by `angle` about the fixed point `centre`: p -> R(p-centre)+centre.
GroupElement se2_rotation_about(double angle, const Vec& centre);

/// Poincare-disk coordinates of a hyperboloid point (output only).
Vec to_poincare_disk(const Point& p);

}  // namespace cpm
