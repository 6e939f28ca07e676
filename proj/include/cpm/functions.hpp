#pragma once

#include "cpm/configuration.hpp"

namespace cpm {

/// Nonnegative compactly supported test function on the geometry.
/// IndicatorScaled is s * 1_region (no gradient); SmoothBump is the C-infinity
/// bump h * exp(1 - 1/(1 - |x-c|^2/r^2)) inside the metric ball, 0 outside,
/// with an analytic gradient on flat backends.
struct TestFunction {
    enum class Kind { IndicatorScaled, SmoothBump };

    Kind kind = Kind::IndicatorScaled;
    double scale = 1.0;  // s or h
    Region region;       // indicator support
    Point centre;        // bump
    double radius = 1.0;

    static TestFunction indicator(double s, Region support);
    static TestFunction bump(const Point& centre, double radius, double height);

    double operator()(const Point& p) const;
    bool has_gradient() const { return kind == Kind::SmoothBump; }
    Vec gradient(const Point& p) const;
    /// Support as a region (balls for bumps).
    Region support() const;
};

/// Compactly supported smooth vector field v(x) = u * bump(x) with analytic
/// divergence; flat backends.
struct VectorField {
    TestFunction bump;  // SmoothBump kind
    Vec direction;

    static VectorField bump_directional(const Point& centre, double radius, Vec direction);

    Vec operator()(const Point& p) const;
    double divergence(const Point& p) const;
    const Region support() const { return bump.support(); }
};

/// Compactly supported diffeomorphism x -> x + s * bump(x) * u with Newton
/// inverse and closed-form Jacobian determinant; invertibility enforced at
/// construction (|s| sup|grad bump| |u| < 1).
struct Diffeomorphism {
    TestFunction bump;
    Vec direction;
    double strength = 0.0;

    static Diffeomorphism bump_flow(const Point& centre, double radius, Vec direction,
                                    double strength);
    static Diffeomorphism identity(const Geometry& g);

    Point forward(const Point& p) const;
    Point inverse(const Point& p) const;
    double jacobian_det(const Point& p) const;
    bool is_identity() const { return strength == 0.0; }
    Region support() const { return bump.support(); }
};

/// Composition phi after psi (as maps: x -> phi(psi(x))).
struct ComposedDiffeomorphism {
    Diffeomorphism outer, inner;
    Point forward(const Point& p) const { return outer.forward(inner.forward(p)); }
    Point inverse(const Point& p) const { return inner.inverse(outer.inverse(p)); }
    double jacobian_det(const Point& p) const {
        return outer.jacobian_det(inner.forward(p)) * inner.jacobian_det(p);
    }
};

}  // namespace cpm
