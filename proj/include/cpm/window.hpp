#pragma once

#include "cpm/geometry.hpp"

namespace cpm {

/// Bounded sampling window.  Flat backends use an axis-aligned box in chart
/// coordinates; the hyperbolic backend uses a metric ball about a centre
/// point (boxes have no natural meaning in the ambient coordinates).
struct Window {
    enum class Kind { Box, MetricBall };

    Geometry geom;
    Kind kind = Kind::Box;
    Vec lo, hi;          // Box
    Point centre;        // MetricBall
    double radius = 0.0; // MetricBall

    static Window box(const Geometry& g, Vec lo, Vec hi);
    static Window metric_ball(const Point& centre, double radius);

    bool contains(const Point& p) const;
    /// Riemannian volume of the window.
    double volume() const;
    /// Window enlarged by metric distance r in every direction.
    Window dilated(double r) const;
    /// Uniform sample w.r.t. the Riemannian volume.
    Point sample_uniform(RandomStream& rng) const;
};

/// Bounded evaluation region (droplet shapes, indicator supports).  Balls are
/// metric balls and work on every backend; boxes are chart boxes on flat
/// backends only.
struct Region {
    enum class Kind { Box, Ball };

    Kind kind = Kind::Ball;
    Vec lo, hi;      // Box
    Point centre;    // Ball
    double radius = 0.0;

    static Region box(Vec lo, Vec hi);
    static Region ball(const Point& centre, double radius);

    bool contains(const Point& p) const;
    /// Closed-form Lebesgue volume (flat backends; oracle use).
    double flat_volume(const Geometry& g) const;
};

}  // namespace cpm
