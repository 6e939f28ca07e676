#pragma once

#include <optional>

#include "cpm/configuration.hpp"

namespace cpm {

/// Cluster-size law: fixed n, Poisson(mean) truncated at n_max, or an
/// explicit probability vector over sizes 0..k.
struct SizeDistribution {
    enum class Kind { Fixed, Poisson, Explicit };

    Kind kind = Kind::Fixed;
    int fixed_n = 1;
    double poisson_mean = 1.0;
    int n_max = 64;
    std::vector<double> probs;

    static SizeDistribution fixed(int n);
    static SizeDistribution poisson(double mean, int n_max = 64);
    static SizeDistribution explicit_probs(std::vector<double> p);

    int sample(RandomStream& rng) const;
    double mean() const;
    /// Probability mass removed by truncation (Poisson only; 0 otherwise).
    double truncation_mass() const;
};

/// One i.i.d. component of a parent cluster, living in the parent space W.
/// The raw vector layout depends on the placement variant that consumes it:
///   offsets in R^d            (translation),
///   (angle, centre x, centre y) rigid rotations (group action),
///   tangent components at the base point (geodesic transport),
///   a single radius           (radial-angular).
struct ComponentModel {
    enum class Kind {
        GaussianOffset,   // N(0, sigma^2 I) in R^d
        UniformBallOffset,
        DiracOffset,
        Se2Rotation,      // angle fixed or uniform; rotation centre Gaussian or fixed
        TangentGaussian,  // N(0, sigma^2 I) in an orthonormal tangent frame
        Radius,           // fixed value or uniform on [r0, r1]
    };

    Kind kind = Kind::GaussianOffset;
    int dim = 2;
    double sigma = 1.0;
    double ball_radius = 1.0;
    Vec offset;                    // DiracOffset
    bool angle_uniform = false;    // Se2Rotation
    double angle = M_PI;
    Vec rot_centre_mean{0.0, 0.0};
    double rot_centre_sigma = 0.0;  // 0 = fixed centre
    double radius_lo = 1.0, radius_hi = 1.0;

    Vec sample(RandomStream& rng) const;
    /// Hard support bound (infinite for Gaussian and rotation components).
    double support_radius() const;
    /// Plus-sampling range: 6 sigma for Gaussian families, exact otherwise.
    double effective_range() const;

    bool has_log_density() const { return kind == Kind::GaussianOffset; }
    double log_density(const Vec& w) const;
    Vec log_density_gradient(const Vec& w) const;
};

/// Law Q of a whole parent cluster: random size, i.i.d. components.
struct ParentClusterLaw {
    SizeDistribution size;
    ComponentModel component;

    ParentVector sample(RandomStream& rng) const;
    double support_radius() const { return component.support_radius(); }
    double effective_range() const { return component.effective_range(); }
};

/// Placement family phi_x carrying parent components to the geometry.
struct PlacementMap {
    enum class Kind { Translation, GroupAction, GeodesicTransport, RadialAngular };

    Kind kind = Kind::Translation;
    Geometry geom;
    Point base;  // x0 for geodesic transport

    static PlacementMap translation(const Geometry& g);
    static PlacementMap group_action();  // W = SE(2), X = se2-on-r2
    static PlacementMap geodesic_transport(const Point& base);
    static PlacementMap radial_angular(const Geometry& g);

    bool stochastic() const { return kind == Kind::RadialAngular; }

    /// phi_x(w) for one component; the radial-angular variant consumes rng
    /// for its angular part and is the only one that does.
    Point place(const Point& x, const Vec& w, RandomStream* rng) const;
};

/// Cluster kernel eta_x: parent law pushed forward by the placement family.
struct ClusterKernel {
    ParentClusterLaw parent;
    PlacementMap placement;

    /// Translation kernel with N(0, sigma^2 I) offsets; the only family with
    /// closed-form densities and logarithmic derivatives.
    static ClusterKernel translation_gaussian(const Geometry& g, SizeDistribution size,
                                              double sigma);

    bool is_translation_gaussian() const;
    double gaussian_sigma() const { return parent.component.sigma; }
    /// Metric range of placed points about the centre (plus-sampling margin).
    double cluster_range(const Window& base_window) const;
};

ParentVector sample_parent(const ParentClusterLaw& q, RandomStream& rng);

/// Componentwise placement of a parent vector at centre x.
ClusterVector place_cluster(const ClusterKernel& kernel, const Point& x, const ParentVector& w,
                            RandomStream* rng = nullptr);

/// One draw from eta_x: sample_parent then place_cluster on the same stream.
ClusterVector sample_cluster(const ClusterKernel& kernel, const Point& x, RandomStream& rng);

/// log h_x(y) for the translation-Gaussian family on the stratum X^n of y.
double cluster_log_density(const ClusterKernel& kernel, const Point& x, const ClusterVector& y);

/// Per-component gradients of log h_x in the cluster coordinates.
std::vector<Vec> cluster_log_density_gradient(const ClusterKernel& kernel, const Point& x,
                                              const ClusterVector& y);

}  // namespace cpm
