#pragma once

#include <functional>

#include "cpm/configuration.hpp"

namespace cpm {

/// Intensity of the reference measure relative to the Riemannian volume.
using IntensityFn = std::function<double(const Point&)>;

/// Reference measure on a bounded window: intensity function plus a declared
/// upper bound used for thinning.  The bound is checked on every draw; an
/// intensity exceeding it is a model misspecification, not a sampling error
/// to paper over.
struct ReferenceMeasure {
    Window window;
    IntensityFn intensity;
    double intensity_upper_bound = 0.0;

    static ReferenceMeasure constant(const Window& w, double rate);
    static ReferenceMeasure with_intensity(const Window& w, IntensityFn f, double bound);

    /// Total mass over `w` by Monte Carlo (n draws); exact for constant rates.
    double mass(const Window& w, RandomStream& rng, std::size_t n = 1 << 14) const;
};

/// Symmetric pair potential V(p, q); +infinity encodes a hard exclusion.
using PairPotential = std::function<double(const Point&, const Point&)>;

struct GibbsSpec {
    PairPotential potential;
    double inverse_temperature = 1.0;
    int sweeps = 200;  // burn-in sweeps before a sample is drawn
    double move_scale = 0.1;
};

/// Centre-process law on a window: Poisson, pairwise Gibbs via birth-death-
/// move Metropolis-Hastings, or a fixed (lattice) configuration.
struct CentreProcess {
    enum class Variant { Poisson, Gibbs, Lattice };

    Variant variant = Variant::Poisson;
    ReferenceMeasure reference;
    GibbsSpec gibbs_spec;
    std::vector<Point> lattice_points;

    static CentreProcess poisson(ReferenceMeasure theta);
    static CentreProcess gibbs(ReferenceMeasure theta, GibbsSpec spec);
    static CentreProcess lattice(const Window& w, std::vector<Point> points);
};

/// Draws one centre configuration on the process window.
Configuration sample_centres(const CentreProcess& process, RandomStream& rng);

/// Same law on an enlarged window (plus-sampling margin for cluster range).
Configuration sample_centres_on(const CentreProcess& process, const Window& w,
                                RandomStream& rng);

/// One birth-death-move sweep of the Gibbs chain; detailed balance holds for
/// the density exp(-beta * sum V) relative to Poisson(theta).
Configuration gibbs_step(Configuration state, const CentreProcess& process, RandomStream& rng);

// Named pair-potential families.
PairPotential hard_core_potential(double radius);
PairPotential strauss_potential(double radius, double strength);

}  // namespace cpm
