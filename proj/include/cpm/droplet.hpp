#pragma once

#include "cpm/process.hpp"

namespace cpm {

/// Droplet queries for a placement family, a bounded shape B, and a
/// reference measure: the droplet of w is the set of centre positions x
/// whose placed point lands in B; the droplet cluster of a parent vector is
/// the union of its component droplets.
struct DropletQuery {
    PlacementMap placement;
    Region shape;
    ReferenceMeasure reference;
};

/// Membership x in D_B(w).  The radial-angular placement is stochastic in its
/// angular part, so membership is evaluated on a sampled placement and the
/// query consumes the stream; deterministic variants ignore it.
bool droplet_contains(const DropletQuery& query, const Vec& w, const Point& x,
                      RandomStream* rng = nullptr);

/// Monte Carlo estimate of theta(droplet cluster of w) over the reference
/// window.  Warns (via the `truncated` flag) when the droplet may extend
/// beyond the window.
struct DropletMeasure {
    EstimateWithError theta_measure;
    bool truncated = false;
};
DropletMeasure droplet_cluster_measure(const DropletQuery& query, const ParentVector& w,
                                       RandomStream& rng, std::size_t n_mc);

/// Two-route estimate of the mean droplet-cluster measure: the direct
/// hitting-probability route against theta x Q, and the nested droplet
/// integral; reports both with a z-score of their difference.
struct SigmaBarCheck {
    EstimateWithError lhs;  // sigma-bar of the hitting set
    EstimateWithError rhs;  // nested droplet-cluster integral
    double z = 0.0;
};
SigmaBarCheck sigma_bar_check(const ClusterProcessModel& model, const Region& shape,
                              RandomStream& rng, std::size_t n_mc);

/// Empirical probes for the properness criteria: max observed droplet
/// measure (a lower bound for the worst case over parent components) and the
/// mean parent-cluster size.
struct ConditionProbe {
    double sup_droplet_measure_lower_bound = 0.0;
    EstimateWithError mean_cluster_size;
    std::size_t samples = 0;
};
ConditionProbe condition_probe(const ClusterProcessModel& model, const Region& shape,
                               RandomStream& rng, std::size_t n_samples);

}  // namespace cpm
