#pragma once

#include "cpm/centres.hpp"
#include "cpm/clusters.hpp"
#include "cpm/estimate.hpp"

namespace cpm {

/// Full cluster-process specification: reference measure and centre law on a
/// window, the cluster kernel, and the plus-sampling margin.  Centres are
/// drawn on the window dilated by `cluster_range`, clusters are generated for
/// every centre, and the final configuration is cropped back to the window.
struct ClusterProcessModel {
    Geometry geometry;
    CentreProcess centres;
    ClusterKernel kernel;
    double cluster_range = 0.0;

    static ClusterProcessModel make(CentreProcess centres, ClusterKernel kernel);
    static ClusterProcessModel make(CentreProcess centres, ClusterKernel kernel,
                                    double cluster_range);

    const Window& window() const { return centres.reference.window; }
    Window dilated_window() const { return window().dilated(cluster_range); }
};

/// One draw from the marked measure: centres on the dilated window, each
/// carrying an independent cluster.
MarkedConfiguration sample_marked(const ClusterProcessModel& model, RandomStream& rng);

/// Forgets centres, unpacks all clusters into one configuration, crops to the
/// window; multiplicities are preserved.
Configuration project(const MarkedConfiguration& marked);

/// Uncropped variant (all cluster points, centres discarded).
Configuration project_uncropped(const MarkedConfiguration& marked);

/// Cluster-process sample: project(sample_marked(...)).
Configuration sample_cluster_process(const ClusterProcessModel& model, RandomStream& rng);

/// Alternative pipeline: centres -> configuration of whole clusters in the
/// cluster space -> unpacking.  Consumes the stream exactly like
/// sample_cluster_process, so equal seeds give equal outputs; its value is
/// that the intermediate object is the cluster-space configuration.
Configuration sample_via_varpi(const ClusterProcessModel& model, RandomStream& rng);

struct PropernessReport {
    EstimateWithError mean_clusters_hitting;  // clusters with >= 1 point in B
    std::size_t multiplicity_count = 0;       // exact duplicate points seen
    double min_pairwise_distance = HUGE_VAL;  // over all replicas with >= 2 points
    EstimateWithError mean_min_distance;      // per-replica minima
    std::size_t replicas = 0;
};

/// Monte Carlo diagnostics for local finiteness and simplicity: the expected
/// number of clusters contributing to B, exact-duplicate counts, and the
/// distribution of minimal inter-point distances.
PropernessReport properness_report(const ClusterProcessModel& model, const Region& region,
                                   RandomStream& rng, std::size_t n_replicas);

}  // namespace cpm
