#include "cpm/process.hpp"

#include <algorithm>
#include <cmath>

#include "cpm/parallel.hpp"

namespace cpm {

ClusterProcessModel ClusterProcessModel::make(CentreProcess centres, ClusterKernel kernel) {
    const Window& w = centres.reference.window;
    const double range = kernel.cluster_range(w);
    require(std::isfinite(range), "cluster range is not finite; pass it explicitly");
    return make(std::move(centres), std::move(kernel), range);
}

ClusterProcessModel ClusterProcessModel::make(CentreProcess centres, ClusterKernel kernel,
                                              double cluster_range) {
    require(cluster_range >= 0.0, "cluster_range must be nonnegative");
    const double support = kernel.parent.support_radius();
    if (std::isfinite(support))
        require(cluster_range >= support, "cluster_range below the kernel support radius");
    ClusterProcessModel m;
    m.geometry = centres.reference.window.geom;
    m.centres = std::move(centres);
    m.kernel = std::move(kernel);
    m.cluster_range = cluster_range;
    return m;
}

MarkedConfiguration sample_marked(const ClusterProcessModel& model, RandomStream& rng) {
    const Window dilated = model.dilated_window();
    Configuration centres = sample_centres_on(model.centres, dilated, rng);
    MarkedConfiguration marked;
    marked.window = model.window();
    marked.pairs.reserve(centres.size());
    for (auto& c : centres.points) {
        ClusterVector cluster = sample_cluster(model.kernel, c, rng);
        marked.pairs.push_back({std::move(c), std::move(cluster)});
    }
    return marked;
}

Configuration project(const MarkedConfiguration& marked) {
    Configuration cfg{{}, marked.window};
    for (const auto& pair : marked.pairs)
        for (const auto& y : pair.cluster)
            if (marked.window.contains(y)) cfg.points.push_back(y);
    return cfg;
}

Configuration project_uncropped(const MarkedConfiguration& marked) {
    Configuration cfg{{}, marked.window};
    cfg.points.reserve(marked.total_points());
    for (const auto& pair : marked.pairs)
        for (const auto& y : pair.cluster) cfg.points.push_back(y);
    return cfg;
}

Configuration sample_cluster_process(const ClusterProcessModel& model, RandomStream& rng) {
    return project(sample_marked(model, rng));
}

Configuration sample_via_varpi(const ClusterProcessModel& model, RandomStream& rng) {
    // Centres, then the configuration of whole cluster vectors, then
    // unpacking.  The stream is consumed exactly as in sample_marked.
    const Window dilated = model.dilated_window();
    Configuration centres = sample_centres_on(model.centres, dilated, rng);
    std::vector<ClusterVector> cluster_space_configuration;
    cluster_space_configuration.reserve(centres.size());
    for (const auto& c : centres.points)
        cluster_space_configuration.push_back(sample_cluster(model.kernel, c, rng));

    Configuration cfg{{}, model.window()};
    for (const auto& cluster : cluster_space_configuration)
        for (const auto& y : cluster)
            if (cfg.window.contains(y)) cfg.points.push_back(y);
    return cfg;
}

PropernessReport properness_report(const ClusterProcessModel& model, const Region& region,
                                   RandomStream& rng, std::size_t n_replicas) {
    require(n_replicas >= 1, "properness_report: need at least one replica");

    struct Local {
        double hits = 0.0;
        double min_dist = HUGE_VAL;
        std::size_t duplicates = 0;
        bool has_pair = false;
    };
    std::vector<Local> locals(n_replicas);

    run_replicas(n_replicas, rng, [&](std::size_t i, RandomStream& local) {
        const MarkedConfiguration marked = sample_marked(model, local);
        Local r;
        for (const auto& pair : marked.pairs) {
            bool hit = false;
            for (const auto& y : pair.cluster)
                if (region.contains(y)) {
                    hit = true;
                    break;
                }
            if (hit) r.hits += 1.0;
        }
        const Configuration cfg = project(marked);
        for (std::size_t a = 0; a < cfg.points.size(); ++a)
            for (std::size_t b = a + 1; b < cfg.points.size(); ++b) {
                r.has_pair = true;
                if (cfg.points[a].x == cfg.points[b].x) ++r.duplicates;
                r.min_dist = std::min(r.min_dist, distance(cfg.points[a], cfg.points[b]));
            }
        locals[i] = r;
        return 0.0;
    });

    PropernessReport report;
    report.replicas = n_replicas;
    MeanAccumulator hits, min_d;
    for (const auto& r : locals) {
        hits.add(r.hits);
        report.multiplicity_count += r.duplicates;
        if (r.has_pair) {
            min_d.add(r.min_dist);
            report.min_pairwise_distance = std::min(report.min_pairwise_distance, r.min_dist);
        }
    }
    report.mean_clusters_hitting = hits.estimate();
    report.mean_min_distance = min_d.estimate();
    return report;
}

}  // namespace cpm
