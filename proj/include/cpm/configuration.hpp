#pragma once

#include "cpm/window.hpp"

namespace cpm {

/// One cluster living on the geometry: finite ordered list of points.
using ClusterVector = std::vector<Point>;

/// One parent-space cluster before placement: finite ordered list of raw
/// coordinate vectors, interpreted by the kernel's placement variant
/// (offsets, rigid motions, tangent components, or radii).
using ParentVector = std::vector<Vec>;

/// Finite point configuration inside a window; multiple points allowed.
struct Configuration {
    std::vector<Point> points;
    Window window;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// Centre configuration where each centre carries its cluster as a mark.
struct MarkedConfiguration {
    struct Pair {
        Point centre;
        ClusterVector cluster;
    };
    std::vector<Pair> pairs;
    Window window;

    /// Total number of cluster points over all pairs.
    std::size_t total_points() const {
        std::size_t n = 0;
        for (const auto& p : pairs) n += p.cluster.size();
        return n;
    }
};

}  // namespace cpm
