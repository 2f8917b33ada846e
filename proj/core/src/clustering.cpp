// clustering.cpp - basin assignment of sampled points

#include <algorithm>
#include <numeric>

#include "qdent/errors.hpp"
#include "qdent/optimizer.hpp"

namespace qdent {

ClusterSet cluster_basins(const std::vector<EvaluatedPoint>& points, double d)
{
    if (!(d >= 0.0)) throw ConfigError("clustering radius must be >= 0");
    ClusterSet set;
    set.radius = d;
    set.assignment.assign(points.size(), npos);

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a].objective < points[b].objective;
    });

    std::vector<std::size_t> visited;
    visited.reserve(points.size());
    for (std::size_t idx : order) {
        if (points[idx].failed) continue;
        std::size_t nearest = npos;
        double nearest_dist = d;
        for (std::size_t prev : visited) {
            const double dist = (points[idx].scaled - points[prev].scaled).norm();
            if (dist <= nearest_dist && (nearest == npos || dist < nearest_dist)) {
                nearest = prev;
                nearest_dist = dist;
            }
        }
        if (nearest == npos) {
            set.assignment[idx] = set.clusters.size();
            set.clusters.push_back({idx, {idx}});
        } else {
            const std::size_t c = set.assignment[nearest];
            set.assignment[idx] = c;
            set.clusters[c].members.push_back(idx);
        }
        visited.push_back(idx);
    }
    return set;
}

} // namespace qdent
