#pragma once

#include "spm/engine.hpp"
#include "spm/geometry.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace spm {

/// Nodes are ordered: obstacle vertices (global order), source points, then per
/// segment its two endpoints followed by its critical points.
struct VisibilityGraph {
    struct Arc {
        std::uint32_t to;
        double length;
    };

    std::vector<Point2> nodes;
    std::vector<std::uint8_t> is_source;
    std::vector<std::vector<Arc>> adjacency;
    /// Initial distance per node: 0 for sources, the clamped-projection distance
    /// to the nearest visible sub-segment, infinity otherwise.
    std::vector<double> seeds;
    std::vector<std::pair<Point2, Point2>> sub_segments;
    std::size_t vertex_count = 0;

    std::size_t edge_count() const;
};

VisibilityGraph build_visibility_graph(const Scene& scene, const SourceSpec& sources);

/// Geodesic distance per node; unreachable nodes get infinity.
std::vector<double> multi_source_dijkstra(const VisibilityGraph& graph);

/// Geodesic distance from p to the nearest source; infinity when cut off.
double exact_distance(Point2 p, const Scene& scene, const SourceSpec& sources, const VisibilityGraph& graph,
                      const std::vector<double>& node_distance);

struct OracleGrid {
    int resolution = 0;
    std::vector<double> distance;      // infinity where unreachable
    std::vector<std::uint8_t> blocked; // center strictly inside an obstacle
};

OracleGrid exact_spm_raster(const Scene& scene, const SourceSpec& sources, int resolution);

struct ComparisonReport {
    std::size_t total_free_pixels = 0;
    std::size_t matched = 0;
    std::vector<std::size_t> mismatch_locations;
    double max_abs_error = 0.0;
    bool boundary_confined = true;

    double matched_fraction() const {
        return total_free_pixels == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(total_free_pixels);
    }
};

/// Throws UsageError when the resolutions differ.
ComparisonReport compare(const SpmResult& spm, const OracleGrid& oracle, double tolerance);

} // namespace spm
