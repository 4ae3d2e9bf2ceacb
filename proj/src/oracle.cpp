#include "spm/oracle.hpp"

#include "spm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace spm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feet of vertices that see segment l perpendicularly, strictly inside it.
std::vector<Point2> segment_breaks(const Segment2& l, const Scene& scene) {
    const Point2 a = l.a();
    const Point2 b = l.b();
    const double len2 = dot(b - a, b - a);
    std::vector<std::pair<double, Point2>> found;
    for (std::size_t k = 0; k < scene.vertex_count(); ++k) {
        const Point2 v = scene.vertex(k);
        const double s = ((v.x - a.x) * (b.x - a.x) + (v.y - a.y) * (b.y - a.y)) / len2;
        if (s <= 0.0 || s >= 1.0) {
            continue;
        }
        const Point2 foot{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
        if (line_of_sight(v, foot, scene)) {
            found.emplace_back(s, foot);
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Point2> out;
    for (const auto& f : found) {
        const Point2 q = f.second;
        const Point2 prev = out.empty() ? a : out.back();
        if (distance(q, prev) > 1e-9 && distance(q, b) > 1e-9) {
            out.push_back(q);
        }
    }
    return out;
}

// Closest visible contact with any sub-segment, or infinity.
double direct_segment_distance(Point2 p, const Scene& scene, const VisibilityGraph& g) {
    double best = kInf;
    for (const auto& [a, b] : g.sub_segments) {
        const Projection pr = project_on_segment(p, a, b);
        if (pr.dist < best && line_of_sight(p, pr.foot, scene)) {
            best = pr.dist;
        }
    }
    return best;
}

} // namespace

std::size_t VisibilityGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& arcs : adjacency) {
        twice += arcs.size();
    }
    return twice / 2;
}

VisibilityGraph build_visibility_graph(const Scene& scene, const SourceSpec& sources) {
    VisibilityGraph g;
    for (std::size_t k = 0; k < scene.vertex_count(); ++k) {
        g.nodes.push_back(scene.vertex(k));
        g.is_source.push_back(0);
    }
    g.vertex_count = g.nodes.size();
    for (const Point2& s : sources.points) {
        g.nodes.push_back(s);
        g.is_source.push_back(1);
    }
    for (const Segment2& l : sources.segments) {
        g.nodes.push_back(l.a());
        g.is_source.push_back(1);
        g.nodes.push_back(l.b());
        g.is_source.push_back(1);
        Point2 prev = l.a();
        for (const Point2& q : segment_breaks(l, scene)) {
            g.nodes.push_back(q);
            g.is_source.push_back(1);
            g.sub_segments.emplace_back(prev, q);
            prev = q;
        }
        g.sub_segments.emplace_back(prev, l.b());
    }

    const std::size_t m = g.nodes.size();
    g.adjacency.assign(m, {});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (g.nodes[i] == g.nodes[j] || !line_of_sight(g.nodes[i], g.nodes[j], scene)) {
                continue;
            }
            const double w = distance(g.nodes[i], g.nodes[j]);
            g.adjacency[i].push_back({static_cast<std::uint32_t>(j), w});
            g.adjacency[j].push_back({static_cast<std::uint32_t>(i), w});
        }
    }

    g.seeds.assign(m, kInf);
    for (std::size_t i = 0; i < m; ++i) {
        g.seeds[i] = g.is_source[i] ? 0.0 : direct_segment_distance(g.nodes[i], scene, g);
    }
    return g;
}

std::vector<double> multi_source_dijkstra(const VisibilityGraph& graph) {
    std::vector<double> dist = graph.seeds;
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::uint32_t i = 0; i < dist.size(); ++i) {
        if (dist[i] < kInf) {
            heap.emplace(dist[i], i);
        }
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) {
            continue;
        }
        for (const auto& arc : graph.adjacency[u]) {
            const double nd = d + arc.length;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                heap.emplace(nd, arc.to);
            }
        }
    }
    return dist;
}

double exact_distance(Point2 p, const Scene& scene, const SourceSpec& sources, const VisibilityGraph& graph,
                      const std::vector<double>& node_distance) {
    // Candidates in increasing order; the first one p can see is the answer.
    std::vector<std::pair<double, Point2>> options;
    options.reserve(graph.nodes.size() + sources.points.size());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (node_distance[i] < kInf) {
            options.emplace_back(distance(p, graph.nodes[i]) + node_distance[i], graph.nodes[i]);
        }
    }
    for (const Point2& s : sources.points) {
        options.emplace_back(distance(p, s), s);
    }
    double best = direct_segment_distance(p, scene, graph);
    std::sort(options.begin(), options.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [value, target] : options) {
        if (value >= best) {
            break;
        }
        if (line_of_sight(p, target, scene)) {
            best = value;
            break;
        }
    }
    return best;
}

OracleGrid exact_spm_raster(const Scene& scene, const SourceSpec& sources, int resolution) {
    if (resolution < 1) {
        throw UsageError("resolution must be positive");
    }
    const VisibilityGraph graph = build_visibility_graph(scene, sources);
    const std::vector<double> node_distance = multi_source_dijkstra(graph);
    const RasterGrid grid{scene.domain(), resolution};
    OracleGrid out;
    out.resolution = resolution;
    out.distance.assign(grid.pixel_count(), kInf);
    out.blocked.assign(grid.pixel_count(), 0);
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            const Point2 c = grid.center(i, j);
            const std::size_t idx = grid.index(i, j);
            if (scene.classify(c) == Containment::inside) {
                out.blocked[idx] = 1;
            } else {
                out.distance[idx] = exact_distance(c, scene, sources, graph, node_distance);
            }
        }
    }
    return out;
}

ComparisonReport compare(const SpmResult& spm, const OracleGrid& oracle, double tolerance) {
    const int r = spm.framebuffer.resolution();
    if (oracle.resolution != r) {
        throw UsageError("resolution mismatch: engine " + std::to_string(r) + ", oracle " +
                         std::to_string(oracle.resolution));
    }
    const RasterGrid& grid = spm.framebuffer.grid();
    const std::vector<double>& dist = spm.framebuffer.distances();
    const std::vector<std::int32_t>& parent = spm.framebuffer.parent_ids();

    // A pixel is marked when an 8-neighbour has another parent or is blocked.
    std::vector<std::uint8_t> marked(grid.pixel_count(), 0);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            const std::size_t idx = grid.index(i, j);
            for (int dj = -1; dj <= 1 && !marked[idx]; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const int ni = i + di;
                    const int nj = j + dj;
                    if ((di == 0 && dj == 0) || ni < 0 || nj < 0 || ni >= r || nj >= r) {
                        continue;
                    }
                    const std::size_t n = grid.index(ni, nj);
                    if (oracle.blocked[n] || parent[n] != parent[idx]) {
                        marked[idx] = 1;
                        break;
                    }
                }
            }
        }
    }

    ComparisonReport report;
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            const std::size_t idx = grid.index(i, j);
            if (oracle.blocked[idx]) {
                continue;
            }
            ++report.total_free_pixels;
            const double a = dist[idx];
            const double b = oracle.distance[idx];
            const double err = (a == b) ? 0.0 : std::abs(a - b);
            report.max_abs_error = std::max(report.max_abs_error, std::isnan(err) ? kInf : err);
            if (err <= tolerance) {
                ++report.matched;
                continue;
            }
            report.mismatch_locations.push_back(idx);
            bool near_mark = false;
            for (int dj = -1; dj <= 1 && !near_mark; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const int ni = i + di;
                    const int nj = j + dj;
                    if (ni >= 0 && nj >= 0 && ni < r && nj < r && marked[grid.index(ni, nj)]) {
                        near_mark = true;
                        break;
                    }
                }
            }
            report.boundary_confined = report.boundary_confined && near_mark;
        }
    }
    return report;
}

} // namespace spm
