#pragma once

#include "spm/engine.hpp"
#include "spm/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace spm::test {

inline std::filesystem::path scene_path(const std::string& name) {
    return std::filesystem::path(SPM_SCENES_DIR) / (name + ".json");
}

inline Polygon square(double cx, double cy, double half) {
    return Polygon({{cx - half, cy - half}, {cx + half, cy - half}, {cx + half, cy + half}, {cx - half, cy + half}});
}

inline Scene square_scene() { return Scene(Rect{}, {square(0.0, 0.0, 0.25)}); }

inline Scene triangle_scene() { return Scene(Rect{}, {Polygon({{0.4, 0.0}, {0.7, 0.2}, {0.4, 0.4}})}); }

inline SourceSpec point_sources(std::vector<Point2> points) {
    SourceSpec s;
    s.points = std::move(points);
    return s;
}

inline SourceSpec segment_source(Point2 a, Point2 b) {
    SourceSpec s;
    s.segments.emplace_back(a, b);
    return s;
}

inline EngineConfig config(int resolution, Execution execution = Execution::parallel) {
    EngineConfig c;
    c.resolution = resolution;
    c.execution = execution;
    return c;
}

// Brute-force geometry kept apart from the library so tests can derive
// expected values without trusting the code under test.
namespace brute {

inline double orient(Point2 a, Point2 b, Point2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool proper_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

// Winding number of a closed polygon around p (p assumed off the boundary).
inline int winding(Point2 p, std::span<const Point2> poly) {
    int w = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        if (a.y <= p.y) {
            if (b.y > p.y && orient(a, b, p) > 0) ++w;
        } else if (b.y <= p.y && orient(a, b, p) < 0) {
            --w;
        }
    }
    return w;
}

// Sight line blocked by a proper edge crossing or by passing through an
// interior, sampled at many points along the segment.
inline bool visible(Point2 p, Point2 q, const std::vector<std::vector<Point2>>& polys) {
    for (const auto& poly : polys) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (proper_cross(p, q, poly[i], poly[(i + 1) % poly.size()])) return false;
        }
        for (int k = 1; k < 64; ++k) {
            const double t = k / 64.0;
            const Point2 m{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
            bool on_edge = false;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const Point2 a = poly[i];
                const Point2 b = poly[(i + 1) % poly.size()];
                const double len = std::hypot(b.x - a.x, b.y - a.y);
                const double along = ((m.x - a.x) * (b.x - a.x) + (m.y - a.y) * (b.y - a.y)) / (len * len);
                if (std::abs(orient(a, b, m)) / len < 1e-12 && along >= -1e-12 && along <= 1 + 1e-12) {
                    on_edge = true;
                }
            }
            if (!on_edge && winding(m, poly) != 0) return false;
        }
    }
    return true;
}

inline std::vector<std::vector<Point2>> polygons_of(const Scene& scene) {
    std::vector<std::vector<Point2>> out;
    for (const Polygon& poly : scene.obstacles()) {
        out.emplace_back(poly.vertices().begin(), poly.vertices().end());
    }
    return out;
}

} // namespace brute

// Disjoint convex polygons scattered over the domain.
inline Scene random_scene(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Disk {
        double x, y, r;
    };
    std::vector<Disk> placed;
    std::vector<Polygon> polys;
    for (int attempt = 0; attempt < 2000 && static_cast<int>(polys.size()) < count; ++attempt) {
        const double r = 0.06 + 0.12 * unit(rng);
        const double cx = -0.85 + 1.7 * unit(rng);
        const double cy = -0.85 + 1.7 * unit(rng);
        bool clash = false;
        for (const Disk& d : placed) {
            clash = clash || std::hypot(cx - d.x, cy - d.y) < r + d.r + 0.04;
        }
        if (clash) continue;
        const int sides = 3 + static_cast<int>(unit(rng) * 5);
        const double phase = 6.283185307179586 * unit(rng);
        std::vector<Point2> verts;
        for (int k = 0; k < sides; ++k) {
            const double a = phase + 6.283185307179586 * k / sides;
            const double rr = r * (0.7 + 0.3 * unit(rng));
            verts.push_back({cx + rr * std::cos(a), cy + rr * std::sin(a)});
        }
        placed.push_back({cx, cy, r});
        polys.emplace_back(std::move(verts));
    }
    return Scene(Rect{}, std::move(polys));
}

// A random source point in free space, at least `clearance` from every obstacle.
inline Point2 random_free_point(std::mt19937_64& rng, const Scene& scene, double clearance = 0.02) {
    std::uniform_real_distribution<double> coord(-0.95, 0.95);
    for (;;) {
        const Point2 p{coord(rng), coord(rng)};
        if (scene.classify(p) != Containment::outside) continue;
        bool near = false;
        for (const ObstacleEdge& e : scene.edges()) {
            near = near || project_on_segment(p, e.segment).dist < clearance;
        }
        if (!near) return p;
    }
}

inline Scene grid_scene(int k) {
    const double pitch = 2.0 / k;
    std::vector<Polygon> squares;
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            squares.push_back(square(-1.0 + pitch * (i + 0.5), -1.0 + pitch * (j + 0.5), pitch / 4.0));
        }
    }
    return Scene(Rect{}, std::move(squares));
}

} // namespace spm::test
