#include "spm/engine.hpp"
#include "spm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace spm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleSlack = 1e-6;
constexpr double kDepthSlack = 1e-6;

// Shared by neighbouring edges so their triangles meet on identical points.
Point2 far_point(Point2 p, Point2 g, double c) {
    return p + c * normalize(p - g);
}

struct Caster {
    Point2 p1;
    Point2 p2;
    double start = 0.0;  // counter-clockwise angular sector [start, start + width]
    double width = 0.0;
    double near = 0.0;
    double far = 0.0;
    bool occluder = false;
};

struct Wedge {
    double start = 0.0;
    double width = 0.0;
};

bool incident(const ObstacleEdge& e, const Scene& scene, const DataEntry& g) {
    if (g.kind != EntryKind::vertex) {
        return false;
    }
    const VertexRef v = scene.vertex_ref(g.ref);
    if (v.polygon != e.polygon) {
        return false;
    }
    const std::size_t n = scene.obstacles()[e.polygon].size();
    return v.local == e.local || v.local == (e.local + 1) % n;
}

// Directions from a vertex generator that point straight into its own polygon.
std::optional<Wedge> interior_wedge(const Scene& scene, const DataEntry& g) {
    if (g.kind != EntryKind::vertex) {
        return std::nullopt;
    }
    const VertexRef v = scene.vertex_ref(g.ref);
    const Polygon& poly = scene.obstacles()[v.polygon];
    const Point2 next = poly.vertex(v.local + 1) - g.p1;
    const Point2 prev = poly.vertex(v.local + poly.size() - 1) - g.p1;
    const double start = std::atan2(next.y, next.x);
    double width = std::atan2(prev.y, prev.x) - start;
    while (width <= 0.0) {
        width += 2.0 * kPi;
    }
    return Wedge{start, width};
}

void emit_edge(std::vector<Triangle>& out, Point2 p1, Point2 p2, Point2 g, double c) {
    const Point2 pm = 0.5 * (p1 + p2);
    const Point2 p1s = far_point(p1, g, c);
    const Point2 p2s = far_point(p2, g, c);
    const Point2 pms = far_point(pm, g, c);
    out.push_back(Triangle::make(p1, pms, p1s));
    out.push_back(Triangle::make(p2, p2s, pms));
    out.push_back(Triangle::make(p1, p2, pms));
}

void emit_wedge(std::vector<Triangle>& out, Point2 g, const Wedge& w, double reach) {
    const int pieces = static_cast<int>(std::ceil(w.width / (kPi / 3.0)));
    std::vector<Point2> rim(pieces + 1);
    for (int i = 0; i <= pieces; ++i) {
        const double a = w.start + w.width * i / pieces;
        rim[i] = g + reach * Point2{std::cos(a), std::sin(a)};
    }
    for (int i = 0; i < pieces; ++i) {
        out.push_back(Triangle::make(g, rim[i], rim[i + 1]));
    }
}

std::optional<Caster> make_caster(const ObstacleEdge& e, const Scene& scene, const DataEntry& g,
                                  const EngineConfig& config) {
    const Point2 apex = g.p1;
    if (incident(e, scene, g) || !front_facing(e.segment, apex, config.front_facing_threshold)) {
        return std::nullopt;
    }
    Caster c;
    c.p1 = e.segment.a();
    c.p2 = e.segment.b();
    const Point2 u = c.p1 - apex;
    const Point2 v = c.p2 - apex;
    const double a1 = std::atan2(u.y, u.x);
    const double sweep = std::remainder(std::atan2(v.y, v.x) - a1, 2.0 * kPi);
    c.start = sweep >= 0.0 ? a1 : a1 + sweep;
    c.width = std::abs(sweep);
    c.near = project_on_segment(apex, c.p1, c.p2).dist;
    c.far = std::max(norm(u), norm(v));
    // An occluder must hide its whole sector from its far endpoint out to
    // the edge of the domain, with rays meeting the edge at a usable angle.
    const Point2 d = c.p2 - c.p1;
    const double len = norm(d);
    const double sin1 = std::abs(cross(apex - c.p1, d)) / (norm(u) * len);
    const double sin2 = std::abs(cross(apex - c.p2, d)) / (norm(v) * len);
    c.occluder = c.width < kPi / 2.0 && config.shadow_vector_factor * std::cos(c.width / 2.0) >
                                            scene.domain().diameter() + kDepthSlack &&
                 sin1 > 1e-3 && sin2 > 1e-3 && c.near > kDepthSlack;
    return c;
}

std::vector<Caster> casters(const Scene& scene, const DataEntry& g, const EngineConfig& config) {
    std::vector<Caster> out;
    for (const ObstacleEdge& e : scene.edges()) {
        if (const auto c = make_caster(e, scene, g, config)) {
            out.push_back(*c);
        }
    }
    return out;
}

} // namespace

std::vector<Triangle> shadow_triangles(const Scene& scene, const DataEntry& g, const EngineConfig& config) {
    std::vector<Triangle> out;
    const double c = config.shadow_vector_factor;
    for (const Caster& k : casters(scene, g, config)) {
        emit_edge(out, k.p1, k.p2, g.p1, c);
    }
    if (const auto w = interior_wedge(scene, g)) {
        emit_wedge(out, g.p1, *w, 2.0 * c);
    }
    return out;
}

void plan_shadow(const Scene& scene, const DataEntry& g, const EngineConfig& config, ShadowPlan& plan) {
    const Point2 apex = g.p1;
    const auto wedge = interior_wedge(scene, g);
    const auto own = g.kind == EntryKind::vertex ? std::optional(scene.vertex_ref(g.ref).polygon) : std::nullopt;

    plan.triangles.clear();
    ShadowProfile& profile = plan.profile;
    profile.reset();
    if (wedge) {
        profile.cover(wedge->start + kAngleSlack, wedge->start + wedge->width - kAngleSlack, kDepthSlack);
    }

    // Obstacles nearest first, by bounding circle; one whose circle already
    // lies behind the covers so far casts nothing that is not shadowed.
    struct Ring {
        std::uint32_t polygon;
        Point2 center;
        double radius;
        double near;
    };
    const auto polygons = scene.obstacles();
    std::vector<Ring> rings(polygons.size());
    std::vector<std::uint32_t> first_edge(polygons.size() + 1, 0);
    for (std::uint32_t p = 0; p < polygons.size(); ++p) {
        const Rect box = polygons[p].bounds();
        const Point2 center = 0.5 * (box.min + box.max);
        const double radius = 0.5 * norm(box.max - box.min) * (1.0 + 1e-12);
        rings[p] = {p, center, radius, distance(apex, center) - radius};
        first_edge[p + 1] = first_edge[p] + static_cast<std::uint32_t>(polygons[p].size());
    }
    std::sort(rings.begin(), rings.end(), [](const Ring& a, const Ring& b) {
        return a.near != b.near ? a.near < b.near : a.polygon < b.polygon;
    });

    std::vector<Caster> all;
    for (const Ring& ring : rings) {
        if (ring.polygon != own && ring.near > kDepthSlack) {
            const Point2 to = ring.center - apex;
            const double half = std::asin(std::min(1.0, ring.radius / norm(to)));
            const double mid = std::atan2(to.y, to.x);
            if (profile.cover_depth(mid - half - kAngleSlack, mid + half + kAngleSlack) < ring.near - kDepthSlack) {
                continue;
            }
        }
        for (std::uint32_t e = first_edge[ring.polygon]; e < first_edge[ring.polygon + 1]; ++e) {
            if (const auto k = make_caster(scene.edges()[e], scene, g, config)) {
                if (k->occluder) {
                    profile.cover_edge(apex, k->p1, k->p2, k->start + kAngleSlack, k->start + k->width - kAngleSlack,
                                       kDepthSlack);
                }
                all.push_back(*k);
            }
        }
    }
    profile.seal_cover();

    const double c = config.shadow_vector_factor;
    auto add = [&](double lo, double hi, double near) {
        profile.add_triangles(static_cast<std::uint32_t>(plan.triangles.size() - 3), 3, lo, hi, near);
    };
    for (const Caster& k : all) {
        if (profile.hidden_beyond(k.start - kAngleSlack, k.start + k.width + kAngleSlack) < k.near - kDepthSlack) {
            continue;
        }
        emit_edge(plan.triangles, k.p1, k.p2, apex, c);
        if (k.near > kDepthSlack) {
            add(k.start - kAngleSlack, k.start + k.width + kAngleSlack, k.near - kDepthSlack);
        } else {
            // Too close to the apex for angular bounds to hold.
            add(-kPi, 3.0 * kPi, 0.0);
        }
    }
    if (wedge) {
        const std::size_t before = plan.triangles.size();
        emit_wedge(plan.triangles, apex, *wedge, 2.0 * c);
        const std::size_t pieces = plan.triangles.size() - before;
        for (std::size_t i = 0; i < pieces; ++i) {
            const double lo = wedge->start + wedge->width * static_cast<double>(i) / pieces;
            const double hi = wedge->start + wedge->width * static_cast<double>(i + 1) / pieces;
            profile.add_triangles(static_cast<std::uint32_t>(before + i), 1, lo - kAngleSlack, hi + kAngleSlack, 0.0);
        }
    }
    profile.finalize();
}

ShadowPlan plan_shadow(const Scene& scene, const DataEntry& g, const EngineConfig& config) {
    ShadowPlan plan;
    plan_shadow(scene, g, config, plan);
    return plan;
}

StencilGrid shadow_mask(const Scene& scene, const DataEntry& g, const EngineConfig& config) {
    const RasterGrid grid{scene.domain(), config.resolution};
    StencilGrid stencil(config.resolution);
    if (g.is_segment()) {
        const int r = config.resolution;
#pragma omp parallel for schedule(dynamic, 4) if (config.execution == Execution::parallel)
        for (int j = 0; j < r; ++j) {
            for (int i = 0; i < r; ++i) {
                const Point2 center = grid.center(i, j);
                const Point2 foot = project_on_segment(center, g.p1, g.p2).foot;
                if (!scene.line_of_sight(center, foot)) {
                    stencil.cells[grid.index(i, j)] = 1;
                }
            }
        }
        return stencil;
    }
    const std::vector<Triangle> tris = shadow_triangles(scene, g, config);
    if (config.execution == Execution::parallel) {
        rasterize_parallel(tris, grid, stencil);
    } else {
        rasterize_serial(tris, grid, stencil);
    }
    return stencil;
}

} // namespace spm
