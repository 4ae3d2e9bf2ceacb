#include "spm/geometry.hpp"

#include "spm/errors.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace spm {

namespace {

// Proper crossing of the open segments (a, b) and (c, d).
bool properly_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double o1 = orient2d(a, b, c);
    const double o2 = orient2d(a, b, d);
    if (!((o1 > kGeomEps && o2 < -kGeomEps) || (o1 < -kGeomEps && o2 > kGeomEps))) {
        return false;
    }
    const double o3 = orient2d(c, d, a);
    const double o4 = orient2d(c, d, b);
    return (o3 > kGeomEps && o4 < -kGeomEps) || (o3 < -kGeomEps && o4 > kGeomEps);
}

bool closed_segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
    return properly_cross(a, b, c, d) || point_on_segment(c, a, b) || point_on_segment(d, a, b) ||
           point_on_segment(a, c, d) || point_on_segment(b, c, d);
}

bool boxes_overlap(const Rect& r, const Rect& s, double margin) {
    return r.min.x <= s.max.x + margin && s.min.x <= r.max.x + margin &&
           r.min.y <= s.max.y + margin && s.min.y <= r.max.y + margin;
}

Rect bounds_of(std::span<const Point2> pts) {
    Rect r{pts.front(), pts.front()};
    for (const Point2& p : pts) {
        r.min.x = std::min(r.min.x, p.x);
        r.min.y = std::min(r.min.y, p.y);
        r.max.x = std::max(r.max.x, p.x);
        r.max.y = std::max(r.max.y, p.y);
    }
    return r;
}

double param_along(Point2 x, Point2 a, Point2 b) {
    const Point2 d = b - a;
    return std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
}

constexpr double kCellMargin = 1e-9;

} // namespace

Segment2::Segment2(Point2 a, Point2 b) : a_(a), b_(b) {
    if (!is_finite(a) || !is_finite(b)) {
        throw ValidationError("segment endpoints must be finite");
    }
    if (a == b) {
        throw ValidationError("segment endpoints coincide");
    }
}

bool segments_properly_intersect(const Segment2& s1, const Segment2& s2) {
    return properly_cross(s1.a(), s1.b(), s2.a(), s2.b());
}

bool point_on_segment(Point2 p, Point2 a, Point2 b) {
    if (std::abs(orient2d(a, b, p)) > kGeomEps) {
        return false;
    }
    return dot(p - a, b - a) >= -kGeomEps && dot(p - b, a - b) >= -kGeomEps;
}

Projection project_on_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
    if (t > 0.0 && t < 1.0 && cross(d, p - a) == 0.0) {
        return {t, p, 0.0};  // exactly on the segment
    }
    const Point2 foot = a + t * d;
    return {t, foot, distance(p, foot)};
}

Projection project_on_segment(Point2 p, const Segment2& s) {
    return project_on_segment(p, s.a(), s.b());
}

double facing_dot(const Segment2& e, Point2 g) {
    const Point2 to_mid = e.midpoint() - g;
    if (to_mid.x == 0.0 && to_mid.y == 0.0) {
        return 0.0;
    }
    const Point2 d = e.b() - e.a();
    return dot(normalize(to_mid), normalize(Point2{d.y, -d.x}));
}

bool front_facing(const Segment2& e, Point2 g, double threshold) {
    if (e.midpoint() == g) {
        return true;
    }
    return facing_dot(e, g) < threshold;
}

Containment point_in_polygon(Point2 p, const Polygon& poly) {
    const auto v = poly.vertices();
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (project_on_segment(p, v[j], v[i]).dist <= kGeomEps) {
            return Containment::boundary;
        }
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double x = v[i].x + (p.y - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y);
            if (p.x < x) {
                inside = !inside;
            }
        }
    }
    return inside ? Containment::inside : Containment::outside;
}

// ---------------------------------------------------------------------------

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) {
        throw ValidationError("polygon needs at least 3 vertices, got " + std::to_string(n));
    }
    for (const Point2& p : vertices_) {
        if (!is_finite(p)) {
            throw ValidationError("polygon vertex is not finite");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (distance(vertices_[i], vertices_[(i + 1) % n]) <= 1e-9) {
            throw ValidationError("polygon edge " + std::to_string(i) + " is degenerate");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = vertices_[i];
        const Point2 b = vertices_[(i + 1) % n];
        // The next edge must not fold back over this one.
        const Point2 c = vertices_[(i + 2) % n];
        if (point_on_segment(c, a, b) || point_on_segment(a, b, c)) {
            throw ValidationError("polygon self-intersects at vertex " + std::to_string((i + 1) % n));
        }
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) {
                continue;  // adjacent through the closing edge
            }
            if (closed_segments_touch(a, b, vertices_[j], vertices_[(j + 1) % n])) {
                throw ValidationError("polygon self-intersects: edges " + std::to_string(i) + " and " +
                                      std::to_string(j));
            }
        }
    }
    const double area = signed_area();
    if (area == 0.0) {
        throw ValidationError("polygon has zero area");
    }
    if (area < 0.0) {
        std::reverse(vertices_.begin(), vertices_.end());
        reversed_ = true;
    }
    bounds_ = bounds_of(vertices_);
}

double Polygon::signed_area() const {
    double twice = 0.0;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(vertices_[i], vertices_[(i + 1) % n]);
    }
    return 0.5 * twice;
}

// ---------------------------------------------------------------------------

int Scene::Grid::col_of(double x) const {
    const double c = std::floor((x - origin.x) / cell_w);
    return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(cols - 1)));
}

int Scene::Grid::row_of(double y) const {
    const double r = std::floor((y - origin.y) / cell_h);
    return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(rows - 1)));
}

// Visits every cell the segment pq (inflated by margin) may touch. Stops when
// fn returns false.
template <class Fn>
void Scene::Grid::for_each_cell(Point2 p, Point2 q, double margin, Fn&& fn) const {
    const double ylo = std::min(p.y, q.y) - margin;
    const double yhi = std::max(p.y, q.y) + margin;
    const int r0 = row_of(ylo);
    const int r1 = row_of(yhi);
    const double dy = q.y - p.y;
    for (int r = r0; r <= r1; ++r) {
        const double lo = std::max(origin.y + r * cell_h - margin, ylo);
        const double hi = std::min(origin.y + (r + 1) * cell_h + margin, yhi);
        double xa;
        double xb;
        if (std::abs(dy) < 1e-12) {
            xa = std::min(p.x, q.x);
            xb = std::max(p.x, q.x);
        } else {
            const double t0 = std::clamp((lo - p.y) / dy, 0.0, 1.0);
            const double t1 = std::clamp((hi - p.y) / dy, 0.0, 1.0);
            const double x0 = p.x + t0 * (q.x - p.x);
            const double x1 = p.x + t1 * (q.x - p.x);
            xa = std::min(x0, x1);
            xb = std::max(x0, x1);
        }
        const int c0 = col_of(xa - margin);
        const int c1 = col_of(xb + margin);
        for (int c = c0; c <= c1; ++c) {
            if (!fn(r * cols + c)) {
                return;
            }
        }
    }
}

Scene::Scene() : Scene(Rect{}) {}

Scene::Scene(Rect domain, std::vector<Polygon> obstacles)
    : domain_(domain), obstacles_(std::move(obstacles)) {
    if (!(domain_.width() > 0.0) || !(domain_.height() > 0.0) || !is_finite(domain_.min) ||
        !is_finite(domain_.max)) {
        throw ValidationError("domain must be a finite rectangle with positive extent");
    }
    for (std::uint32_t p = 0; p < obstacles_.size(); ++p) {
        vertex_offsets_.push_back(vertex_refs_.size());
        const Polygon& poly = obstacles_[p];
        for (std::uint32_t i = 0; i < poly.size(); ++i) {
            vertex_refs_.push_back({p, i});
            edges_.push_back({poly.edge(i), p, i});
        }
    }
    validate();
    build_index();
}

Point2 Scene::vertex(std::size_t global) const {
    const VertexRef ref = vertex_refs_[global];
    return obstacles_[ref.polygon].vertex(ref.local);
}

std::size_t Scene::global_vertex(std::size_t polygon, std::size_t local) const {
    return vertex_offsets_[polygon] + local % obstacles_[polygon].size();
}

void Scene::validate() const {
    for (std::size_t p = 0; p < obstacles_.size(); ++p) {
        for (const Point2& v : obstacles_[p].vertices()) {
            if (!domain_.contains(v)) {
                throw ValidationError("obstacle " + std::to_string(p) + " has a vertex outside the domain");
            }
        }
    }
    for (std::size_t p = 0; p < obstacles_.size(); ++p) {
        for (std::size_t q = p + 1; q < obstacles_.size(); ++q) {
            const Polygon& a = obstacles_[p];
            const Polygon& b = obstacles_[q];
            if (!boxes_overlap(a.bounds(), b.bounds(), 1e-9)) {
                continue;
            }
            for (std::size_t i = 0; i < a.size(); ++i) {
                for (std::size_t j = 0; j < b.size(); ++j) {
                    if (closed_segments_touch(a.vertex(i), a.vertex(i + 1), b.vertex(j), b.vertex(j + 1))) {
                        throw ValidationError("obstacles " + std::to_string(p) + " and " + std::to_string(q) +
                                              " intersect or touch");
                    }
                }
            }
            if (point_in_polygon(a.vertex(0), b) != Containment::outside ||
                point_in_polygon(b.vertex(0), a) != Containment::outside) {
                throw ValidationError("obstacles " + std::to_string(p) + " and " + std::to_string(q) +
                                      " are nested");
            }
        }
    }
}

void Scene::build_index() {
    Grid& g = grid_;
    const double side = std::ceil(std::sqrt(static_cast<double>(edges_.size())));
    const int n = static_cast<int>(std::clamp(side, 1.0, 128.0));
    g.origin = domain_.min;
    g.cols = n;
    g.rows = n;
    g.cell_w = domain_.width() / n;
    g.cell_h = domain_.height() / n;

    std::vector<std::vector<std::uint32_t>> cell_edges(static_cast<std::size_t>(n) * n);
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
        const Segment2& s = edges_[e].segment;
        g.for_each_cell(s.a(), s.b(), kCellMargin, [&](int cell) {
            cell_edges[cell].push_back(e);
            return true;
        });
    }
    std::vector<std::vector<std::uint32_t>> cell_polys(cell_edges.size());
    for (std::uint32_t p = 0; p < obstacles_.size(); ++p) {
        const Rect b = obstacles_[p].bounds();
        for (int r = g.row_of(b.min.y - kCellMargin); r <= g.row_of(b.max.y + kCellMargin); ++r) {
            for (int c = g.col_of(b.min.x - kCellMargin); c <= g.col_of(b.max.x + kCellMargin); ++c) {
                cell_polys[r * n + c].push_back(p);
            }
        }
    }
    auto flatten = [](const std::vector<std::vector<std::uint32_t>>& lists, std::vector<std::uint32_t>& offsets,
                      std::vector<std::uint32_t>& ids) {
        offsets.assign(1, 0);
        for (const auto& l : lists) {
            ids.insert(ids.end(), l.begin(), l.end());
            offsets.push_back(static_cast<std::uint32_t>(ids.size()));
        }
    };
    flatten(cell_edges, g.edge_offsets, g.edge_ids);
    flatten(cell_polys, g.poly_offsets, g.poly_ids);
}

bool Scene::strictly_inside_polygon_at(Point2 p, std::uint32_t poly) const {
    const Rect b = obstacles_[poly].bounds();
    if (p.x < b.min.x || p.x > b.max.x || p.y < b.min.y || p.y > b.max.y) {
        return false;
    }
    return point_in_polygon(p, obstacles_[poly]) == Containment::inside;
}

Containment Scene::classify(Point2 p) const {
    if (obstacles_.empty()) {
        return Containment::outside;
    }
    const int cell = grid_.row_of(p.y) * grid_.cols + grid_.col_of(p.x);
    Containment result = Containment::outside;
    for (std::uint32_t k = grid_.poly_offsets[cell]; k < grid_.poly_offsets[cell + 1]; ++k) {
        const Polygon& poly = obstacles_[grid_.poly_ids[k]];
        const Rect b = poly.bounds();
        if (p.x < b.min.x - kCellMargin || p.x > b.max.x + kCellMargin || p.y < b.min.y - kCellMargin ||
            p.y > b.max.y + kCellMargin) {
            continue;
        }
        const Containment c = point_in_polygon(p, poly);
        if (c == Containment::inside) {
            return c;
        }
        if (c == Containment::boundary) {
            result = c;
        }
    }
    return result;
}

bool Scene::line_of_sight(Point2 p, Point2 q) const {
    if (p == q || edges_.empty()) {
        return true;
    }
    struct Touch {
        std::uint32_t polygon;
        double t;
    };
    thread_local std::vector<Touch> touches;
    touches.clear();

    bool blocked = false;
    grid_.for_each_cell(p, q, kCellMargin, [&](int cell) {
        for (std::uint32_t k = grid_.edge_offsets[cell]; k < grid_.edge_offsets[cell + 1]; ++k) {
            const ObstacleEdge& e = edges_[grid_.edge_ids[k]];
            const Point2 c = e.segment.a();
            const Point2 d = e.segment.b();
            if (properly_cross(p, q, c, d)) {
                blocked = true;
                return false;
            }
            if (point_on_segment(c, p, q)) {
                touches.push_back({e.polygon, param_along(c, p, q)});
            }
            if (point_on_segment(d, p, q)) {
                touches.push_back({e.polygon, param_along(d, p, q)});
            }
            if (point_on_segment(p, c, d)) {
                touches.push_back({e.polygon, 0.0});
            }
            if (point_on_segment(q, c, d)) {
                touches.push_back({e.polygon, 1.0});
            }
        }
        return true;
    });
    if (blocked) {
        return false;
    }

    // Between consecutive contacts with one polygon the segment is either
    // entirely inside it or entirely outside; test each piece's midpoint.
    if (!touches.empty()) {
        std::sort(touches.begin(), touches.end(), [](const Touch& a, const Touch& b) {
            return a.polygon != b.polygon ? a.polygon < b.polygon : a.t < b.t;
        });
        std::size_t i = 0;
        while (i < touches.size()) {
            const std::uint32_t poly = touches[i].polygon;
            double prev = 0.0;
            for (; i <= touches.size(); ++i) {
                const bool last = i == touches.size() || touches[i].polygon != poly;
                const double t = last ? 1.0 : touches[i].t;
                if (t - prev > 1e-12 && strictly_inside_polygon_at(p + (0.5 * (prev + t)) * (q - p), poly)) {
                    return false;
                }
                prev = t;
                if (last) {
                    break;
                }
            }
        }
    }

    const Point2 mid = 0.5 * (p + q);
    return classify(mid) != Containment::inside;
}

} // namespace spm
