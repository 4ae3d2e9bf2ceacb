#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spm {

/// Absolute tolerance for the orientation-based predicates. Coordinates are
/// normalized, so this is a length-squared scale.
inline constexpr double kGeomEps = 1e-12;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Unit vector along `a`; the zero vector maps to itself.
inline Point2 normalize(Point2 a) {
    const double n = norm(a);
    return n > 0.0 ? Point2{a.x / n, a.y / n} : Point2{0.0, 0.0};
}

/// Twice the signed area of (a, b, c), positive when counter-clockwise.
///
/// The value is computed relative to the lexicographically smaller of a and b,
/// so orient2d(a, b, c) == -orient2d(b, a, c) holds bit for bit. Triangles that
/// share an edge therefore classify points on that edge consistently.
inline double orient2d(Point2 a, Point2 b, Point2 c) {
    const bool swap = (b.x < a.x) || (b.x == a.x && b.y < a.y);
    if (swap) {
        return -((a.x - b.x) * (c.y - b.y) - (a.y - b.y) * (c.x - b.x));
    }
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Directed segment with distinct endpoints.
class Segment2 {
public:
    /// Throws ValidationError when the endpoints coincide or are not finite.
    Segment2(Point2 a, Point2 b);

    Point2 a() const { return a_; }
    Point2 b() const { return b_; }
    Point2 midpoint() const { return 0.5 * (a_ + b_); }
    double length() const { return distance(a_, b_); }
    Segment2 reversed() const { return Segment2(b_, a_); }

    friend bool operator==(const Segment2&, const Segment2&) = default;

private:
    Point2 a_;
    Point2 b_;
};

struct Rect {
    Point2 min{-1.0, -1.0};
    Point2 max{1.0, 1.0};

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double diameter() const { return std::hypot(width(), height()); }
    bool contains(Point2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Containment : std::uint8_t { inside, boundary, outside };

/// Simple polygon stored counter-clockwise.
class Polygon {
public:
    /// Validates (>= 3 finite vertices, non-degenerate edges, simple, non-zero
    /// area) and reorders clockwise input to counter-clockwise.
    explicit Polygon(std::vector<Point2> vertices);

    std::span<const Point2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    Point2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
    Segment2 edge(std::size_t i) const { return Segment2(vertex(i), vertex(i + 1)); }
    Rect bounds() const { return bounds_; }
    double signed_area() const;
    /// True when the input was clockwise and got reversed.
    bool was_reversed() const { return reversed_; }

private:
    std::vector<Point2> vertices_;
    Rect bounds_;
    bool reversed_ = false;
};

struct Projection {
    double t = 0.0;  // clamped to [0, 1]
    Point2 foot;
    double dist = 0.0;
};

/// True iff the open interiors of the segments cross at a single point.
/// Shared endpoints, T-contacts and collinear overlap are not proper.
bool segments_properly_intersect(const Segment2& s1, const Segment2& s2);

/// True iff p lies on segment [a, b] within kGeomEps.
bool point_on_segment(Point2 p, Point2 a, Point2 b);

/// Three-way classification; `boundary` means within 1e-12 of an edge.
Containment point_in_polygon(Point2 p, const Polygon& poly);

/// Orthogonal projection of p onto s, clamped to the segment.
Projection project_on_segment(Point2 p, const Segment2& s);
Projection project_on_segment(Point2 p, Point2 a, Point2 b);

/// Dot product between the direction from g to the edge midpoint and the
/// edge's outward normal (dy, -dx). Zero when g sits on the midpoint.
double facing_dot(const Segment2& e, Point2 g);

/// Edge e casts a shadow for generator g when facing_dot(e, g) < threshold.
bool front_facing(const Segment2& e, Point2 g, double threshold = 0.1);

struct ObstacleEdge {
    Segment2 segment;
    std::uint32_t polygon;
    std::uint32_t local;  // edge i joins vertex i and vertex i + 1
};

struct VertexRef {
    std::uint32_t polygon;
    std::uint32_t local;
};

/// Rectangular domain plus pairwise-disjoint polygonal obstacles.
///
/// Construction builds a uniform bucket grid over the obstacle edges, so
/// line-of-sight queries only visit edges near the query segment.
class Scene {
public:
    Scene();
    explicit Scene(Rect domain, std::vector<Polygon> obstacles = {});

    const Rect& domain() const { return domain_; }
    std::span<const Polygon> obstacles() const { return obstacles_; }
    std::span<const ObstacleEdge> edges() const { return edges_; }
    std::size_t vertex_count() const { return vertex_refs_.size(); }

    Point2 vertex(std::size_t global) const;
    VertexRef vertex_ref(std::size_t global) const { return vertex_refs_[global]; }
    std::size_t global_vertex(std::size_t polygon, std::size_t local) const;

    /// inside: strictly inside some obstacle; boundary: on an obstacle boundary.
    Containment classify(Point2 p) const;

    /// Segment pq does not pass through the interior of any obstacle.
    /// Grazing a vertex or running along an edge does not block.
    bool line_of_sight(Point2 p, Point2 q) const;

private:
    struct Grid {
        Point2 origin;
        double cell_w = 1.0;
        double cell_h = 1.0;
        int cols = 1;
        int rows = 1;
        std::vector<std::uint32_t> edge_offsets;
        std::vector<std::uint32_t> edge_ids;
        std::vector<std::uint32_t> poly_offsets;
        std::vector<std::uint32_t> poly_ids;

        int col_of(double x) const;
        int row_of(double y) const;
        template <class Fn>
        void for_each_cell(Point2 p, Point2 q, double margin, Fn&& fn) const;
    };

    void validate() const;
    void build_index();
    bool strictly_inside_polygon_at(Point2 p, std::uint32_t poly) const;

    Rect domain_;
    std::vector<Polygon> obstacles_;
    std::vector<ObstacleEdge> edges_;
    std::vector<VertexRef> vertex_refs_;
    std::vector<std::size_t> vertex_offsets_;
    Grid grid_;
};

inline bool line_of_sight(Point2 p, Point2 q, const Scene& scene) {
    return scene.line_of_sight(p, q);
}

} // namespace spm
