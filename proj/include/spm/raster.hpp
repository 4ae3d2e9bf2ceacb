#pragma once

#include "spm/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace spm {

inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

/// Pixel grid of resolution r x r covering a rectangular domain.
/// Pixel (i, j) has column i (x) and row j (y), stored row-major.
struct RasterGrid {
    Rect domain;
    int resolution = 0;

    double pixel_width() const { return domain.width() / resolution; }
    double pixel_height() const { return domain.height() / resolution; }
    double center_x(int i) const { return domain.min.x + (i + 0.5) * domain.width() / resolution; }
    double center_y(int j) const { return domain.min.y + (j + 0.5) * domain.height() / resolution; }
    Point2 center(int i, int j) const { return {center_x(i), center_y(j)}; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(i);
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
    }
    /// Half-open cells, last row and column closed. p must lie in the domain.
    int column_of(double x) const;
    int row_of(double y) const;
};

/// Triangle stored counter-clockwise. Pixel coverage is inclusive: centers on
/// an edge or vertex count as covered.
struct Triangle {
    Point2 a;
    Point2 b;
    Point2 c;

    static Triangle make(Point2 a, Point2 b, Point2 c) {
        return orient2d(a, b, c) < 0.0 ? Triangle{a, c, b} : Triangle{a, b, c};
    }
    bool covers(Point2 p) const {
        const double ab = orient2d(a, b, p);
        const double bc = orient2d(b, c, p);
        const double ca = orient2d(c, a, p);
        if (ab < 0.0 || bc < 0.0 || ca < 0.0) {
            return false;
        }
        if (ab > 0.0 || bc > 0.0 || ca > 0.0) {
            return true;
        }
        // Degenerate triangle with p on its supporting line: covered within the segment.
        return p.x >= std::min({a.x, b.x, c.x}) && p.x <= std::max({a.x, b.x, c.x}) &&
               p.y >= std::min({a.y, b.y, c.y}) && p.y <= std::max({a.y, b.y, c.y});
    }
};

struct StencilGrid {
    int resolution = 0;
    std::vector<std::uint8_t> cells;  // 1 = in shadow

    StencilGrid() = default;
    explicit StencilGrid(int r) : resolution(r), cells(static_cast<std::size_t>(r) * r, 0) {}
    bool at(int i, int j) const { return cells[static_cast<std::size_t>(j) * resolution + i] != 0; }
    friend bool operator==(const StencilGrid&, const StencilGrid&) = default;
};

struct Pixel {
    double parent_x = 0.0;
    double parent_y = 0.0;
    double distance = kUnreached;
    std::int32_t parent_id = -1;

    bool reached() const { return parent_id >= 0; }
    Point2 parent() const { return {parent_x, parent_y}; }
};

/// Structure-of-arrays framebuffer; the red/green/blue/alpha channels of the
/// shader version become parent_x/parent_y/distance/parent_id.
class Framebuffer {
public:
    Framebuffer() = default;
    Framebuffer(const Rect& domain, int resolution);

    const RasterGrid& grid() const { return grid_; }
    int resolution() const { return grid_.resolution; }

    Pixel pixel(int i, int j) const { return pixel_at(grid_.index(i, j)); }
    Pixel pixel_at(std::size_t idx) const {
        return {parent_x_[idx], parent_y_[idx], distance_[idx], parent_id_[idx]};
    }
    void write(std::size_t idx, Point2 parent, double dist, std::int32_t id) {
        parent_x_[idx] = parent.x;
        parent_y_[idx] = parent.y;
        distance_[idx] = dist;
        parent_id_[idx] = id;
    }

    std::vector<double>& parent_x() { return parent_x_; }
    std::vector<double>& parent_y() { return parent_y_; }
    std::vector<double>& distances() { return distance_; }
    std::vector<std::int32_t>& parent_ids() { return parent_id_; }
    const std::vector<double>& parent_x() const { return parent_x_; }
    const std::vector<double>& parent_y() const { return parent_y_; }
    const std::vector<double>& distances() const { return distance_; }
    const std::vector<std::int32_t>& parent_ids() const { return parent_id_; }

    friend bool operator==(const Framebuffer&, const Framebuffer&) = default;

private:
    RasterGrid grid_;
    std::vector<double> parent_x_;
    std::vector<double> parent_y_;
    std::vector<double> distance_;
    std::vector<std::int32_t> parent_id_;
};

inline bool operator==(const RasterGrid& a, const RasterGrid& b) {
    return a.domain == b.domain && a.resolution == b.resolution;
}

/// A cone apex: either a point or a sub-segment of a segment source, at an
/// accumulated distance.
struct ConeApex {
    Point2 p1;
    Point2 p2;
    bool segment = false;
    double distance = 0.0;
    std::int32_t id = -1;

    /// Candidate distance for q and the point q would aim at.
    double reach(Point2 q, Point2& aim) const {
        if (segment) {
            const Projection pr = project_on_segment(q, p1, p2);
            aim = pr.foot;
            return pr.dist + distance;
        }
        aim = p1;
        return spm::distance(q, p1) + distance;
    }
};

} // namespace spm
