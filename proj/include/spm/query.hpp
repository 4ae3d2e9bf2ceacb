#pragma once

#include "spm/engine.hpp"

#include <span>
#include <utility>
#include <vector>

namespace spm {

struct PathPolyline {
    std::vector<Point2> points;  // query point first, source contact last
    double length = 0.0;
};

struct Isoline {
    double level = 0.0;
    std::vector<std::vector<Point2>> polylines;  // closed ones repeat their first point
};

struct ParentChoice {
    Point2 point;
    std::int32_t id = -1;
};

/// Pixel indices holding p. Throws DomainError outside the domain.
std::pair<int, int> locate_cell(Point2 p, const SpmResult& spm);
Pixel locate(Point2 p, const SpmResult& spm);

/// Among the parents of the 3x3 neighbourhood that p can see, the one giving
/// the shortest total; the pixel's own parent when none is visible.
ParentChoice refine_parent(Point2 p, const SpmResult& spm);

/// Geodesic distance at p's exact coordinates through its pixel's parent.
/// Throws DomainError inside obstacles and NoPathError on unreached pixels.
double query_distance(Point2 p, const SpmResult& spm, bool refine = false);

PathPolyline shortest_path(Point2 p, const SpmResult& spm, bool refine = false);

/// Marching squares over pixel centers; cells touching unreached pixels are skipped.
std::vector<Isoline> extract_isolines(const SpmResult& spm, std::span<const double> levels);

} // namespace spm
