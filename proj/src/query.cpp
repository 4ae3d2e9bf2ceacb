#include "spm/query.hpp"

#include "spm/errors.hpp"

#include <algorithm>
#include <string>

namespace spm {

namespace {

std::string describe(Point2 p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

// Shared checks for distance and path queries; returns the starting parent.
ParentChoice start_of(Point2 p, const SpmResult& spm, bool refine) {
    if (spm.scene.classify(p) == Containment::inside) {
        throw DomainError("point " + describe(p) + " lies inside an obstacle");
    }
    const Pixel px = locate(p, spm);
    if (!px.reached()) {
        throw NoPathError("no path from " + describe(p) + " to any source");
    }
    return refine ? refine_parent(p, spm) : ParentChoice{px.parent(), px.parent_id};
}

} // namespace

std::pair<int, int> locate_cell(Point2 p, const SpmResult& spm) {
    const RasterGrid& grid = spm.framebuffer.grid();
    if (!is_finite(p) || !grid.domain.contains(p)) {
        throw DomainError("point " + describe(p) + " lies outside the domain");
    }
    return {grid.column_of(p.x), grid.row_of(p.y)};
}

Pixel locate(Point2 p, const SpmResult& spm) {
    const auto [i, j] = locate_cell(p, spm);
    return spm.framebuffer.pixel(i, j);
}

ParentChoice refine_parent(Point2 p, const SpmResult& spm) {
    const auto [i, j] = locate_cell(p, spm);
    const Framebuffer& fb = spm.framebuffer;
    const int r = fb.resolution();
    const Pixel own = fb.pixel(i, j);

    std::vector<std::int32_t> seen;
    ParentChoice best{own.parent(), own.parent_id};
    double best_value = kUnreached;
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            const int ni = i + di;
            const int nj = j + dj;
            if (ni < 0 || nj < 0 || ni >= r || nj >= r) {
                continue;
            }
            const std::int32_t id = fb.pixel(ni, nj).parent_id;
            if (id < 0 || std::find(seen.begin(), seen.end(), id) != seen.end()) {
                continue;
            }
            seen.push_back(id);
            Point2 aim;
            const double value = spm.data[static_cast<std::size_t>(id)].reach(p, aim);
            if (value < best_value && spm.scene.line_of_sight(p, aim)) {
                best_value = value;
                best = {aim, id};
            }
        }
    }
    return best;
}

double query_distance(Point2 p, const SpmResult& spm, bool refine) {
    const ParentChoice start = start_of(p, spm, refine);
    Point2 aim;
    return spm.data[static_cast<std::size_t>(start.id)].reach(p, aim);
}

PathPolyline shortest_path(Point2 p, const SpmResult& spm, bool refine) {
    const ParentChoice start = start_of(p, spm, refine);
    PathPolyline path;
    path.points.push_back(p);
    auto append = [&](Point2 q) {
        if (!(q == path.points.back())) {
            path.length += distance(path.points.back(), q);
            path.points.push_back(q);
        }
    };

    std::size_t id = static_cast<std::size_t>(start.id);
    const std::size_t limit = spm.data.n_total() + 1;
    for (std::size_t hop = 0;; ++hop) {
        if (hop > limit) {
            throw InternalError("parent chain from " + describe(p) + " does not terminate");
        }
        const DataEntry& e = spm.data[id];
        if (e.is_segment()) {
            append(project_on_segment(path.points.back(), e.p1, e.p2).foot);
            break;
        }
        append(e.p1);
        if (e.parent_id == e.original_index) {
            break;
        }
        const std::size_t next = static_cast<std::size_t>(e.parent_id);
        if (e.parent_id < 0 || !(spm.data[next].distance < e.distance)) {
            throw InternalError("parent chain is not strictly decreasing at entry " + std::to_string(id));
        }
        id = next;
    }
    return path;
}

} // namespace spm
