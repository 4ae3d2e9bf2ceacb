#include "spm/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace spm {

namespace {

// Slack added to estimated extents. Orientation rounding moves the covered
// set by far less than this.
constexpr double kRowSlack = 1e-8;
constexpr double kColumnSlack = 1e-7;
constexpr double kBoxSlack = 1e-6;

// Index range of pixel centers inside [lo, hi] along one axis, clamped to the
// grid. Returns first > second when empty.
std::pair<int, int> center_range(double lo, double hi, double origin, double extent, int r) {
    const double a = std::ceil((lo - origin) / extent * r - 0.5);
    const double b = std::floor((hi - origin) / extent * r - 0.5);
    const int first = static_cast<int>(std::clamp(a, 0.0, static_cast<double>(r)));
    const int last = static_cast<int>(std::clamp(b, -1.0, static_cast<double>(r - 1)));
    return {first, last};
}

} // namespace

std::pair<int, int> triangle_rows(const Triangle& t, const RasterGrid& grid) {
    const double ylo = std::min({t.a.y, t.b.y, t.c.y}) - kRowSlack;
    const double yhi = std::max({t.a.y, t.b.y, t.c.y}) + kRowSlack;
    return center_range(ylo, yhi, grid.domain.min.y, grid.domain.height(), grid.resolution);
}

std::pair<int, int> triangle_row_columns(const Triangle& t, const RasterGrid& grid, int j) {
    const double y = grid.center_y(j);
    double xl = std::numeric_limits<double>::infinity();
    double xr = -std::numeric_limits<double>::infinity();
    const Point2 v[3] = {t.a, t.b, t.c};
    for (int k = 0; k < 3; ++k) {
        const Point2 p = v[k];
        const Point2 q = v[(k + 1) % 3];
        if (y < std::min(p.y, q.y) - kRowSlack || y > std::max(p.y, q.y) + kRowSlack) {
            continue;
        }
        const double dy = q.y - p.y;
        if (std::abs(dy) < 1e-7) {
            xl = std::min({xl, p.x, q.x});
            xr = std::max({xr, p.x, q.x});
        } else {
            const double s = std::clamp((y - p.y) / dy, 0.0, 1.0);
            const double x = p.x + s * (q.x - p.x);
            xl = std::min(xl, x);
            xr = std::max(xr, x);
        }
    }
    if (xl > xr) {
        return {grid.resolution, -1};
    }
    return center_range(xl - kColumnSlack, xr + kColumnSlack, grid.domain.min.x, grid.domain.width(),
                        grid.resolution);
}

std::pair<int, int> covered_run(const Triangle& t, const RasterGrid& grid, int j, int lo, int hi) {
    auto [a, b] = triangle_row_columns(t, grid, j);
    a = std::max(a, lo);
    b = std::min(b, hi);
    const double y = grid.center_y(j);
    while (a <= b && !t.covers({grid.center_x(a), y})) {
        ++a;
    }
    while (b >= a && !t.covers({grid.center_x(b), y})) {
        --b;
    }
    return {a, b};
}

void rasterize_serial(std::span<const Triangle> tris, const RasterGrid& grid, StencilGrid& out) {
    const int r = grid.resolution;
    for (const Triangle& t : tris) {
        const auto [i0, i1] = center_range(std::min({t.a.x, t.b.x, t.c.x}) - kBoxSlack,
                                           std::max({t.a.x, t.b.x, t.c.x}) + kBoxSlack, grid.domain.min.x,
                                           grid.domain.width(), r);
        const auto [j0, j1] = center_range(std::min({t.a.y, t.b.y, t.c.y}) - kBoxSlack,
                                           std::max({t.a.y, t.b.y, t.c.y}) + kBoxSlack, grid.domain.min.y,
                                           grid.domain.height(), r);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                if (t.covers(grid.center(i, j))) {
                    out.cells[grid.index(i, j)] = 1;
                }
            }
        }
    }
}

void rasterize_parallel(std::span<const Triangle> tris, const RasterGrid& grid, StencilGrid& out) {
    const int r = grid.resolution;
    std::vector<std::pair<int, int>> rows(tris.size());
    for (std::size_t k = 0; k < tris.size(); ++k) {
        rows[k] = triangle_rows(tris[k], grid);
    }
#pragma omp parallel for schedule(dynamic, 8)
    for (int j = 0; j < r; ++j) {
        for (std::size_t k = 0; k < tris.size(); ++k) {
            if (j < rows[k].first || j > rows[k].second) {
                continue;
            }
            const auto [a, b] = covered_run(tris[k], grid, j, 0, r - 1);
            for (int i = a; i <= b; ++i) {
                out.cells[grid.index(i, j)] = 1;
            }
        }
    }
}

void cone_fill_serial(Framebuffer& fb, const StencilGrid& shadow, const ConeApex& apex) {
    const RasterGrid& grid = fb.grid();
    std::vector<double>& dist = fb.distances();
    for (int j = 0; j < grid.resolution; ++j) {
        for (int i = 0; i < grid.resolution; ++i) {
            const std::size_t idx = grid.index(i, j);
            if (shadow.cells[idx] != 0) {
                continue;
            }
            Point2 aim;
            const double nd = apex.reach(grid.center(i, j), aim);
            if (nd < dist[idx]) {
                fb.write(idx, aim, nd, apex.id);
            }
        }
    }
}

void cone_fill_parallel(Framebuffer& fb, const StencilGrid& shadow, const ConeApex& apex) {
    const RasterGrid& grid = fb.grid();
    std::vector<double>& dist = fb.distances();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < grid.resolution; ++j) {
        for (int i = 0; i < grid.resolution; ++i) {
            const std::size_t idx = grid.index(i, j);
            if (shadow.cells[idx] != 0) {
                continue;
            }
            Point2 aim;
            const double nd = apex.reach(grid.center(i, j), aim);
            if (nd < dist[idx]) {
                fb.write(idx, aim, nd, apex.id);
            }
        }
    }
}

double coarse_atan2(double y, double x) {
    // Least-squares fit of atan(t) / t in t^2 over [0, 1]; error below 5e-8.
    static constexpr double kCoeff[] = {0.9999994368431482,  -0.33330106677688925, 0.19948508985765462,
                                        -0.1391580226068524, 0.09656256470431919,  -0.05606317672865556,
                                        0.02194661103228646, -0.0040733094643788615};
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    const double hi = std::max(ax, ay);
    if (hi == 0.0) {
        return 0.0;
    }
    const double t = std::min(ax, ay) / hi;
    const double t2 = t * t;
    double poly = kCoeff[7];
    for (int k = 6; k >= 0; --k) {
        poly = poly * t2 + kCoeff[k];
    }
    double a = t * poly;
    if (ay > ax) {
        a = std::numbers::pi / 2.0 - a;
    }
    if (x < 0.0) {
        a = std::numbers::pi - a;
    }
    return y < 0.0 ? -a : a;
}

StencilGrid interior_mask(const Scene& scene, const RasterGrid& grid) {
    const int r = grid.resolution;
    StencilGrid mask(r);
    if (scene.obstacles().empty()) {
        return mask;
    }
#pragma omp parallel for schedule(dynamic, 8)
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            if (scene.classify(grid.center(i, j)) != Containment::outside) {
                mask.cells[grid.index(i, j)] = 1;
            }
        }
    }
    return mask;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBinWidth = 2.0 * kPi / ShadowProfile::kBins;
// Covers the coarse_atan2 error with a wide margin.
constexpr double kAngleSlack = 10.0 * kCoarseAngleError;
constexpr double kNearApex = 1e-6;

int floor_mod(long v, int m) {
    return static_cast<int>(((v % m) + m) % m);
}

// Unwrapped bins [first, last] touching [lo, hi], at most one full turn.
std::pair<long, long> touching_bins(double lo, double hi) {
    const long first = static_cast<long>(std::floor((lo + kPi) / kBinWidth));
    const long last = static_cast<long>(std::floor((hi + kPi) / kBinWidth));
    return {first, std::min(last, first + ShadowProfile::kBins - 1)};
}

// Unwrapped bins lying strictly inside [lo, hi].
std::pair<long, long> inner_bins(double lo, double hi) {
    const long first = static_cast<long>(std::ceil((lo + kPi) / kBinWidth));
    const long last = static_cast<long>(std::floor((hi + kPi) / kBinWidth)) - 1;
    return {first, std::min(last, first + ShadowProfile::kBins - 1)};
}

// Calls fn(f, l) on the wrapped bin ranges making up unwrapped [first, last].
template <class Fn>
void for_pieces(long first, long last, Fn&& fn) {
    if (first > last) {
        return;
    }
    const int f = floor_mod(first, ShadowProfile::kBins);
    const int l = f + static_cast<int>(last - first);
    if (l < ShadowProfile::kBins) {
        fn(f, l);
    } else {
        fn(f, ShadowProfile::kBins - 1);
        fn(0, l - ShadowProfile::kBins);
    }
}

template <class Op>
void sparse_table(const std::vector<double>& base, std::vector<std::vector<double>>& levels, Op op) {
    levels.resize(std::bit_width(base.size()));
    levels[0] = base;
    for (std::size_t k = 1, span = 2; k < levels.size(); ++k, span *= 2) {
        const std::vector<double>& prev = levels[k - 1];
        std::vector<double>& next = levels[k];
        next.resize(base.size() - span + 1);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = op(prev[i], prev[i + span / 2]);
        }
    }
}

} // namespace

ShadowProfile::ShadowProfile() {
    reset();
}

void ShadowProfile::reset() {
    hidden_.assign(kBins, kUnreached);
    clear_.assign(kBins, kUnreached);
    pending_.clear();
}

double ShadowProfile::cover_depth(double lo, double hi) const {
    const auto [first, last] = touching_bins(lo, hi);
    double depth = 0.0;
    for_pieces(first, last, [&](int f, int l) {
        for (int b = f; b <= l; ++b) {
            depth = std::max(depth, hidden_[b]);
        }
    });
    return depth;
}

int ShadowProfile::bin_of(double angle) {
    return floor_mod(static_cast<long>(std::floor((angle + kPi) / kBinWidth)), kBins);
}

void ShadowProfile::cover(double lo, double hi, double depth) {
    const auto [first, last] = inner_bins(lo, hi);
    for_pieces(first, last, [&](int f, int l) {
        for (int b = f; b <= l; ++b) {
            hidden_[b] = std::min(hidden_[b], depth);
        }
    });
}

void ShadowProfile::cover_edge(Point2 apex, Point2 p1, Point2 p2, double lo, double hi, double slack) {
    const Point2 dir = p2 - p1;
    const double offset = cross(p1 - apex, dir);
    static const std::vector<Point2> rays = [] {
        std::vector<Point2> out(kBins);
        for (int b = 0; b < kBins; ++b) {
            const double a = -kPi + static_cast<double>(b) * kBinWidth;
            out[b] = {std::cos(a), std::sin(a)};
        }
        return out;
    }();
    auto along = [&](long b) { return offset / cross(rays[floor_mod(b, kBins)], dir); };
    const auto [first, last] = inner_bins(lo, hi);
    double prev = first <= last ? along(first) : 0.0;
    for (long b = first; b <= last; ++b) {
        const double next = along(b + 1);
        double& d = hidden_[floor_mod(b, kBins)];
        d = std::min(d, std::max(prev, next) + slack);
        prev = next;
    }
}

void ShadowProfile::add_triangles(std::uint32_t first, std::uint32_t count, double lo, double hi, double near) {
    const auto [b0, b1] = touching_bins(lo, hi);
    for_pieces(b0, b1, [&](int f, int l) {
        for (int b = f; b <= l; ++b) {
            clear_[b] = std::min(clear_[b], near);
        }
    });
    pending_.push_back({{first, count}, b0, b1});
}

void ShadowProfile::seal_cover() {
    sparse_table(hidden_, hidden_levels_, [](double a, double b) { return std::max(a, b); });
}

void ShadowProfile::finalize() {
    sparse_table(clear_, clear_levels_, [](double a, double b) { return std::min(a, b); });
    offsets_.assign(kBins + 1, 0);
    for (const Entry& e : pending_) {
        for_pieces(e.first, e.last, [&](int f, int l) {
            for (int b = f; b <= l; ++b) {
                ++offsets_[b + 1];
            }
        });
    }
    for (int b = 0; b < kBins; ++b) {
        offsets_[b + 1] += offsets_[b];
    }
    members_.resize(offsets_.back());
    fill_at_.assign(offsets_.begin(), offsets_.end() - 1);
    for (const Entry& e : pending_) {
        for_pieces(e.first, e.last, [&](int f, int l) {
            for (int b = f; b <= l; ++b) {
                members_[fill_at_[b]++] = e.group;
            }
        });
    }
    pending_.clear();
}

template <class Op>
double ShadowProfile::range_query(const std::vector<std::vector<double>>& levels, double lo, double hi,
                                  Op op) const {
    auto query = [&](int first, int last) {
        const int k = std::bit_width(static_cast<unsigned>(last - first + 1)) - 1;
        return op(levels[k][first], levels[k][last - (1 << k) + 1]);
    };
    const auto [first, last] = touching_bins(lo, hi);
    double out = 0.0;
    bool any = false;
    for_pieces(first, last, [&](int f, int l) {
        out = any ? op(out, query(f, l)) : query(f, l);
        any = true;
    });
    return out;
}

double ShadowProfile::hidden_beyond(double lo, double hi) const {
    return range_query(hidden_levels_, lo, hi, [](double a, double b) { return std::max(a, b); });
}

double ShadowProfile::clear_within(double lo, double hi) const {
    return range_query(clear_levels_, lo, hi, [](double a, double b) { return std::min(a, b); });
}

std::span<const ShadowProfile::Group> ShadowProfile::triangles_in(int b) const {
    return {members_.data() + offsets_[b], members_.data() + offsets_[b + 1]};
}

// ---------------------------------------------------------------------------

ConeRasterizer::ConeRasterizer(const Scene& scene, Framebuffer& fb)
    : scene_(scene), fb_(fb), grid_(fb.grid()) {
    const int r = grid_.resolution;
    chunks_per_row_ = (r + kChunk - 1) / kChunk;
    blocked_ = interior_mask(scene, grid_).cells;
    chunk_max_.assign(static_cast<std::size_t>(r) * chunks_per_row_, 0.0);
    for (int j = 0; j < r; ++j) {
        for (int k = 0; k < chunks_per_row_; ++k) {
            refresh_chunk(j, k);
        }
    }
}

void ConeRasterizer::refresh_chunk(int j, int chunk) {
    const int i0 = chunk * kChunk;
    const int i1 = std::min(grid_.resolution, i0 + kChunk);
    const std::vector<double>& dist = fb_.distances();
    double m = -std::numeric_limits<double>::infinity();
    for (int i = i0; i < i1; ++i) {
        const std::size_t idx = grid_.index(i, j);
        if (blocked_[idx] == 0) {
            m = std::max(m, dist[idx]);
        }
    }
    chunk_max_[static_cast<std::size_t>(j) * chunks_per_row_ + chunk] = m;
}

// Distance from the apex to centers i0..i1 of the row at yc, never above the
// rounded value the cone computes for any of them.
double ConeRasterizer::row_bound(const ConeApex& apex, double yc, int i0, int i1) const {
    const double gap_y = std::max({0.0, yc - std::max(apex.p1.y, apex.p2.y), std::min(apex.p1.y, apex.p2.y) - yc});
    const double gap_x = std::max({0.0, grid_.center_x(i0) - std::max(apex.p1.x, apex.p2.x),
                                   std::min(apex.p1.x, apex.p2.x) - grid_.center_x(i1)});
    return std::max(0.0, std::sqrt(gap_x * gap_x + gap_y * gap_y) * (1.0 - 1e-12) - 1e-12);
}

void ConeRasterizer::fill_shadowed(const ConeApex& apex, std::span<const Triangle> shadow,
                                   const ShadowProfile& profile) {
    const int r = grid_.resolution;
    std::vector<double>& dist = fb_.distances();
    const Point2 g = apex.p1;

    // Decides a center the run-level tests left open.
    auto lit = [&](Point2 c) {
        const Point2 v = c - g;
        const double d = norm(v);
        // Next to the apex, rounding in Triangle::covers outweighs any angular margin.
        if (d < kNearApex) {
            return std::none_of(shadow.begin(), shadow.end(), [&](const Triangle& t) { return t.covers(c); });
        }
        const double a = coarse_atan2(v.y, v.x);
        const int b0 = ShadowProfile::bin_of(a - kAngleSlack);
        const int b1 = ShadowProfile::bin_of(a + kAngleSlack);
        if (d > std::max(profile.hidden_at(b0), profile.hidden_at(b1))) {
            return false;
        }
        if (d < std::min(profile.clear_at(b0), profile.clear_at(b1))) {
            return true;
        }
        for (const int b : {b0, b1}) {
            for (const ShadowProfile::Group& group : profile.triangles_in(b)) {
                for (std::uint32_t t = group.first; t < group.first + group.count; ++t) {
                    if (shadow[t].covers(c)) {
                        return false;
                    }
                }
            }
            if (b1 == b0) {
                break;
            }
        }
        return true;
    };

    enum class Span { hidden, lit, mixed };

    const double step = grid_.domain.width() / r;
    constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

#pragma omp parallel
    {
        std::vector<std::uint8_t> dirty(chunks_per_row_, 0);
        std::vector<double> angles(static_cast<std::size_t>((r + kRun - 1) / kRun) + 1);

#pragma omp for schedule(dynamic, 4)
        for (int j = 0; j < r; ++j) {
            const double yc = grid_.center_y(j);
            const double dy = yc - g.y;
            // Angles of run boundaries on this row, filled on first use.
            std::fill(angles.begin(), angles.end(), kUnset);
            auto boundary = [&](int m) { return grid_.domain.min.x + std::min(m * kRun, r) * step; };
            auto angle_at = [&](int m) {
                if (std::isnan(angles[m])) {
                    angles[m] = coarse_atan2(dy, boundary(m) - g.x);
                }
                return angles[m];
            };
            // What the profile alone proves about centers between run
            // boundaries m0 and m1.
            auto classify = [&](int m0, int m1) {
                const double x0 = boundary(m0) - g.x;
                const double x1 = boundary(m1) - g.x;
                const double gap_x = std::max({0.0, x0, -x1});
                const double near = std::max(0.0, std::sqrt(gap_x * gap_x + dy * dy) * (1.0 - 1e-12) - 1e-12);
                if (near <= 0.0) {
                    return Span::mixed;
                }
                const double a0 = angle_at(m0);
                double sweep = angle_at(m1) - a0;
                if (sweep > kPi) {
                    sweep -= 2.0 * kPi;
                } else if (sweep < -kPi) {
                    sweep += 2.0 * kPi;
                }
                const double lo = std::min(a0, a0 + sweep) - kAngleSlack;
                const double hi = std::max(a0, a0 + sweep) + kAngleSlack;
                if (profile.hidden_beyond(lo, hi) < near) {
                    return Span::hidden;
                }
                const double far = std::sqrt(std::max(x0 * x0, x1 * x1) + dy * dy) * (1.0 + 1e-12) + 1e-12;
                return far < profile.clear_within(lo, hi) ? Span::lit : Span::mixed;
            };
            auto scan = [&](int i0, int i1, bool all_lit, int k) {
                for (int i = i0; i <= i1; ++i) {
                    const std::size_t idx = grid_.index(i, j);
                    if (blocked_[idx] != 0) {
                        continue;
                    }
                    const Point2 c{grid_.center_x(i), yc};
                    Point2 aim;
                    const double nd = apex.reach(c, aim);
                    if (nd < dist[idx] && (all_lit || lit(c))) {
                        fb_.write(idx, aim, nd, apex.id);
                        dirty[k] = 1;
                    }
                }
            };
            for (int k = 0; k < chunks_per_row_; ++k) {
                const int i0 = k * kChunk;
                const int i1 = std::min(r, i0 + kChunk) - 1;
                if (row_bound(apex, yc, i0, i1) + apex.distance >=
                    chunk_max_[static_cast<std::size_t>(j) * chunks_per_row_ + k]) {
                    continue;
                }
                const int m0 = i0 / kRun;
                const int m1 = (i1 + kRun) / kRun;
                const Span whole = classify(m0, m1);
                if (whole != Span::mixed) {
                    if (whole == Span::lit) {
                        scan(i0, i1, true, k);
                    }
                    continue;
                }
                for (int m = m0; m < m1; ++m) {
                    const Span part = classify(m, m + 1);
                    if (part != Span::hidden) {
                        scan(m * kRun, std::min(i1, (m + 1) * kRun - 1), part == Span::lit, k);
                    }
                }
            }
            for (int k = 0; k < chunks_per_row_; ++k) {
                if (dirty[k] != 0) {
                    dirty[k] = 0;
                    refresh_chunk(j, k);
                }
            }
        }
    }
}

void ConeRasterizer::fill_visible(const ConeApex& apex) {
    const int r = grid_.resolution;
    std::vector<double>& dist = fb_.distances();

#pragma omp parallel
    {
        std::vector<std::uint8_t> dirty(chunks_per_row_, 0);

#pragma omp for schedule(dynamic, 4)
        for (int j = 0; j < r; ++j) {
            const double yc = grid_.center_y(j);
            for (int k = 0; k < chunks_per_row_; ++k) {
                const int i0 = k * kChunk;
                const int i1 = std::min(r, i0 + kChunk) - 1;
                if (row_bound(apex, yc, i0, i1) + apex.distance >=
                    chunk_max_[static_cast<std::size_t>(j) * chunks_per_row_ + k]) {
                    continue;
                }
                for (int i = i0; i <= i1; ++i) {
                    const std::size_t idx = grid_.index(i, j);
                    if (blocked_[idx] != 0) {
                        continue;
                    }
                    const Point2 c{grid_.center_x(i), yc};
                    Point2 aim;
                    const double nd = apex.reach(c, aim);
                    if (nd < dist[idx] && scene_.line_of_sight(c, aim)) {
                        fb_.write(idx, aim, nd, apex.id);
                        dirty[k] = 1;
                    }
                }
            }
            for (int k = 0; k < chunks_per_row_; ++k) {
                if (dirty[k] != 0) {
                    dirty[k] = 0;
                    refresh_chunk(j, k);
                }
            }
        }
    }
}

} // namespace spm
