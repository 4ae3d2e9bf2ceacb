#pragma once

#include "spm/geometry.hpp"
#include "spm/raster.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spm {

/// Pixel rows [first, second] whose centers the triangle may cover; empty
/// (first > second) when it misses the grid.
std::pair<int, int> triangle_rows(const Triangle& t, const RasterGrid& grid);

/// Pixel columns [first, second] on row j that may hold covered centers. A
/// superset of the exact covered run; callers trim it with Triangle::covers.
std::pair<int, int> triangle_row_columns(const Triangle& t, const RasterGrid& grid, int j);

/// Exact covered run [first, second] of row j clipped to [lo, hi].
std::pair<int, int> covered_run(const Triangle& t, const RasterGrid& grid, int j, int lo, int hi);

/// Reference rasterizer: tests every center in each triangle's bounding box.
void rasterize_serial(std::span<const Triangle> tris, const RasterGrid& grid, StencilGrid& out);

/// Row-parallel span rasterizer. Produces the same stencil as rasterize_serial.
void rasterize_parallel(std::span<const Triangle> tris, const RasterGrid& grid, StencilGrid& out);

/// Depth-tested cone fill over unshadowed pixels (strict less-than).
void cone_fill_serial(Framebuffer& fb, const StencilGrid& shadow, const ConeApex& apex);
void cone_fill_parallel(Framebuffer& fb, const StencilGrid& shadow, const ConeApex& apex);

/// atan2 to within kCoarseAngleError radians (the values pi and -pi are interchangeable).
double coarse_atan2(double y, double x);
inline constexpr double kCoarseAngleError = 1e-7;

/// Pixels whose centers lie inside an obstacle or on its boundary. Both build
/// paths keep these unreached; the boundary ones sit in the closed shadow of
/// their own edge anyway.
StencilGrid interior_mask(const Scene& scene, const RasterGrid& grid);

/// Angular summary of the shadow triangles around a point apex, in 4096 equal
/// bins over [-pi, pi). It proves pixels shadowed or lit without touching the
/// triangles, and lists the triangles that may cover any remaining pixel.
class ShadowProfile {
public:
    static constexpr int kBins = 4096;

    ShadowProfile();

    /// Back to the empty profile, keeping storage.
    void reset();
    /// Centers in bins lying strictly inside [lo, hi] farther than depth from
    /// the apex are covered.
    void cover(double lo, double hi, double depth);
    /// Same, with each bin's depth set by where its bounding rays from `apex`
    /// cross the line through p1 and p2, plus `slack`.
    void cover_edge(Point2 apex, Point2 p1, Point2 p2, double lo, double hi, double slack);
    /// Triangles [first, first + count) lie within the angle range [lo, hi]
    /// and no nearer than `near` to the apex.
    void add_triangles(std::uint32_t first, std::uint32_t count, double lo, double hi, double near);
    /// Largest cover depth over bins touching [lo, hi], usable at any time.
    double cover_depth(double lo, double hi) const;
    /// Ends the cover() phase; hidden_beyond() is usable from here on.
    void seal_cover();
    /// Ends the add_triangles() phase; all queries are usable from here on.
    void finalize();

    /// Over bins touching [lo, hi]: the largest cover depth, and the smallest
    /// triangle distance. hi - lo may exceed 2 pi.
    double hidden_beyond(double lo, double hi) const;
    double clear_within(double lo, double hi) const;
    double hidden_at(int b) const { return hidden_[b]; }
    double clear_at(int b) const { return clear_[b]; }
    struct Group {
        std::uint32_t first;
        std::uint32_t count;
    };
    /// Triangle groups touching bin b.
    std::span<const Group> triangles_in(int b) const;
    static int bin_of(double angle);

private:
    struct Entry {
        Group group;
        long first;
        long last;
    };

    template <class Op>
    double range_query(const std::vector<std::vector<double>>& levels, double lo, double hi, Op op) const;

    std::vector<double> hidden_;
    std::vector<double> clear_;
    std::vector<Entry> pending_;
    std::vector<std::vector<double>> hidden_levels_;  // sparse tables for range queries
    std::vector<std::vector<double>> clear_levels_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> fill_at_;
    std::vector<Group> members_;
};

/// Fused shadow and cone pass for repeated generators over one framebuffer.
///
/// Pixels are skipped early when they cannot improve: obstacle pixels are
/// masked once, and rows are cut into 64-pixel chunks whose maximum
/// distance bounds what a new cone can improve. Shadows are then resolved
/// through the apex's ShadowProfile. Results are bit-identical to building the
/// full stencil and running cone_fill_serial.
class ConeRasterizer {
public:
    ConeRasterizer(const Scene& scene, Framebuffer& fb);

    /// Point apex; `shadow` must cover every pixel the apex cannot see and
    /// `profile` must describe exactly those triangles.
    void fill_shadowed(const ConeApex& apex, std::span<const Triangle> shadow, const ShadowProfile& profile);
    /// Sub-segment apex; visibility is line_of_sight from the pixel center to
    /// its projection foot.
    void fill_visible(const ConeApex& apex);


private:
    static constexpr int kChunk = 64;
    static constexpr int kRun = 16;

    void refresh_chunk(int j, int chunk);
    double row_bound(const ConeApex& apex, double yc, int i0, int i1) const;

    const Scene& scene_;
    Framebuffer& fb_;
    RasterGrid grid_;
    int chunks_per_row_ = 0;
    std::vector<std::uint8_t> blocked_;
    std::vector<double> chunk_max_;
};

} // namespace spm
