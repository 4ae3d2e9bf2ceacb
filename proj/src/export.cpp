#include "spm/scene_io.hpp"

#include "spm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace spm {

namespace {

std::uint8_t channel(double v, double lo, double hi) {
    const double scaled = std::floor((v - lo) / (hi - lo) * 255.999);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

// Rows are written top to bottom, so row j = r - 1 comes first.
void write_ppm(const std::filesystem::path& path, int r, const std::vector<std::uint8_t>& rgb) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "P6\n" << r << ' ' << r << "\n255\n";
    const std::size_t row_bytes = static_cast<std::size_t>(r) * 3;
    for (int j = r - 1; j >= 0; --j) {
        out.write(reinterpret_cast<const char*>(rgb.data()) + static_cast<std::size_t>(j) * row_bytes,
                  static_cast<std::streamsize>(row_bytes));
    }
    if (!out) {
        throw IoError("failed to write " + path.string());
    }
}

} // namespace

void export_region_image(const SpmResult& spm, const std::filesystem::path& path) {
    const Framebuffer& fb = spm.framebuffer;
    const Rect& d = fb.grid().domain;
    const std::size_t n = fb.grid().pixel_count();
    std::vector<std::uint8_t> rgb(n * 3, 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const Pixel px = fb.pixel_at(idx);
        if (px.reached()) {
            rgb[3 * idx] = channel(px.parent_x, d.min.x, d.max.x);
            rgb[3 * idx + 1] = channel(px.parent_y, d.min.y, d.max.y);
        }
    }
    write_ppm(path, fb.resolution(), rgb);
}

void export_distance_image(const SpmResult& spm, const std::filesystem::path& path, double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw UsageError("isoline spacing must be positive");
    }
    const Framebuffer& fb = spm.framebuffer;
    const std::vector<double>& dist = fb.distances();
    double top = 0.0;
    for (const double v : dist) {
        if (std::isfinite(v)) {
            top = std::max(top, v);
        }
    }
    const double half_pixel = 0.5 * fb.grid().pixel_width();
    std::vector<std::uint8_t> rgb(dist.size() * 3, 0);
    for (std::size_t idx = 0; idx < dist.size(); ++idx) {
        const double v = dist[idx];
        if (!std::isfinite(v)) {
            continue;
        }
        const double k = std::round(v / spacing);
        // The field stays below 192 so the white rings stand out.
        std::uint8_t gray = top > 0.0 ? static_cast<std::uint8_t>(channel(v, 0.0, top) * 3 / 4) : 0;
        if (k >= 1.0 && std::abs(v - k * spacing) <= half_pixel) {
            gray = 255;
        }
        rgb[3 * idx] = rgb[3 * idx + 1] = rgb[3 * idx + 2] = gray;
    }
    write_ppm(path, fb.resolution(), rgb);
}

void write_isolines_csv(std::span<const Isoline> isolines, std::ostream& out) {
    out << "level,polyline_id,x,y\n";
    char line[128];
    for (const Isoline& iso : isolines) {
        for (std::size_t id = 0; id < iso.polylines.size(); ++id) {
            for (const Point2& p : iso.polylines[id]) {
                std::snprintf(line, sizeof line, "%.17g,%zu,%.17g,%.17g\n", iso.level, id, p.x, p.y);
                out << line;
            }
        }
    }
}

void export_isolines_csv(std::span<const Isoline> isolines, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_isolines_csv(isolines, out);
    if (!out) {
        throw IoError("failed to write " + path.string());
    }
}

} // namespace spm
