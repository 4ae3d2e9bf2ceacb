#include "spm/raster.hpp"

#include <algorithm>
#include <cmath>

namespace spm {

int RasterGrid::column_of(double x) const {
    const double c = std::floor((x - domain.min.x) / domain.width() * resolution);
    return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(resolution - 1)));
}

int RasterGrid::row_of(double y) const {
    const double r = std::floor((y - domain.min.y) / domain.height() * resolution);
    return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(resolution - 1)));
}

Framebuffer::Framebuffer(const Rect& domain, int resolution) : grid_{domain, resolution} {
    const std::size_t n = grid_.pixel_count();
    parent_x_.assign(n, 0.0);
    parent_y_.assign(n, 0.0);
    distance_.assign(n, kUnreached);
    parent_id_.assign(n, -1);
}

} // namespace spm
