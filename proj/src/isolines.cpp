#include "spm/query.hpp"

#include "spm/errors.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

namespace spm {

namespace {

// Edge keys: 2*index(i, j) for the horizontal edge (i,j)-(i+1,j), 2*index + 1
// for the vertical edge (i,j)-(i,j+1).
struct Piece {
    std::uint64_t from;
    std::uint64_t to;
};

class Contourer {
public:
    Contourer(const SpmResult& spm, double level)
        : grid_(spm.framebuffer.grid()), dist_(spm.framebuffer.distances()), level_(level) {}

    std::vector<std::vector<Point2>> run() {
        const int r = grid_.resolution;
        for (int j = 0; j + 1 < r; ++j) {
            for (int i = 0; i + 1 < r; ++i) {
                cell(i, j);
            }
        }
        return chain();
    }

private:
    double value(int i, int j) const { return dist_[grid_.index(i, j)]; }

    Point2 edge_point(std::uint64_t key) const {
        const std::size_t idx = key / 2;
        const int i = static_cast<int>(idx % grid_.resolution);
        const int j = static_cast<int>(idx / grid_.resolution);
        const int i2 = (key % 2 == 0) ? i + 1 : i;
        const int j2 = (key % 2 == 0) ? j : j + 1;
        const double a = value(i, j);
        const double b = value(i2, j2);
        const double t = (level_ - a) / (b - a);
        const Point2 pa = grid_.center(i, j);
        const Point2 pb = grid_.center(i2, j2);
        return pa + t * (pb - pa);
    }

    void cell(int i, int j) {
        const double v0 = value(i, j);
        const double v1 = value(i + 1, j);
        const double v2 = value(i + 1, j + 1);
        const double v3 = value(i, j + 1);
        if (std::isinf(v0) || std::isinf(v1) || std::isinf(v2) || std::isinf(v3)) {
            return;
        }
        const int mask = (v0 >= level_ ? 1 : 0) | (v1 >= level_ ? 2 : 0) | (v2 >= level_ ? 4 : 0) |
                         (v3 >= level_ ? 8 : 0);
        if (mask == 0 || mask == 15) {
            return;
        }
        const std::uint64_t base = 2 * static_cast<std::uint64_t>(grid_.index(i, j));
        const std::uint64_t bottom = base;
        const std::uint64_t left = base + 1;
        const std::uint64_t top = 2 * static_cast<std::uint64_t>(grid_.index(i, j + 1));
        const std::uint64_t right = 2 * static_cast<std::uint64_t>(grid_.index(i + 1, j)) + 1;
        const bool center_above = 0.25 * (v0 + v1 + v2 + v3) >= level_;
        switch (mask) {
        case 1: case 14: add(left, bottom); break;
        case 2: case 13: add(bottom, right); break;
        case 3: case 12: add(left, right); break;
        case 4: case 11: add(right, top); break;
        case 6: case 9: add(bottom, top); break;
        case 7: case 8: add(left, top); break;
        case 5:
            if (center_above) { add(left, top); add(bottom, right); }
            else { add(left, bottom); add(right, top); }
            break;
        case 10:
            if (center_above) { add(left, bottom); add(right, top); }
            else { add(left, top); add(bottom, right); }
            break;
        default: break;
        }
    }

    void add(std::uint64_t a, std::uint64_t b) {
        const std::size_t id = pieces_.size();
        pieces_.push_back({a, b});
        ends_[a].push_back(id);
        ends_[b].push_back(id);
    }

    std::uint64_t other_end(std::size_t piece, std::uint64_t key) const {
        return pieces_[piece].from == key ? pieces_[piece].to : pieces_[piece].from;
    }

    // Walks unused pieces from `key` and appends their far ends.
    void walk(std::uint64_t key, std::vector<Point2>& line) {
        for (;;) {
            std::size_t next = pieces_.size();
            for (std::size_t p : ends_[key]) {
                if (!used_[p]) {
                    next = p;
                    break;
                }
            }
            if (next == pieces_.size()) {
                return;
            }
            used_[next] = 1;
            key = other_end(next, key);
            line.push_back(edge_point(key));
        }
    }

    std::vector<std::vector<Point2>> chain() {
        std::vector<std::vector<Point2>> lines;
        used_.assign(pieces_.size(), 0);
        // Open fragments start at keys used by a single piece.
        for (std::size_t p = 0; p < pieces_.size(); ++p) {
            for (std::uint64_t key : {pieces_[p].from, pieces_[p].to}) {
                if (!used_[p] && ends_[key].size() == 1) {
                    std::vector<Point2> line{edge_point(key)};
                    walk(key, line);
                    lines.push_back(std::move(line));
                }
            }
        }
        for (std::size_t p = 0; p < pieces_.size(); ++p) {
            if (!used_[p]) {
                const std::uint64_t key = pieces_[p].from;
                std::vector<Point2> line{edge_point(key)};
                walk(key, line);
                lines.push_back(std::move(line));
            }
        }
        return lines;
    }

    const RasterGrid& grid_;
    const std::vector<double>& dist_;
    double level_;
    std::vector<Piece> pieces_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> ends_;
    std::vector<std::uint8_t> used_;
};

} // namespace

std::vector<Isoline> extract_isolines(const SpmResult& spm, std::span<const double> levels) {
    std::vector<Isoline> out;
    for (const double level : levels) {
        if (!std::isfinite(level) || level < 0.0) {
            throw UsageError("isoline levels must be finite and non-negative");
        }
        out.push_back({level, Contourer(spm, level).run()});
    }
    return out;
}

} // namespace spm
