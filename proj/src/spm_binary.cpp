#include "spm/scene_io.hpp"

#include "spm/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

namespace spm {

namespace {

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u16(std::uint16_t v) { little(v, 2); }
    void u32(std::uint32_t v) { little(v, 4); }
    void i32(std::int32_t v) { little(static_cast<std::uint32_t>(v), 4); }
    void f64(double v) { little(std::bit_cast<std::uint64_t>(v), 8); }
    void point(Point2 p) {
        f64(p.x);
        f64(p.y);
    }

private:
    void little(std::uint64_t v, int n) {
        std::array<char, 8> buf{};
        for (int k = 0; k < n; ++k) {
            buf[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
        }
        out_.write(buf.data(), n);
    }

    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void bytes(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw IoError("SPM binary is truncated");
        }
    }
    std::uint8_t u8() { return static_cast<std::uint8_t>(little(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(little(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(little(4))); }
    double f64() { return std::bit_cast<double>(little(8)); }
    Point2 point() {
        const double x = f64();
        return {x, f64()};
    }
    /// Count field that must fit in the remaining stream.
    std::uint32_t count(std::uint32_t limit) {
        const std::uint32_t n = u32();
        if (n > limit) {
            throw IoError("SPM binary has an implausible element count");
        }
        return n;
    }

private:
    std::uint64_t little(int n) {
        std::array<unsigned char, 8> buf{};
        bytes(reinterpret_cast<char*>(buf.data()), static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int k = n - 1; k >= 0; --k) {
            v = (v << 8) | buf[k];
        }
        return v;
    }

    std::istream& in_;
};

constexpr char kMagic[4] = {'S', 'P', 'M', 'F'};
constexpr char kTrailer[4] = {'S', 'C', 'N', 'E'};
constexpr std::uint32_t kMaxCount = 1u << 24;

} // namespace

void write_spm(const SpmResult& spm, std::ostream& out) {
    Writer w(out);
    const Framebuffer& fb = spm.framebuffer;
    w.bytes(kMagic, 4);
    w.u16(kSpmBinaryVersion);
    w.u32(static_cast<std::uint32_t>(fb.resolution()));
    for (std::size_t idx = 0; idx < fb.grid().pixel_count(); ++idx) {
        const Pixel px = fb.pixel_at(idx);
        w.f64(px.parent_x);
        w.f64(px.parent_y);
        w.f64(px.distance);
        w.i32(px.parent_id);
    }

    w.u32(static_cast<std::uint32_t>(spm.data.entries.size()));
    for (const DataEntry& e : spm.data.entries) {
        w.point(e.p1);
        w.point(e.p2);
        w.u8(static_cast<std::uint8_t>(e.status));
        w.f64(e.distance);
        w.i32(e.parent_id);
        w.i32(e.original_index);
        w.u8(static_cast<std::uint8_t>(e.kind));
        w.u32(e.ref);
    }

    w.bytes(kTrailer, 4);
    w.point(spm.scene.domain().min);
    w.point(spm.scene.domain().max);
    w.u32(static_cast<std::uint32_t>(spm.scene.obstacles().size()));
    for (const Polygon& poly : spm.scene.obstacles()) {
        w.u32(static_cast<std::uint32_t>(poly.size()));
        for (const Point2& v : poly.vertices()) {
            w.point(v);
        }
    }
    w.u32(static_cast<std::uint32_t>(spm.sources.points.size()));
    for (const Point2& p : spm.sources.points) {
        w.point(p);
    }
    w.u32(static_cast<std::uint32_t>(spm.sources.segments.size()));
    for (const Segment2& s : spm.sources.segments) {
        w.point(s.a());
        w.point(s.b());
    }
    w.f64(spm.config.shadow_vector_factor);
    w.f64(spm.config.front_facing_threshold);
    w.u8(static_cast<std::uint8_t>(spm.config.segment_visibility));
    w.u32(static_cast<std::uint32_t>(spm.expansion.size()));
    for (const double d : spm.expansion) {
        w.f64(d);
    }
    if (!out) {
        throw IoError("failed to write SPM binary");
    }
}

SpmResult read_spm(std::istream& in) {
    Reader r(in);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not an SPM binary (bad magic)");
    }
    if (const std::uint16_t version = r.u16(); version != kSpmBinaryVersion) {
        throw IoError("unsupported SPM binary version " + std::to_string(version));
    }
    const std::uint32_t res = r.u32();
    if (res < 2 || res > 16384) {
        throw IoError("SPM binary has an invalid resolution");
    }
    const std::size_t pixels = static_cast<std::size_t>(res) * res;
    std::vector<double> px(pixels);
    std::vector<double> py(pixels);
    std::vector<double> pd(pixels);
    std::vector<std::int32_t> pid(pixels);
    for (std::size_t k = 0; k < pixels; ++k) {
        px[k] = r.f64();
        py[k] = r.f64();
        pd[k] = r.f64();
        pid[k] = r.i32();
    }

    DataArray data;
    const std::uint32_t entries = r.count(kMaxCount);
    for (std::uint32_t k = 0; k < entries; ++k) {
        DataEntry e;
        e.p1 = r.point();
        e.p2 = r.point();
        const std::uint8_t status = r.u8();
        if (status > 3) {
            throw IoError("SPM binary has an invalid entry status");
        }
        e.status = static_cast<EntryStatus>(status);
        e.distance = r.f64();
        e.parent_id = r.i32();
        e.original_index = r.i32();
        const std::uint8_t kind = r.u8();
        if (kind > 4) {
            throw IoError("SPM binary has an invalid entry kind");
        }
        e.kind = static_cast<EntryKind>(kind);
        e.ref = r.u32();
        data.entries.push_back(e);
    }

    char trailer[4];
    r.bytes(trailer, 4);
    if (std::memcmp(trailer, kTrailer, 4) != 0) {
        throw IoError("SPM binary is missing its scene block");
    }
    Rect domain;
    domain.min = r.point();
    domain.max = r.point();
    std::vector<Polygon> obstacles;
    SourceSpec sources;
    EngineConfig config;
    std::vector<double> expansion;
    try {
        const std::uint32_t polys = r.count(kMaxCount);
        for (std::uint32_t p = 0; p < polys; ++p) {
            std::vector<Point2> verts(r.count(kMaxCount));
            for (Point2& v : verts) {
                v = r.point();
            }
            obstacles.emplace_back(std::move(verts));
        }
        sources.points.resize(r.count(kMaxCount));
        for (Point2& p : sources.points) {
            p = r.point();
        }
        const std::uint32_t segs = r.count(kMaxCount);
        for (std::uint32_t k = 0; k < segs; ++k) {
            const Point2 a = r.point();
            sources.segments.emplace_back(a, r.point());
        }
    } catch (const ValidationError& e) {
        throw IoError(std::string("SPM binary holds an invalid scene: ") + e.what());
    }
    config.resolution = static_cast<int>(res);
    config.shadow_vector_factor = r.f64();
    config.front_facing_threshold = r.f64();
    if (r.u8() != 0) {
        throw IoError("SPM binary has an unknown segment visibility mode");
    }
    expansion.resize(r.count(kMaxCount));
    for (double& d : expansion) {
        d = r.f64();
    }

    std::optional<Scene> scene;
    try {
        scene.emplace(domain, std::move(obstacles));
    } catch (const ValidationError& e) {
        throw IoError(std::string("SPM binary holds an invalid scene: ") + e.what());
    }
    SpmResult out{Framebuffer(domain, static_cast<int>(res)), std::move(data), std::move(*scene), std::move(sources),
                  config, std::move(expansion)};
    out.framebuffer.parent_x() = std::move(px);
    out.framebuffer.parent_y() = std::move(py);
    out.framebuffer.distances() = std::move(pd);
    out.framebuffer.parent_ids() = std::move(pid);
    for (const std::int32_t id : out.framebuffer.parent_ids()) {
        if (id < -1 || id >= static_cast<std::int32_t>(out.data.entries.size())) {
            throw IoError("SPM binary has a pixel with an invalid parent id");
        }
    }
    return out;
}

void save_spm(const SpmResult& spm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_spm(spm, out);
}

SpmResult load_spm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open SPM binary " + path.string());
    }
    return read_spm(in);
}

} // namespace spm
