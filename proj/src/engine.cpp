#include "spm/engine.hpp"

#include "spm/errors.hpp"
#include "spm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spm {

namespace {

constexpr double kMergeTolerance = 1e-9;

ConeApex apex_of(const DataEntry& g) {
    return {g.p1, g.p2, g.is_segment(), g.distance, g.original_index};
}

void check_source_point(const Scene& scene, Point2 p, const std::string& what) {
    if (!is_finite(p) || !scene.domain().contains(p)) {
        throw ValidationError(what + " lies outside the domain");
    }
    switch (scene.classify(p)) {
    case Containment::inside:
        throw ValidationError(what + " lies inside an obstacle");
    case Containment::boundary:
        throw ValidationError(what + " lies on an obstacle boundary");
    case Containment::outside:
        break;
    }
}

} // namespace

void EngineConfig::validate(const Rect& domain) const {
    if (resolution < 2 || resolution > 16384) {
        throw ValidationError("resolution must be in [2, 16384], got " + std::to_string(resolution));
    }
    if (!std::isfinite(shadow_vector_factor) || shadow_vector_factor < domain.diameter()) {
        throw ValidationError("shadow vector factor must be at least the domain diameter");
    }
    if (!std::isfinite(front_facing_threshold)) {
        throw ValidationError("front-facing threshold must be finite");
    }
}

void SourceSpec::validate(const Scene& scene) const {
    if (empty()) {
        throw ValidationError("at least one source is required");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        check_source_point(scene, points[i], "source point " + std::to_string(i));
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string what = "source segment " + std::to_string(i);
        check_source_point(scene, segments[i].a(), what + " start");
        check_source_point(scene, segments[i].b(), what + " end");
        if (!scene.line_of_sight(segments[i].a(), segments[i].b())) {
            throw ValidationError(what + " crosses an obstacle");
        }
    }
}

std::vector<Point2> critical_points(const Segment2& l, const Scene& scene) {
    const Point2 a = l.a();
    const Point2 d = l.b() - a;
    std::vector<std::pair<double, Point2>> feet;
    for (std::size_t k = 0; k < scene.vertex_count(); ++k) {
        const Point2 v = scene.vertex(k);
        const double t = dot(v - a, d) / dot(d, d);
        if (!(t > 0.0 && t < 1.0)) {
            continue;
        }
        const Point2 foot = a + t * d;
        if (scene.line_of_sight(v, foot)) {
            feet.emplace_back(t, foot);
        }
    }
    std::sort(feet.begin(), feet.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Point2> out;
    for (const auto& [t, foot] : feet) {
        if (distance(foot, l.a()) <= kMergeTolerance || distance(foot, l.b()) <= kMergeTolerance) {
            continue;
        }
        if (!out.empty() && distance(out.back(), foot) <= kMergeTolerance) {
            continue;
        }
        out.push_back(foot);
    }
    return out;
}

DataArray build_data_array(const Scene& scene, const SourceSpec& sources) {
    sources.validate(scene);
    DataArray data;
    DataEntry reserved;
    reserved.status = EntryStatus::expanded;
    data.entries.push_back(reserved);

    auto add = [&](Point2 p1, Point2 p2, EntryStatus status, EntryKind kind, std::uint32_t ref) {
        DataEntry e;
        e.p1 = p1;
        e.p2 = p2;
        e.status = status;
        e.kind = kind;
        e.ref = ref;
        e.original_index = static_cast<std::int32_t>(data.entries.size());
        if (status != EntryStatus::obstacle) {
            e.distance = 0.0;
            e.parent_id = e.original_index;
        }
        data.entries.push_back(e);
    };

    for (std::uint32_t i = 0; i < sources.points.size(); ++i) {
        add(sources.points[i], sources.points[i], EntryStatus::source, EntryKind::source_point, i);
    }
    for (std::uint32_t i = 0; i < sources.segments.size(); ++i) {
        const Segment2& l = sources.segments[i];
        add(l.a(), l.a(), EntryStatus::source, EntryKind::segment_endpoint, i);
        add(l.b(), l.b(), EntryStatus::source, EntryKind::segment_endpoint, i);
        std::vector<Point2> chain{l.a()};
        const std::vector<Point2> crit = critical_points(l, scene);
        chain.insert(chain.end(), crit.begin(), crit.end());
        chain.push_back(l.b());
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            add(chain[k], chain[k + 1], EntryStatus::source_segment, EntryKind::sub_segment, i);
        }
    }
    for (std::uint32_t k = 0; k < scene.vertex_count(); ++k) {
        add(scene.vertex(k), scene.vertex(k), EntryStatus::obstacle, EntryKind::vertex, k);
    }
    return data;
}

std::optional<std::size_t> select_generator(DataArray& data) {
    std::optional<std::size_t> best;
    for (std::size_t k = 1; k < data.entries.size(); ++k) {
        const DataEntry& e = data.entries[k];
        if (e.status == EntryStatus::expanded || !e.reached()) {
            continue;
        }
        if (!best || e.distance < data.entries[*best].distance) {
            best = k;
        }
    }
    if (best) {
        data.entries[0] = data.entries[*best];
        data.entries[*best].status = EntryStatus::expanded;
    }
    return best;
}

void cone_pass(Framebuffer& fb, const StencilGrid& stencil, const DataEntry& g) {
    cone_fill_serial(fb, stencil, apex_of(g));
}

namespace {

void relax_vertices(DataArray& data, const Scene& scene, const DataEntry& g, bool parallel) {
    const long n = static_cast<long>(data.entries.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (long k = 1; k < n; ++k) {
        DataEntry& v = data.entries[k];
        if (v.status != EntryStatus::obstacle) {
            continue;
        }
        Point2 aim;
        const double nd = g.reach(v.p1, aim);
        if (nd < v.distance && scene.line_of_sight(v.p1, aim)) {
            v.distance = nd;
            v.parent_id = g.original_index;
        }
    }
}

} // namespace

void distance_pass(DataArray& data, const Scene& scene, const DataEntry& g) {
    relax_vertices(data, scene, g, false);
}

SpmResult build_spm(const Scene& scene, const SourceSpec& sources, const EngineConfig& config) {
    config.validate(scene.domain());
    SpmResult res{Framebuffer(scene.domain(), config.resolution), build_data_array(scene, sources), scene, sources,
                  config, {}};
    const bool parallel = config.execution == Execution::parallel;
    std::optional<ConeRasterizer> raster;
    ShadowPlan plan;
    StencilGrid interior;
    if (parallel) {
        raster.emplace(res.scene, res.framebuffer);
    } else {
        interior = interior_mask(res.scene, res.framebuffer.grid());
    }

    double last = 0.0;
    while (select_generator(res.data)) {
        const DataEntry g = res.data.generator();
        if (g.distance < last) {
            throw InternalError("generator distance decreased from " + std::to_string(last) + " to " +
                                std::to_string(g.distance));
        }
        last = g.distance;
        res.expansion.push_back(g.distance);

        if (parallel) {
            if (g.is_segment()) {
                raster->fill_visible(apex_of(g));
            } else {
                plan_shadow(res.scene, g, config, plan);
                raster->fill_shadowed(apex_of(g), plan.triangles, plan.profile);
            }
        } else {
            StencilGrid stencil = shadow_mask(res.scene, g, config);
            for (std::size_t idx = 0; idx < stencil.cells.size(); ++idx) {
                stencil.cells[idx] |= interior.cells[idx];
            }
            cone_pass(res.framebuffer, stencil, g);
        }
        relax_vertices(res.data, res.scene, g, parallel);
    }
    return res;
}

} // namespace spm
