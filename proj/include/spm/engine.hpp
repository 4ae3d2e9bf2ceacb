#pragma once

#include "spm/geometry.hpp"
#include "spm/kernels.hpp"
#include "spm/raster.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace spm {

enum class SegmentVisibility : std::uint8_t { exact_los };

/// serial: the reference composition of the per-pass operations.
/// parallel: OpenMP kernels with candidate pruning; same output bits.
enum class Execution : std::uint8_t { serial, parallel };

struct EngineConfig {
    int resolution = 256;
    double shadow_vector_factor = 4.0;
    double front_facing_threshold = 0.1;
    SegmentVisibility segment_visibility = SegmentVisibility::exact_los;
    Execution execution = Execution::parallel;

    /// Throws ValidationError unless r >= 2 and the shadow factor spans the domain.
    void validate(const Rect& domain) const;
};

enum class EntryStatus : std::uint8_t { source = 0, source_segment = 1, obstacle = 2, expanded = 3 };

/// What an entry stands for; survives the switch to `expanded`.
enum class EntryKind : std::uint8_t { reserved = 0, source_point = 1, segment_endpoint = 2, sub_segment = 3, vertex = 4 };

struct DataEntry {
    Point2 p1;
    Point2 p2;
    EntryStatus status = EntryStatus::obstacle;
    double distance = kUnreached;
    std::int32_t parent_id = -1;
    std::int32_t original_index = 0;
    EntryKind kind = EntryKind::reserved;
    /// Global vertex index for vertices, source or segment index otherwise.
    std::uint32_t ref = 0;

    bool is_segment() const { return kind == EntryKind::sub_segment; }
    bool reached() const { return distance != kUnreached; }

    /// Geodesic candidate through this entry for a point q, and the point q aims at.
    double reach(Point2 q, Point2& aim) const {
        return ConeApex{p1, p2, is_segment(), distance, original_index}.reach(q, aim);
    }

    friend bool operator==(const DataEntry&, const DataEntry&) = default;
};

/// Entry 0 is the reserved generator slot; real entries start at 1.
struct DataArray {
    std::vector<DataEntry> entries;

    std::size_t n_total() const { return entries.empty() ? 0 : entries.size() - 1; }
    const DataEntry& generator() const { return entries.front(); }
    const DataEntry& operator[](std::size_t i) const { return entries[i]; }
    DataEntry& operator[](std::size_t i) { return entries[i]; }

    friend bool operator==(const DataArray&, const DataArray&) = default;
};

struct SourceSpec {
    std::vector<Point2> points;
    std::vector<Segment2> segments;

    /// Requires at least one source, all inside the domain and off obstacles
    /// (boundaries included), and segments with line of sight end to end.
    void validate(const Scene& scene) const;
    bool empty() const { return points.empty() && segments.empty(); }
};

struct SpmResult {
    Framebuffer framebuffer;
    DataArray data;
    Scene scene;
    SourceSpec sources;
    EngineConfig config;
    /// Generator distance of every iteration, in order.
    std::vector<double> expansion;
};

/// Feet of obstacle vertices on l with parameter in (0, 1) and line of sight,
/// sorted along l with near-duplicates merged.
std::vector<Point2> critical_points(const Segment2& l, const Scene& scene);

DataArray build_data_array(const Scene& scene, const SourceSpec& sources);

/// Moves the closest unexpanded reached entry into slot 0 and marks it
/// expanded. Returns its index, or nothing when the expansion is complete.
std::optional<std::size_t> select_generator(DataArray& data);

/// Shadow triangles cast by the scene for a point generator. Vertex
/// generators also get their interior angle covered.
std::vector<Triangle> shadow_triangles(const Scene& scene, const DataEntry& generator, const EngineConfig& config);

struct ShadowPlan {
    std::vector<Triangle> triangles;
    ShadowProfile profile;
};

/// Like shadow_triangles, but leaves out edges whose shadow lies entirely in
/// nearer shadows, so the covered pixel set is unchanged. The profile
/// describes the kept triangles.
ShadowPlan plan_shadow(const Scene& scene, const DataEntry& generator, const EngineConfig& config);
/// Same, reusing the storage of `plan`.
void plan_shadow(const Scene& scene, const DataEntry& generator, const EngineConfig& config, ShadowPlan& plan);

/// Stencil of pixels the generator cannot light. Sub-segment generators use a
/// per-pixel line-of-sight test to the projection foot instead of triangles.
StencilGrid shadow_mask(const Scene& scene, const DataEntry& generator, const EngineConfig& config);

void cone_pass(Framebuffer& fb, const StencilGrid& stencil, const DataEntry& generator);

void distance_pass(DataArray& data, const Scene& scene, const DataEntry& generator);

/// Throws InternalError if the expansion order ever decreases.
SpmResult build_spm(const Scene& scene, const SourceSpec& sources, const EngineConfig& config);

} // namespace spm
