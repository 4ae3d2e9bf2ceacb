#pragma once

#include "spm/engine.hpp"
#include "spm/query.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace spm {

struct SceneDocument {
    Scene scene;
    SourceSpec sources;
};

/// Parses and validates a JSON scene document:
///
///     {"version": 1,
///      "domain": [[xmin, ymin], [xmax, ymax]],        (optional)
///      "obstacles": [[[x, y], ...], ...],
///      "source_points": [[x, y], ...],
///      "source_segments": [[[x1, y1], [x2, y2]], ...]}
///
/// Throws ValidationError naming the offending field or element.
SceneDocument parse_scene(std::string_view text);
SceneDocument load_scene(const std::filesystem::path& path);
std::string dump_scene(const Scene& scene, const SourceSpec& sources);

inline constexpr std::uint16_t kSpmBinaryVersion = 1;

/// Little-endian "SPMF" container: header, pixel records, data array, then a
/// trailer with the scene, sources, config and expansion order.
void write_spm(const SpmResult& spm, std::ostream& out);
SpmResult read_spm(std::istream& in);
void save_spm(const SpmResult& spm, const std::filesystem::path& path);
SpmResult load_spm(const std::filesystem::path& path);

/// P6 image colouring each pixel by its parent position; unreached pixels black.
void export_region_image(const SpmResult& spm, const std::filesystem::path& path);
/// P6 grayscale distance image with white rings every `spacing` units.
void export_distance_image(const SpmResult& spm, const std::filesystem::path& path, double spacing);
/// CSV with columns level,polyline_id,x,y.
void export_isolines_csv(std::span<const Isoline> isolines, const std::filesystem::path& path);
void write_isolines_csv(std::span<const Isoline> isolines, std::ostream& out);

} // namespace spm
