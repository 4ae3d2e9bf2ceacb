#include "cli.hpp"

#include "spm/engine.hpp"
#include "spm/errors.hpp"
#include "spm/oracle.hpp"
#include "spm/query.hpp"
#include "spm/scene_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace spm {

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kInvalid = 2, kVerifyFailed = 3, kInternal = 4 };

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

Point2 parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw UsageError("expected a point as X,Y, got '" + text + "'");
    }
    try {
        std::size_t used_x = 0;
        std::size_t used_y = 0;
        const std::string xs = text.substr(0, comma);
        const std::string ys = text.substr(comma + 1);
        const Point2 p{std::stod(xs, &used_x), std::stod(ys, &used_y)};
        if (used_x != xs.size() || used_y != ys.size() || !is_finite(p)) {
            throw UsageError("");
        }
        return p;
    } catch (const std::exception&) {
        throw UsageError("expected a point as X,Y, got '" + text + "'");
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Options {
    std::string input;
    std::string out;
    std::string regions;
    std::string distance_image;
    std::string point;
    std::vector<double> levels;
    int resolution = 256;
    int repeat = 3;
    double spacing = 0.1;
    double tolerance = 1e-5;
    bool refine = false;
    bool serial = false;
};

EngineConfig config_for(const Options& o) {
    EngineConfig config;
    config.resolution = o.resolution;
    config.execution = o.serial ? Execution::serial : Execution::parallel;
    return config;
}

int run_build(const Options& o, std::ostream& out) {
    const SceneDocument doc = load_scene(o.input);
    const auto t0 = std::chrono::steady_clock::now();
    const SpmResult spm = build_spm(doc.scene, doc.sources, config_for(o));
    const double elapsed = seconds_since(t0);
    save_spm(spm, o.out);
    if (!o.regions.empty()) {
        export_region_image(spm, o.regions);
    }
    if (!o.distance_image.empty()) {
        export_distance_image(spm, o.distance_image, o.spacing);
    }
    out << "built " << o.resolution << "x" << o.resolution << " map with " << spm.data.n_total() << " entries in "
        << fmt("%.3f", elapsed) << " s\n";
    return kOk;
}

int run_query(const Options& o, std::ostream& out) {
    const SpmResult spm = load_spm(o.input);
    out << fmt("%.12g", query_distance(parse_point(o.point), spm, o.refine)) << "\n";
    return kOk;
}

int run_path(const Options& o, std::ostream& out) {
    const SpmResult spm = load_spm(o.input);
    const PathPolyline path = shortest_path(parse_point(o.point), spm, o.refine);
    for (const Point2& p : path.points) {
        out << fmt("%.12g", p.x) << " " << fmt("%.12g", p.y) << "\n";
    }
    out << "length " << fmt("%.12g", path.length) << "\n";
    return kOk;
}

int run_isolines(const Options& o, std::ostream& out) {
    const SpmResult spm = load_spm(o.input);
    const std::vector<Isoline> lines = extract_isolines(spm, o.levels);
    export_isolines_csv(lines, o.out);
    std::size_t count = 0;
    for (const Isoline& iso : lines) {
        count += iso.polylines.size();
    }
    out << "wrote " << count << " polylines to " << o.out << "\n";
    return kOk;
}

int run_verify(const Options& o, std::ostream& out) {
    const SceneDocument doc = load_scene(o.input);
    const auto t0 = std::chrono::steady_clock::now();
    const SpmResult spm = build_spm(doc.scene, doc.sources, config_for(o));
    const OracleGrid oracle = exact_spm_raster(doc.scene, doc.sources, o.resolution);
    const ComparisonReport report = compare(spm, oracle, o.tolerance);
    const bool pass = report.matched_fraction() >= 0.99 && report.boundary_confined;
    out << "total_free_pixels " << report.total_free_pixels << "\n"
        << "matched " << report.matched << " (" << fmt("%.4f", 100.0 * report.matched_fraction()) << "%)\n"
        << "mismatches " << report.mismatch_locations.size() << "\n"
        << "max_abs_error " << fmt("%.3g", report.max_abs_error) << "\n"
        << "boundary_confined " << (report.boundary_confined ? "true" : "false") << "\n"
        << "seconds " << fmt("%.3f", seconds_since(t0)) << "\n"
        << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kOk : kVerifyFailed;
}

int run_bench(const Options& o, std::ostream& out) {
    const SceneDocument doc = load_scene(o.input);
    const EngineConfig config = config_for(o);
    double total = 0.0;
    double best = 0.0;
    for (int k = 0; k < o.repeat; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const SpmResult spm = build_spm(doc.scene, doc.sources, config);
        const double t = seconds_since(t0);
        total += t;
        best = k == 0 ? t : std::min(best, t);
    }
    out << "mean " << fmt("%.4f", total / o.repeat) << " s, min " << fmt("%.4f", best) << " s over " << o.repeat
        << " runs\n";
    return kOk;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shortest path maps among polygonal obstacles", "spm"};
    app.require_subcommand(1);
    Options o;

    auto* build = app.add_subcommand("build", "Build a shortest path map from a scene");
    build->add_option("scene", o.input, "Scene JSON")->required();
    build->add_option("--resolution,-r", o.resolution, "Framebuffer resolution")->check(CLI::Range(2, 16384));
    build->add_option("--out,-o", o.out, "Output SPM binary")->required();
    build->add_option("--regions", o.regions, "Region image (PPM)");
    auto* dist_opt = build->add_option("--distance", o.distance_image, "Distance image (PPM)");
    build->add_option("--spacing", o.spacing, "Ring spacing for the distance image")->needs(dist_opt);
    build->add_flag("--serial", o.serial, "Use the serial reference passes");

    auto* query = app.add_subcommand("query", "Geodesic distance at a point");
    query->add_option("spm", o.input, "SPM binary")->required();
    query->add_option("--point,-p", o.point, "X,Y")->required();
    query->add_flag("--refine", o.refine, "Compare neighbouring parents");

    auto* path = app.add_subcommand("path", "Shortest path from a point to the nearest source");
    path->add_option("spm", o.input, "SPM binary")->required();
    path->add_option("--point,-p", o.point, "X,Y")->required();
    path->add_flag("--refine", o.refine, "Compare neighbouring parents");

    auto* iso = app.add_subcommand("isolines", "Write distance isolines as CSV");
    iso->add_option("spm", o.input, "SPM binary")->required();
    iso->add_option("--levels", o.levels, "Comma-separated levels")->required()->delimiter(',');
    iso->add_option("--out,-o", o.out, "Output CSV")->required();

    auto* verify = app.add_subcommand("verify", "Compare the engine against the exact oracle");
    verify->add_option("scene", o.input, "Scene JSON")->required();
    verify->add_option("--resolution,-r", o.resolution, "Framebuffer resolution")->check(CLI::Range(2, 16384));
    verify->add_option("--tolerance", o.tolerance, "Per-pixel absolute tolerance");
    verify->add_flag("--serial", o.serial, "Use the serial reference passes");

    auto* bench = app.add_subcommand("bench", "Time repeated builds");
    bench->add_option("scene", o.input, "Scene JSON")->required();
    bench->add_option("--resolution,-r", o.resolution, "Framebuffer resolution")->check(CLI::Range(2, 16384));
    bench->add_option("--repeat", o.repeat, "Number of builds")->check(CLI::PositiveNumber);
    bench->add_flag("--serial", o.serial, "Use the serial reference passes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o_out;
        std::ostringstream o_err;
        const int code = app.exit(e, o_out, o_err);
        out << o_out.str();
        err << o_err.str();
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*build) return run_build(o, out);
        if (*query) return run_query(o, out);
        if (*path) return run_path(o, out);
        if (*iso) return run_isolines(o, out);
        if (*verify) return run_verify(o, out);
        return run_bench(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
}

} // namespace spm
