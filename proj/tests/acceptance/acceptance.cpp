// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "support.hpp"

#include "cli.hpp"
#include "spm/errors.hpp"
#include "spm/oracle.hpp"
#include "spm/query.hpp"
#include "spm/scene_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace spm;
using namespace spm::test;

namespace {

namespace fs = std::filesystem;

constexpr int kResolution = 256;
constexpr double kPixelTolerance = 1e-5;
constexpr double kMatchedFraction = 0.99;
constexpr double kSceneSeconds = 60.0;
constexpr double kVertexTolerance = 1e-9;
constexpr double kKnownValue = 1.618034;
constexpr double kKnownTolerance = 1e-6;
constexpr double kPathTolerance = 1e-9;
constexpr double kReductionTolerance = 1e-12;
constexpr double kCriticalTolerance = 1e-9;
constexpr int kScalingResolution = 1000;
constexpr double kScalingRatio = 6.0;
constexpr int kScalingRuns = 3;

const std::vector<std::string> kCorpus{"empty", "square", "spiral", "multi13", "segment", "grid4"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %d %-22s %s  %s\n", criterion, name, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "spm");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream o;
    std::ostringstream e;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    return code;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CorpusBuild {
    std::string name;
    SceneDocument doc;
    SpmResult spm;
    double build_seconds;
};

std::vector<CorpusBuild> build_corpus() {
    std::vector<CorpusBuild> out;
    for (const std::string& name : kCorpus) {
        SceneDocument doc = load_scene(scene_path(name));
        const auto t0 = std::chrono::steady_clock::now();
        SpmResult spm = build_spm(doc.scene, doc.sources, config(kResolution));
        out.push_back({name, std::move(doc), std::move(spm), seconds_since(t0)});
    }
    return out;
}

void oracle_equivalence(const std::vector<CorpusBuild>& corpus) {
    bool pass = true;
    std::string detail;
    for (const CorpusBuild& c : corpus) {
        const auto t0 = std::chrono::steady_clock::now();
        const OracleGrid oracle = exact_spm_raster(c.doc.scene, c.doc.sources, kResolution);
        const ComparisonReport rep = compare(c.spm, oracle, kPixelTolerance);
        const double seconds = c.build_seconds + seconds_since(t0);
        const bool ok = rep.matched_fraction() >= kMatchedFraction && rep.boundary_confined && seconds <= kSceneSeconds;
        pass = pass && ok;
        detail += c.name + fmt(" %.2f%%", 100.0 * rep.matched_fraction()) + (rep.boundary_confined ? "" : " unconfined") +
                  fmt(" %.1fs; ", seconds);
    }
    report(1, "oracle equivalence", pass, detail);
}

void vertex_exactness(const std::vector<CorpusBuild>& corpus) {
    std::size_t checked = 0;
    std::size_t bad = 0;
    double worst = 0.0;
    for (const CorpusBuild& c : corpus) {
        const VisibilityGraph g = build_visibility_graph(c.doc.scene, c.doc.sources);
        const std::vector<double> nodes = multi_source_dijkstra(g);
        for (const DataEntry& e : c.spm.data.entries) {
            if (e.kind != EntryKind::vertex || std::isinf(nodes[e.ref])) continue;
            ++checked;
            const double err = std::abs(e.distance - nodes[e.ref]);
            worst = std::max(worst, std::isnan(err) ? kUnreached : err);
            bad += !(err <= kVertexTolerance);
        }
    }
    report(2, "vertex exactness", bad == 0 && checked > 0,
           fmt("%.0f reachable vertices, %.0f off, max error %.3g", double(checked), double(bad), worst));
}

void known_value(const fs::path& dir) {
    const std::string bin = (dir / "square.bin").string();
    std::string out;
    bool pass = cli({"build", scene_path("square").string(), "-r", std::to_string(kResolution), "-o", bin}) == 0;
    double value = NAN;
    if (pass && cli({"query", bin, "--point", "0.75,0", "--refine"}, &out) == 0) value = std::stod(out);
    pass = pass && std::abs(value - kKnownValue) <= kKnownTolerance;

    std::size_t vertices = 0;
    double length = NAN;
    if (cli({"path", bin, "--point", "0.75,0", "--refine"}, &out) == 0) {
        std::istringstream lines(out);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.rfind("length ", 0) == 0) {
                length = std::stod(line.substr(7));
            } else {
                ++vertices;
            }
        }
    }
    pass = pass && vertices == 4 && std::abs(length - value) <= kPathTolerance;
    report(3, "known value", pass,
           fmt("query %.9f, path length %.9f, ", value, length) + std::to_string(vertices) + " path vertices");
}

void degenerate_reductions() {
    const SourceSpec points = point_sources({{-0.4, 0.3}, {0.5, -0.6}, {0.05, 0.05}});
    const SpmResult a = build_spm(Scene(), points, config(kResolution));
    const SourceSpec segment = segment_source({-0.3, -0.5}, {0.6, 0.4});
    const SpmResult b = build_spm(Scene(), segment, config(kResolution));
    const RasterGrid grid{Rect{}, kResolution};
    double worst_points = 0.0;
    double worst_segment = 0.0;
    for (int j = 0; j < kResolution; ++j) {
        for (int i = 0; i < kResolution; ++i) {
            const Point2 c = grid.center(i, j);
            double best = kUnreached;
            for (const Point2& s : points.points) best = std::min(best, distance(c, s));
            worst_points = std::max(worst_points, std::abs(a.framebuffer.pixel(i, j).distance - best));
            const double seg = project_on_segment(c, segment.segments[0]).dist;
            worst_segment = std::max(worst_segment, std::abs(b.framebuffer.pixel(i, j).distance - seg));
        }
    }
    report(4, "degenerate reductions", worst_points <= kReductionTolerance && worst_segment <= kReductionTolerance,
           fmt("points max error %.3g, segment max error %.3g", worst_points, worst_segment));
}

void monotone_expansion(const std::vector<CorpusBuild>& corpus) {
    bool pass = true;
    std::size_t steps = 0;
    for (const CorpusBuild& c : corpus) {
        pass = pass && std::is_sorted(c.spm.expansion.begin(), c.spm.expansion.end()) && !c.spm.expansion.empty();
        steps += c.spm.expansion.size();
    }
    report(5, "monotone expansion", pass, fmt("%.0f iterations over the corpus", double(steps)));
}

void parent_chains(const std::vector<CorpusBuild>& corpus) {
    std::size_t reached = 0;
    std::size_t bad = 0;
    for (const CorpusBuild& c : corpus) {
        const DataArray& data = c.spm.data;
        const Framebuffer& fb = c.spm.framebuffer;
        for (std::size_t idx = 0; idx < fb.grid().pixel_count(); ++idx) {
            const Pixel px = fb.pixel_at(idx);
            if (!px.reached()) continue;
            ++reached;
            bool ok = false;
            double last = px.distance;
            std::int32_t id = px.parent_id;
            for (std::size_t hop = 0; hop < data.n_total() + 1; ++hop) {
                if (id <= 0 || static_cast<std::size_t>(id) >= data.entries.size()) break;
                const DataEntry& e = data[static_cast<std::size_t>(id)];
                // The pixel may sit on its parent; entries themselves strictly decrease.
                if (hop == 0 ? e.distance > last : e.distance >= last) break;
                last = e.distance;
                if (e.parent_id == id) {
                    ok = e.distance == 0.0 && e.kind != EntryKind::vertex && hop + 1 <= data.n_total();
                    break;
                }
                id = e.parent_id;
            }
            bad += !ok;
        }
    }
    report(6, "parent chains", bad == 0,
           fmt("%.0f reached pixels, %.0f broken chains", double(reached), double(bad)));
}

void critical_points_check() {
    const Scene scene = triangle_scene();
    const Segment2 l({0, -1}, {0, 1});
    const std::vector<Point2> crit = critical_points(l, scene);
    const DataArray data = build_data_array(scene, segment_source(l.a(), l.b()));
    const auto subs = std::count_if(data.entries.begin(), data.entries.end(),
                                    [](const DataEntry& e) { return e.kind == EntryKind::sub_segment; });
    const bool pass = crit.size() == 2 && distance(crit[0], {0, 0}) <= kCriticalTolerance &&
                      distance(crit[1], {0, 0.4}) <= kCriticalTolerance && subs == 3;
    std::string detail = std::to_string(crit.size()) + " critical points";
    for (const Point2& p : crit) detail += fmt(" (%.9g, %.9g)", p.x, p.y);
    report(7, "critical points", pass, detail + ", " + std::to_string(subs) + " sub-segments");
}

double best_build_seconds(const Scene& scene, const SourceSpec& sources) {
    double best = kUnreached;
    for (int run = 0; run < kScalingRuns; ++run) {
        const auto t0 = std::chrono::steady_clock::now();
        const SpmResult spm = build_spm(scene, sources, config(kScalingResolution));
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void scaling() {
    const SourceSpec sources = point_sources({{0.0123, 0.0061}});
    const Scene small = grid_scene(10);
    const Scene large = grid_scene(20);
    const double t_small = best_build_seconds(small, sources);
    const double t_large = best_build_seconds(large, sources);
    const double ratio = t_large / t_small;
    report(8, "scaling", ratio <= kScalingRatio,
           fmt("400 vertices %.2fs, 1600 vertices %.2fs, ratio %.2f", t_small, t_large, ratio));
}

void determinism(const fs::path& dir) {
    const std::string scene = scene_path("multi13").string();
    bool ran = true;
    for (const std::string tag : {"a", "b"}) {
        ran = ran && cli({"build", scene, "-r", std::to_string(kResolution), "-o", (dir / (tag + ".bin")).string(),
                          "--regions", (dir / (tag + ".ppm")).string(), "--distance",
                          (dir / (tag + "_dist.ppm")).string()}) == 0;
    }
    const bool same = read_file(dir / "a.bin") == read_file(dir / "b.bin") &&
                      read_file(dir / "a.ppm") == read_file(dir / "b.ppm") &&
                      read_file(dir / "a_dist.ppm") == read_file(dir / "b_dist.ppm");
    report(9, "determinism", ran && same, same ? "SPM binary and both images byte-identical" : "outputs differ");
}

} // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / ("spm_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    try {
        const std::vector<CorpusBuild> corpus = build_corpus();
        oracle_equivalence(corpus);
        vertex_exactness(corpus);
        known_value(dir);
        degenerate_reductions();
        monotone_expansion(corpus);
        parent_chains(corpus);
        critical_points_check();
        scaling();
        determinism(dir);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        ++failures;
    }
    fs::remove_all(dir);
    std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
