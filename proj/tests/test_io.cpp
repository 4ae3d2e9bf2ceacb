#include "support.hpp"

#include "cli.hpp"
#include "spm/errors.hpp"
#include "spm/scene_io.hpp"

#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>
#include <sstream>
#include <string>
#include <vector>

using namespace spm;
using namespace spm::test;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("spm_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& name) const { return path / name; }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "spm");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string error_of(std::string_view text) {
    try {
        parse_scene(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("parse_scene examples") {
    const SceneDocument doc = parse_scene(R"({"version": 1,
        "obstacles": [[[-0.25, -0.25], [0.25, -0.25], [0.25, 0.25], [-0.25, 0.25]]],
        "source_points": [[-0.75, 0]], "source_segments": []})");
    CHECK(doc.scene.vertex_count() == 4);
    CHECK(doc.sources.points.size() == 1);

    const std::string inside = error_of(R"({"version": 1,
        "obstacles": [[[-0.25, -0.25], [0.25, -0.25], [0.25, 0.25], [-0.25, 0.25]]],
        "source_points": [[0.5, 0.5], [0, 0]], "source_segments": []})");
    CHECK(inside.find("source point 1") != std::string::npos);

    const SceneDocument cw = parse_scene(R"({"version": 1,
        "obstacles": [[[-0.25, -0.25], [-0.25, 0.25], [0.25, 0.25], [0.25, -0.25]]],
        "source_points": [[-0.75, 0]], "source_segments": []})");
    CHECK(cw.scene.obstacles()[0].was_reversed());
    CHECK(cw.scene.obstacles()[0].signed_area() > 0);
}

TEST_CASE("parse_scene diagnostics") {
    CHECK(error_of("{\"version\": 1,\n \"obstacles\": [}").find("line 2") != std::string::npos);
    CHECK(error_of(R"({"version": 2, "obstacles": [], "source_points": [[0,0]], "source_segments": []})")
              .find("version") != std::string::npos);
    CHECK(error_of(R"({"version": 1, "obstacles": [[[0,0],[0.5,0]]], "source_points": [[0.9,0.9]],
        "source_segments": []})")
              .find("obstacles[0]") != std::string::npos);
    CHECK(error_of(R"({"version": 1, "obstacles": [[[0,0],[0.5,0.5],[0.5,0],[0,0.5]]],
        "source_points": [[0.9,0.9]], "source_segments": []})")
              .find("obstacles[0]") != std::string::npos);
    CHECK(error_of(R"({"version": 1, "obstacles": [[[0,0],[1.5,0],[0,0.5]]], "source_points": [[-0.9,0.9]],
        "source_segments": []})") != "");
    CHECK(error_of(R"({"version": 1, "obstacles": [], "source_points": [[0, "x"]], "source_segments": []})")
              .find("source_points[0]") != std::string::npos);
    CHECK(error_of(R"({"version": 1, "obstacles": [], "source_points": [], "source_segments": [[[0,0],[0,0]]]})")
              .find("source_segments[0]") != std::string::npos);
    CHECK(error_of(R"({"version": 1, "obstacles": [], "source_points": [], "source_segments": []})") != "");
    CHECK(error_of(R"({"version": 1, "colour": 3})").find("colour") != std::string::npos);
}

TEST_CASE("scene documents round-trip") {
    const SceneDocument doc = load_scene(scene_path("multi13"));
    const SceneDocument again = parse_scene(dump_scene(doc.scene, doc.sources));
    CHECK(again.scene.vertex_count() == doc.scene.vertex_count());
    CHECK(again.sources.points == doc.sources.points);
    for (std::size_t k = 0; k < doc.scene.vertex_count(); ++k) {
        CHECK(again.scene.vertex(k) == doc.scene.vertex(k));
    }
}

TEST_CASE("SPM binary round-trips bit for bit") {
    const SceneDocument doc = load_scene(scene_path("segment"));
    const SpmResult spm = build_spm(doc.scene, doc.sources, config(64));
    std::stringstream buf;
    write_spm(spm, buf);
    const std::string bytes = buf.str();
    CHECK(bytes.substr(0, 4) == "SPMF");
    CHECK(bytes.size() >= 4 + 2 + 4 + 28u * 64 * 64);

    const SpmResult back = read_spm(buf);
    CHECK(back.framebuffer == spm.framebuffer);
    CHECK(back.data == spm.data);
    CHECK(back.expansion == spm.expansion);
    std::stringstream again;
    write_spm(back, again);
    CHECK(again.str() == bytes);

    std::stringstream bad("SPMX....");
    CHECK_THROWS_AS(read_spm(bad), IoError);
    std::stringstream cut(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_spm(cut), IoError);
}

TEST_CASE("region and distance images") {
    TempDir dir;
    const SpmResult empty = build_spm(Scene(), point_sources({{0, 0}}), config(32));
    export_region_image(empty, dir / "empty.ppm");
    const std::string img = read_file(dir / "empty.ppm");
    const std::string header = "P6\n32 32\n255\n";
    REQUIRE(img.substr(0, header.size()) == header);
    REQUIRE(img.size() == header.size() + 3 * 32 * 32);
    for (std::size_t k = header.size(); k < img.size(); k += 3) {
        CHECK(static_cast<unsigned char>(img[k]) == 127);
        CHECK(static_cast<unsigned char>(img[k + 1]) == 127);
        CHECK(img[k + 2] == 0);
    }

    const SpmResult sq = build_spm(square_scene(), point_sources({{-0.75, 0}}), config(64));
    export_region_image(sq, dir / "square.ppm");
    const std::string simg = read_file(dir / "square.ppm");
    std::set<std::array<unsigned char, 3>> colours;
    for (std::size_t k = header.size(); k + 2 < simg.size(); k += 3) {
        colours.insert({static_cast<unsigned char>(simg[k]), static_cast<unsigned char>(simg[k + 1]),
                        static_cast<unsigned char>(simg[k + 2])});
    }
    CHECK(colours.size() >= 5);
    CHECK(colours.count({0, 0, 0}) == 1);

    export_distance_image(sq, dir / "dist.ppm", 0.25);
    const std::string dimg = read_file(dir / "dist.ppm");
    const std::size_t off = std::string("P6\n64 64\n255\n").size();
    int white = 0;
    // Image rows run top to bottom.
    for (int row = 0; row < 64; ++row) {
        for (int i = 0; i < 64; ++i) {
            const auto v = static_cast<unsigned char>(dimg[off + 3 * (row * 64 + i)]);
            if (v == 255) {
                ++white;
                CHECK(sq.framebuffer.pixel(i, 63 - row).reached());
            }
        }
    }
    CHECK(white > 0);
    export_distance_image(sq, dir / "none.ppm", 10.0);
    const std::string nimg = read_file(dir / "none.ppm");
    int none = 0;
    for (int idx = 0; idx < 64 * 64; ++idx) none += static_cast<unsigned char>(nimg[off + 3 * idx]) == 255;
    CHECK(none == 0);

    CHECK_THROWS_AS(export_region_image(sq, dir / "missing" / "x.ppm"), IoError);
}

TEST_CASE("isoline CSV re-parses to the emitted vertices") {
    const SpmResult spm = build_spm(square_scene(), point_sources({{-0.75, 0}}), config(64));
    const std::vector<double> levels{0.5, 1.0};
    const std::vector<Isoline> lines = extract_isolines(spm, levels);
    std::ostringstream out;
    write_isolines_csv(lines, out);
    std::istringstream in(out.str());
    std::string row;
    std::getline(in, row);
    CHECK(row == "level,polyline_id,x,y");
    std::vector<std::tuple<double, int, double, double>> rows;
    while (std::getline(in, row)) {
        double level, x, y;
        int id;
        char c1, c2, c3;
        std::istringstream r(row);
        r >> level >> c1 >> id >> c2 >> x >> c3 >> y;
        REQUIRE(r);
        rows.emplace_back(level, id, x, y);
    }
    std::size_t k = 0;
    for (const Isoline& iso : lines) {
        for (std::size_t p = 0; p < iso.polylines.size(); ++p) {
            for (const Point2& v : iso.polylines[p]) {
                REQUIRE(k < rows.size());
                const auto [level, id, x, y] = rows[k++];
                CHECK(std::abs(level - iso.level) <= 1e-9);
                CHECK(std::abs(x - v.x) <= 1e-9);
                CHECK(std::abs(y - v.y) <= 1e-9);
            }
        }
    }
    CHECK(k == rows.size());
}

TEST_CASE("cli exit codes and outputs") {
    TempDir dir;
    const std::string square = scene_path("square").string();
    const std::string bin = (dir / "square.bin").string();

    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"build", square}).code == 1);
    CHECK(run({"build", square, "-r", "1", "-o", bin}).code == 1);

    const CliRun built = run({"build", square, "-r", "256", "-o", bin, "--regions", (dir / "r.ppm").string()});
    REQUIRE(built.code == 0);
    CHECK(fs::exists(bin));

    const CliRun q = run({"query", bin, "--point", "0.75,0", "--refine"});
    REQUIRE(q.code == 0);
    CHECK(std::abs(std::stod(q.out) - 1.618034) <= 1e-6);
    CHECK(run({"query", bin, "--point", "0,0"}).code == 2);
    CHECK(run({"query", bin, "--point", "nonsense"}).code == 1);

    const CliRun at_source = run({"path", bin, "--point", "-0.75,0"});
    REQUIRE(at_source.code == 0);
    CHECK(at_source.out == "-0.75 0\nlength 0\n");

    const CliRun around = run({"path", bin, "--point", "0.75,0", "--refine"});
    REQUIRE(around.code == 0);
    CHECK(std::count(around.out.begin(), around.out.end(), '\n') == 5);

    const CliRun iso = run({"isolines", bin, "--levels", "0.5,1", "--out", (dir / "iso.csv").string()});
    CHECK(iso.code == 0);
    CHECK(read_file(dir / "iso.csv").rfind("level,polyline_id,x,y\n", 0) == 0);

    const CliRun verify = run({"verify", scene_path("empty").string(), "-r", "64"});
    CHECK(verify.code == 0);
    CHECK(verify.out.find("matched 4096 (100.0000%)") != std::string::npos);

    const CliRun bench = run({"bench", scene_path("empty").string(), "-r", "32", "--repeat", "2"});
    CHECK(bench.code == 0);
    CHECK(bench.out.find("over 2 runs") != std::string::npos);

    std::ofstream(dir / "bad.json") << R"({"version": 1, "obstacles": [], "source_points": [[3, 0]], "source_segments": []})";
    CHECK(run({"build", (dir / "bad.json").string(), "-o", bin}).code == 2);
    CHECK(run({"query", (dir / "bad.json").string(), "--point", "0,0"}).code == 2);
    CHECK(run({"build", (dir / "absent.json").string(), "-o", bin}).code == 2);
}

TEST_CASE("builds are byte-deterministic") {
    TempDir dir;
    const std::string scene = scene_path("multi13").string();
    for (const char* tag : {"a", "b"}) {
        const std::string t = tag;
        REQUIRE(run({"build", scene, "-r", "128", "-o", (dir / (t + ".bin")).string(), "--regions",
                     (dir / (t + ".ppm")).string(), "--distance", (dir / (t + "d.ppm")).string()})
                    .code == 0);
    }
    CHECK(read_file(dir / "a.bin") == read_file(dir / "b.bin"));
    CHECK(read_file(dir / "a.ppm") == read_file(dir / "b.ppm"));
    CHECK(read_file(dir / "ad.ppm") == read_file(dir / "bd.ppm"));
}
