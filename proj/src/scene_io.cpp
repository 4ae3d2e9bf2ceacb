#include "spm/scene_io.hpp"

#include "spm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace spm {

namespace {

using nlohmann::json;

Point2 read_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError(where + ": expected [x, y]");
    }
    const Point2 p{j[0].get<double>(), j[1].get<double>()};
    if (!is_finite(p)) {
        throw ValidationError(where + ": coordinates must be finite");
    }
    return p;
}

const json& array_field(const json& doc, const char* key) {
    static const json empty = json::array();
    if (!doc.contains(key)) {
        return empty;
    }
    const json& v = doc.at(key);
    if (!v.is_array()) {
        throw ValidationError(std::string(key) + ": expected an array");
    }
    return v;
}

json point_json(Point2 p) {
    return json::array({p.x, p.y});
}

} // namespace

SceneDocument parse_scene(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scene syntax error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("scene document must be a JSON object");
    }
    static const char* const known[] = {"version", "domain", "obstacles", "source_points", "source_segments"};
    for (const auto& item : doc.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw ValidationError("unknown field '" + item.key() + "'");
        }
    }
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"].get<int>() != 1) {
        throw ValidationError("version: expected 1");
    }

    Rect domain;
    if (doc.contains("domain")) {
        const json& d = doc["domain"];
        if (!d.is_array() || d.size() != 2) {
            throw ValidationError("domain: expected [[xmin, ymin], [xmax, ymax]]");
        }
        domain = {read_point(d[0], "domain[0]"), read_point(d[1], "domain[1]")};
    }

    std::vector<Polygon> obstacles;
    const json& obs = array_field(doc, "obstacles");
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const std::string where = "obstacles[" + std::to_string(i) + "]";
        if (!obs[i].is_array()) {
            throw ValidationError(where + ": expected a list of vertices");
        }
        std::vector<Point2> verts;
        for (std::size_t k = 0; k < obs[i].size(); ++k) {
            verts.push_back(read_point(obs[i][k], where + "[" + std::to_string(k) + "]"));
        }
        try {
            obstacles.emplace_back(std::move(verts));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }

    SourceSpec sources;
    const json& pts = array_field(doc, "source_points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sources.points.push_back(read_point(pts[i], "source_points[" + std::to_string(i) + "]"));
    }
    const json& segs = array_field(doc, "source_segments");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string where = "source_segments[" + std::to_string(i) + "]";
        if (!segs[i].is_array() || segs[i].size() != 2) {
            throw ValidationError(where + ": expected [[x1, y1], [x2, y2]]");
        }
        const Point2 a = read_point(segs[i][0], where + "[0]");
        const Point2 b = read_point(segs[i][1], where + "[1]");
        try {
            sources.segments.emplace_back(a, b);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }

    SceneDocument out{Scene(domain, std::move(obstacles)), std::move(sources)};
    out.sources.validate(out.scene);
    return out;
}

SceneDocument load_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open scene file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scene(text.str());
}

std::string dump_scene(const Scene& scene, const SourceSpec& sources) {
    json doc;
    doc["version"] = 1;
    doc["domain"] = json::array({point_json(scene.domain().min), point_json(scene.domain().max)});
    doc["obstacles"] = json::array();
    for (const Polygon& poly : scene.obstacles()) {
        json verts = json::array();
        for (const Point2& v : poly.vertices()) {
            verts.push_back(point_json(v));
        }
        doc["obstacles"].push_back(verts);
    }
    doc["source_points"] = json::array();
    for (const Point2& p : sources.points) {
        doc["source_points"].push_back(point_json(p));
    }
    doc["source_segments"] = json::array();
    for (const Segment2& s : sources.segments) {
        doc["source_segments"].push_back(json::array({point_json(s.a()), point_json(s.b())}));
    }
    return doc.dump(1) + "\n";
}

} // namespace spm
