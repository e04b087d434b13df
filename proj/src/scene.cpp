#include "geogen/scene.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "geogen/facts.hpp"

namespace geogen {

using ordered_json = nlohmann::ordered_json;

bool Scene::has_segment(const std::string& a, const std::string& b) const {
    DrawnSegment s{std::min(a, b), std::max(a, b)};
    return std::find(segments.begin(), segments.end(), s) != segments.end();
}

void Scene::ensure_segment(const std::string& a, const std::string& b) {
    if (!has_segment(a, b)) segments.push_back({std::min(a, b), std::max(a, b)});
}

void Scene::add_to_circle(const std::string& center, double radius, const std::string& through) {
    for (auto& c : circles) {
        if (c.center == center && std::abs(c.radius - radius) < 1e-9 * (1.0 + radius)) {
            if (std::find(c.through.begin(), c.through.end(), through) == c.through.end())
                c.through.push_back(through);
            return;
        }
    }
    circles.push_back({center, radius, {through}});
}

std::vector<std::string> Scene::point_names() const {
    std::vector<std::string> out;
    out.reserve(points.size());
    for (const auto& [name, xy] : points) out.push_back(name);
    return out;
}

std::string serialize_scene(const Scene& scene) {
    ordered_json j;
    j["version"] = 1;
    ordered_json pts = ordered_json::object();
    for (const auto& [name, xy] : scene.points) pts[name] = {xy.x(), xy.y()};
    j["points"] = std::move(pts);
    j["history"] = scene.history.to_string();
    j["seed"] = scene.seed;
    j["length_scale"] = scene.length_scale;
    return j.dump(2) + "\n";
}

Scene parse_scene(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("scene record is not valid JSON: ") + e.what());
    }
    for (const char* field : {"version", "points", "history", "seed"}) {
        if (!j.contains(field)) throw IoError(std::string("scene record missing '") + field + "'");
    }
    Scene scene;
    scene.history = parse_program(j["history"].get<std::string>());
    for (auto it = j["points"].begin(); it != j["points"].end(); ++it) {
        const auto& xy = it.value();
        scene.add_point(it.key(), Vec2(xy.at(0).get<double>(), xy.at(1).get<double>()));
    }
    scene.seed = j["seed"].get<std::uint64_t>();
    scene.length_scale = j.value("length_scale", 1.0);
    rebuild_entities(scene);
    return scene;
}

}  // namespace geogen
