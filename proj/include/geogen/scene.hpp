#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "geogen/geometry.hpp"
#include "geogen/relation.hpp"

namespace geogen {

struct UnresolvedReferenceError : Error {
    std::string point;
    explicit UnresolvedReferenceError(const std::string& name)
        : Error("reference to unknown point '" + name + "'"), point(name) {}
};

// base segment drawn in the diagram, endpoints stored sorted
struct DrawnSegment {
    std::string a, b;
    bool operator==(const DrawnSegment&) const = default;
};

struct DrawnCircle {
    std::string center;
    double radius = 0.0;
    std::vector<std::string> through;  // insertion order
};

struct Scene {
    std::vector<std::pair<std::string, Vec2>> points;  // construction order
    ClauseList history;
    std::vector<DrawnSegment> segments;
    std::vector<DrawnCircle> circles;
    std::uint64_t seed = 0;
    // multiplier mapping frame lengths to displayed lengths; snapped during
    // construction so the first segment's 2-decimal label is exact
    double length_scale = 1.0;

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    const Vec2& at(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw UnresolvedReferenceError(name);
        return points[it->second].second;
    }

    void add_point(const std::string& name, const Vec2& p) {
        index_.emplace(name, points.size());
        points.emplace_back(name, p);
    }

    bool has_segment(const std::string& a, const std::string& b) const;
    // adds the (sorted) segment if not already present
    void ensure_segment(const std::string& a, const std::string& b);
    // merges into an existing circle around `center` with matching radius,
    // otherwise starts a new one
    void add_to_circle(const std::string& center, double radius, const std::string& through);

    std::vector<std::string> point_names() const;

  private:
    std::unordered_map<std::string, std::size_t> index_;
};

// versioned structured record: {version, points, history, seed, length_scale}
std::string serialize_scene(const Scene& scene);
Scene parse_scene(const std::string& text);

}  // namespace geogen
