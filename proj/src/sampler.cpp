#include "geogen/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "geogen/geometry.hpp"

namespace geogen {

const char* difficulty_name(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "?";
}

Difficulty difficulty_from(const std::string& name) {
    if (name == "easy") return Difficulty::Easy;
    if (name == "medium") return Difficulty::Medium;
    if (name == "hard") return Difficulty::Hard;
    throw ConfigError("unknown difficulty: " + name);
}

std::pair<int, int> clause_range(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return {2, 3};
        case Difficulty::Medium: return {4, 6};
        case Difficulty::Hard: return {7, 10};
    }
    return {2, 3};
}

namespace {

constexpr int kProposalsPerSlot = 30;

std::string fresh_name(const Scene& scene) {
    for (int suffix = 0;; ++suffix) {
        for (char c = 'a'; c <= 'z'; ++c) {
            std::string name(1, c);
            if (suffix > 0) name += std::to_string(suffix);
            if (!scene.has(name)) return name;
        }
    }
}

struct WeightedPick {
    std::vector<std::string> names;
    std::vector<double> weights;

    void add(std::string name, double w) {
        names.push_back(std::move(name));
        weights.push_back(w);
    }

    std::string pick(Rng& rng) const {
        double total = 0;
        for (double w : weights) total += w;
        double u = rng.uniform() * total;
        for (std::size_t i = 0; i < names.size(); ++i) {
            u -= weights[i];
            if (u <= 0) return names[i];
        }
        return names.back();
    }
};

// Relations that seed a scene from nothing.
WeightedPick opener_menu() {
    WeightedPick menu;
    menu.add("triangle", 3.0);
    menu.add("iso_triangle", 2.0);
    menu.add("equilateral", 1.5);
    menu.add("square", 1.5);
    menu.add("trapezoid", 1.0);
    menu.add("segment", 1.0);
    return menu;
}

WeightedPick extender_menu() {
    WeightedPick menu;
    menu.add("midpoint", 3.0);
    menu.add("foot", 2.0);
    menu.add("parallel_through", 2.0);
    menu.add("angle_bisector", 1.6);
    menu.add("eqdistance", 1.4);
    menu.add("perp_through", 1.4);
    menu.add("reflect_point", 1.2);
    menu.add("angle_mirror", 1.2);
    menu.add("circumcenter", 1.2);
    menu.add("parallelogram", 1.2);
    menu.add("on_circle", 1.0);
    menu.add("intersect_ll", 0.9);
    menu.add("intersect_lc", 0.8);
    menu.add("reflect_line", 0.8);
    menu.add("incenter", 0.7);
    menu.add("centroid", 0.5);
    menu.add("orthocenter", 0.4);
    menu.add("triangle", 0.6);
    menu.add("segment", 0.5);
    menu.add("iso_triangle", 0.4);
    menu.add("square", 0.3);
    menu.add("free", 0.3);
    return menu;
}

std::string pick_point(const Scene& scene, Rng& rng) {
    return scene.points[rng.index(scene.points.size())].first;
}

std::optional<DrawnSegment> pick_segment(const Scene& scene, Rng& rng) {
    if (scene.segments.empty()) return std::nullopt;
    return scene.segments[rng.index(scene.segments.size())];
}

bool distinct(std::initializer_list<std::string> names) {
    std::set<std::string> uniq(names);
    return uniq.size() == names.size();
}

// Builds the argument list for `relation` against the current scene, or
// nullopt when the scene offers no plausible anchor. Cheap geometric
// pre-filters keep the acceptance rate of apply_relation reasonable; the
// engine remains the sole authority on admission.
std::optional<std::vector<std::string>> propose_args(const Scene& scene,
                                                     const std::string& relation,
                                                     Rng& rng) {
    const auto pts = [&](const std::string& n) { return scene.at(n); };

    if (relation == "free" || relation == "segment" || relation == "triangle" ||
        relation == "iso_triangle" || relation == "equilateral" ||
        relation == "square" || relation == "trapezoid") {
        return std::vector<std::string>{};
    }

    if (relation == "midpoint") {
        auto seg = pick_segment(scene, rng);
        if (!seg) return std::nullopt;
        return std::vector<std::string>{seg->a, seg->b};
    }

    if (relation == "foot" || relation == "reflect_line") {
        auto seg = pick_segment(scene, rng);
        if (!seg || scene.points.size() < 3) return std::nullopt;
        std::string c = pick_point(scene, rng);
        if (!distinct({c, seg->a, seg->b})) return std::nullopt;
        if (point_line_distance(pts(c), pts(seg->a), pts(seg->b)) < 0.15)
            return std::nullopt;
        if (relation == "foot")
            return std::vector<std::string>{c, seg->a, seg->b};
        return std::vector<std::string>{c, seg->a, seg->b};
    }

    if (relation == "parallel_through") {
        auto seg = pick_segment(scene, rng);
        if (!seg || scene.points.size() < 3) return std::nullopt;
        std::string a = pick_point(scene, rng);
        if (!distinct({a, seg->a, seg->b})) return std::nullopt;
        if (point_line_distance(pts(a), pts(seg->a), pts(seg->b)) < 0.12)
            return std::nullopt;
        return std::vector<std::string>{a, seg->a, seg->b};
    }

    if (relation == "perp_through") {
        auto seg = pick_segment(scene, rng);
        if (!seg) return std::nullopt;
        // The anchor must lie on the base line; endpoints always qualify,
        // and so does any previously dropped foot or midpoint.
        std::vector<std::string> anchors;
        for (const auto& [name, p] : scene.points)
            if (point_line_distance(p, pts(seg->a), pts(seg->b)) < 1e-9)
                anchors.push_back(name);
        if (anchors.empty()) return std::nullopt;
        std::string c = anchors[rng.index(anchors.size())];
        return std::vector<std::string>{seg->a, seg->b, c};
    }

    if (relation == "angle_bisector") {
        // Need a vertex with two drawn arms forming a bisectable angle.
        std::vector<std::array<std::string, 3>> corners;
        for (const auto& s : scene.segments)
            for (const auto& t : scene.segments) {
                if (s == t) continue;
                std::string v, a, c;
                if (s.a == t.a) v = s.a, a = s.b, c = t.b;
                else if (s.a == t.b) v = s.a, a = s.b, c = t.a;
                else if (s.b == t.a) v = s.b, a = s.a, c = t.b;
                else if (s.b == t.b) v = s.b, a = s.a, c = t.a;
                else continue;
                if (a >= c) continue;  // each corner once
                double deg = deg_of(angle_at(pts(v), pts(a), pts(c)));
                if (deg < 24.0 || deg > 164.0) continue;
                corners.push_back({a, v, c});
            }
        if (corners.empty()) return std::nullopt;
        auto corner = corners[rng.index(corners.size())];
        return std::vector<std::string>{corner[0], corner[1], corner[2]};
    }

    if (relation == "angle_mirror") {
        if (scene.points.size() < 3) return std::nullopt;
        std::string a = pick_point(scene, rng);
        std::string b = pick_point(scene, rng);
        std::string c = pick_point(scene, rng);
        if (!distinct({a, b, c})) return std::nullopt;
        double deg = deg_of(angle_at(pts(b), pts(a), pts(c)));
        if (deg < 14.0 || deg > 80.0) return std::nullopt;
        return std::vector<std::string>{a, b, c};
    }

    if (relation == "reflect_point") {
        if (scene.points.size() < 2) return std::nullopt;
        std::string c = pick_point(scene, rng);
        std::string m = pick_point(scene, rng);
        if (c == m) return std::nullopt;
        double d = (pts(c) - pts(m)).norm();
        if (d < 0.3 || d > 4.0) return std::nullopt;
        return std::vector<std::string>{c, m};
    }

    if (relation == "circumcenter" || relation == "incenter" ||
        relation == "centroid" || relation == "orthocenter") {
        if (scene.points.size() < 3) return std::nullopt;
        std::string a = pick_point(scene, rng);
        std::string b = pick_point(scene, rng);
        std::string c = pick_point(scene, rng);
        if (!distinct({a, b, c})) return std::nullopt;
        if (point_line_distance(pts(c), pts(a), pts(b)) < 0.25) return std::nullopt;
        if (relation == "circumcenter") {
            auto o = circumcenter_of(pts(a), pts(b), pts(c));
            if (!o || (*o - pts(a)).norm() > 4.0) return std::nullopt;
        }
        return std::vector<std::string>{a, b, c};
    }

    if (relation == "on_circle") {
        if (!scene.circles.empty() && rng.chance(0.7)) {
            const auto& circ = scene.circles[rng.index(scene.circles.size())];
            return std::vector<std::string>{circ.center,
                                            circ.through[rng.index(circ.through.size())]};
        }
        if (scene.points.size() < 2) return std::nullopt;
        std::string o = pick_point(scene, rng);
        std::string a = pick_point(scene, rng);
        if (o == a) return std::nullopt;
        double r = (pts(o) - pts(a)).norm();
        if (r < 0.3 || r > 2.5) return std::nullopt;
        return std::vector<std::string>{o, a};
    }

    if (relation == "intersect_ll") {
        if (scene.segments.size() < 2) return std::nullopt;
        auto s = *pick_segment(scene, rng);
        auto t = *pick_segment(scene, rng);
        if (!distinct({s.a, s.b, t.a, t.b})) return std::nullopt;
        Vec2 du = dir_of(pts(s.a), pts(s.b));
        Vec2 dv = dir_of(pts(t.a), pts(t.b));
        if (std::abs(cross2(du, dv)) < 0.25) return std::nullopt;  // near-parallel
        auto x = line_intersection(pts(s.a), pts(s.b), pts(t.a), pts(t.b));
        if (!x) return std::nullopt;
        for (const auto& [name, p] : scene.points)
            if ((p - *x).norm() < 0.08) return std::nullopt;
        if (x->cwiseAbs().maxCoeff() > 8.0) return std::nullopt;
        return std::vector<std::string>{s.a, s.b, t.a, t.b};
    }

    if (relation == "intersect_lc") {
        if (scene.circles.empty() || scene.segments.empty()) return std::nullopt;
        auto seg = *pick_segment(scene, rng);
        const auto& circ = scene.circles[rng.index(scene.circles.size())];
        const std::string& on = circ.through[rng.index(circ.through.size())];
        if (!distinct({seg.a, seg.b, circ.center, on})) return std::nullopt;
        auto roots = line_circle_intersections(pts(seg.a), pts(seg.b),
                                               pts(circ.center), circ.radius);
        if (roots.size() < 2) return std::nullopt;
        return std::vector<std::string>{seg.a, seg.b, circ.center, on};
    }

    if (relation == "eqdistance") {
        if (scene.points.size() < 3) return std::nullopt;
        std::string a = pick_point(scene, rng);
        auto seg = pick_segment(scene, rng);
        if (!seg || !distinct({a, seg->a, seg->b})) return std::nullopt;
        double len = (pts(seg->a) - pts(seg->b)).norm();
        if (len < 0.3 || len > 2.5) return std::nullopt;
        return std::vector<std::string>{a, seg->a, seg->b};
    }

    if (relation == "parallelogram") {
        if (scene.points.size() < 3) return std::nullopt;
        std::string a = pick_point(scene, rng);
        std::string b = pick_point(scene, rng);
        std::string c = pick_point(scene, rng);
        if (!distinct({a, b, c})) return std::nullopt;
        if (point_line_distance(pts(c), pts(a), pts(b)) < 0.2) return std::nullopt;
        return std::vector<std::string>{a, b, c};
    }

    return std::nullopt;
}

}  // namespace

SampledScene generate_scene(Difficulty difficulty, std::uint64_t seed,
                            const ConstructionLimits& limits) {
    const auto& registry = RelationRegistry::builtin();
    auto [lo, hi] = clause_range(difficulty);
    const WeightedPick openers = opener_menu();
    const WeightedPick extenders = extender_menu();

    for (int retry = 0; retry < limits.max_scene_retries; ++retry) {
        std::uint64_t attempt_seed = mix64(seed, 0xA77E0000ull + retry);
        Rng plan_rng(mix64(attempt_seed, 0xC0));

        int target = plan_rng.range(lo, hi);
        Scene scene;
        scene.seed = attempt_seed;
        ClauseList program;
        // Deterministic relations at identical args rebuild the same point,
        // which the spacing check then rejects; skip them upfront.
        std::set<std::string> used_deterministic;

        bool attempt_ok = true;
        for (int slot = 0; slot < target && attempt_ok; ++slot) {
            bool placed = false;
            for (int trial = 0; trial < kProposalsPerSlot && !placed; ++trial) {
                const WeightedPick& menu = scene.points.empty() ? openers : extenders;
                std::string relation = menu.pick(plan_rng);
                auto args = propose_args(scene, relation, plan_rng);
                if (!args) continue;

                const RelationDef* def = registry.find(relation);
                Clause clause;
                clause.relation = relation;
                clause.args = *args;
                {
                    Scene ghost = scene;  // fresh names, one per new point
                    for (int k = 0; k < def->new_point_count; ++k) {
                        std::string name = fresh_name(ghost);
                        ghost.add_point(name, Vec2::Zero());
                        clause.new_points.push_back(name);
                    }
                }

                std::string signature = relation;
                for (const auto& a : clause.args) signature += " " + a;
                bool deterministic = relation != "on_circle" &&
                                     relation != "intersect_lc" &&
                                     relation != "eqdistance" &&
                                     def->arg_count > 0;
                if (deterministic && used_deterministic.count(signature)) continue;

                try {
                    Rng clause_rng(mix64(attempt_seed,
                                         static_cast<std::uint64_t>(program.size()) + 1));
                    Scene next = apply_relation(scene, clause, clause_rng, nullptr, limits);
                    scene = std::move(next);
                    program.clauses.push_back(clause);
                    if (deterministic) used_deterministic.insert(signature);
                    placed = true;
                } catch (const DegenerateConstructionError&) {
                } catch (const NumericFailureError&) {
                }
            }
            if (!placed) attempt_ok = false;
        }
        if (!attempt_ok) continue;

        try {
            // Replay through the canonical entry point: same subseed per
            // clause, so coordinates match, and the scale snap + soundness
            // sweep run exactly as they would for a stored program.
            Scene built = construct_scene(program, attempt_seed, nullptr, limits);
            return {std::move(program), std::move(built)};
        } catch (const Error&) {
            continue;
        }
    }
    throw SamplerExhaustedError("no admissible scene after " +
                                std::to_string(limits.max_scene_retries) +
                                " attempts (difficulty " +
                                std::string(difficulty_name(difficulty)) + ")");
}

ClauseList sample_program(Difficulty difficulty, std::uint64_t seed,
                          const ConstructionLimits& limits) {
    return generate_scene(difficulty, seed, limits).program;
}

}  // namespace geogen
