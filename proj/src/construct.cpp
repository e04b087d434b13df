#include "geogen/construct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace geogen {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Construction {
    bool randomized = false;
    std::function<std::vector<Vec2>(const Scene&, const Clause&, Rng&)> place;
};

Vec2 free_point(Rng& rng) { return Vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)); }

double pick_sign(Rng& rng) { return rng.chance(0.5) ? 1.0 : -1.0; }

// corner angles in degrees; grid triangles land exactly on multiples of 15
std::pair<double, double> triangle_angles(Rng& rng) {
    if (rng.chance(0.6)) {
        const int ka = rng.range(1, 9);
        const int kb = rng.range(1, std::min(9, 11 - ka));
        return {15.0 * ka, 15.0 * kb};
    }
    const double alpha = rng.uniform(20.0, 80.0);
    const double beta = rng.uniform(20.0, 130.0 - alpha);
    return {alpha, beta};
}

Vec2 third_vertex(const Vec2& a, double base_len, double theta, double alpha_deg,
                  double beta_deg, double sign) {
    const double alpha = rad_of(alpha_deg), beta = rad_of(beta_deg);
    const double t = base_len * std::sin(beta) / std::sin(alpha + beta);
    return a + t * dir_of(theta + sign * alpha);
}

const std::map<std::string, Construction>& construction_table() {
    static const std::map<std::string, Construction> table = [] {
        std::map<std::string, Construction> t;
        auto deg_err = [](const Clause& c, const std::string& why) {
            return DegenerateConstructionError(c.to_string(), why);
        };

        t["free"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                         return std::vector<Vec2>{free_point(rng)};
                     }};

        t["segment"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                            const Vec2 a = free_point(rng);
                            const double theta = rng.uniform(0.0, kTwoPi);
                            const double len = rng.uniform(0.6, 1.6);
                            return std::vector<Vec2>{a, a + len * dir_of(theta)};
                        }};

        t["triangle"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                             const Vec2 a = free_point(rng);
                             const double theta = rng.uniform(0.0, kTwoPi);
                             const double len = rng.uniform(0.9, 1.8);
                             const auto [alpha, beta] = triangle_angles(rng);
                             const double sign = pick_sign(rng);
                             const Vec2 b = a + len * dir_of(theta);
                             const Vec2 c = third_vertex(a, len, theta, alpha, beta, sign);
                             return std::vector<Vec2>{a, b, c};
                         }};

        t["iso_triangle"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                                 const Vec2 a = free_point(rng);
                                 const double theta = rng.uniform(0.0, kTwoPi);
                                 const double apex =
                                     rng.chance(0.7) ? 30.0 * rng.range(1, 5)
                                                     : rng.uniform(25.0, 130.0);
                                 const double len = rng.uniform(0.8, 1.6);
                                 const double half = rad_of(apex) / 2.0;
                                 const Vec2 b = a + len * dir_of(theta - half);
                                 const Vec2 c = a + len * dir_of(theta + half);
                                 return std::vector<Vec2>{a, b, c};
                             }};

        t["equilateral"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                                const Vec2 a = free_point(rng);
                                const double theta = rng.uniform(0.0, kTwoPi);
                                const double side = rng.uniform(0.8, 1.6);
                                const double sign = pick_sign(rng);
                                const Vec2 b = a + side * dir_of(theta);
                                const Vec2 c = a + side * dir_of(theta + sign * rad_of(60.0));
                                return std::vector<Vec2>{a, b, c};
                            }};

        t["square"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                           const Vec2 a = free_point(rng);
                           const double theta = rng.uniform(0.0, kTwoPi);
                           const double side = rng.uniform(0.7, 1.4);
                           const double sign = pick_sign(rng);
                           const Vec2 u = dir_of(theta), v = dir_of(theta + sign * rad_of(90.0));
                           const Vec2 b = a + side * u;
                           return std::vector<Vec2>{a, b, b + side * v, a + side * v};
                       }};

        t["trapezoid"] = {true, [](const Scene&, const Clause&, Rng& rng) {
                              const Vec2 a = free_point(rng);
                              const double theta = rng.uniform(0.0, kTwoPi);
                              const double l1 = rng.uniform(1.0, 1.8);
                              const double l2 = l1 * rng.uniform(0.4, 0.8);
                              const double h = rng.uniform(0.5, 1.0) * pick_sign(rng);
                              const double shift = rng.uniform(-0.25, 0.25);
                              const Vec2 u = dir_of(theta), v = rot90(u);
                              const Vec2 b = a + l1 * u;
                              const Vec2 c = b + shift * u + h * v;
                              return std::vector<Vec2>{a, b, c, c - l2 * u};
                          }};

        t["parallelogram"] = {false, [](const Scene& s, const Clause& c, Rng&) {
                                  const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                             cc = s.at(c.args[2]);
                                  return std::vector<Vec2>{a + cc - b};
                              }};

        t["midpoint"] = {false, [](const Scene& s, const Clause& c, Rng&) {
                             return std::vector<Vec2>{
                                 midpoint_of(s.at(c.args[0]), s.at(c.args[1]))};
                         }};

        t["circumcenter"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                                 auto o = circumcenter_of(s.at(c.args[0]), s.at(c.args[1]),
                                                          s.at(c.args[2]));
                                 if (!o) throw deg_err(c, "collinear points have no circumcenter");
                                 return std::vector<Vec2>{*o};
                             }};

        t["incenter"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                             auto i = incenter_of(s.at(c.args[0]), s.at(c.args[1]),
                                                  s.at(c.args[2]));
                             if (!i) throw deg_err(c, "collinear points have no incenter");
                             return std::vector<Vec2>{*i};
                         }};

        t["centroid"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                             const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                        cc = s.at(c.args[2]);
                             if (std::abs(cross2(b - a, cc - a)) < 1e-9)
                                 throw deg_err(c, "collinear points");
                             return std::vector<Vec2>{(a + b + cc) / 3.0};
                         }};

        t["orthocenter"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                                const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                           cc = s.at(c.args[2]);
                                auto o = circumcenter_of(a, b, cc);
                                if (!o) throw deg_err(c, "collinear points");
                                return std::vector<Vec2>{a + b + cc - 2.0 * *o};
                            }};

        t["foot"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                         const Vec2 p = s.at(c.args[0]), a = s.at(c.args[1]), b = s.at(c.args[2]);
                         if ((b - a).norm() < 1e-9) throw deg_err(c, "zero-length base line");
                         if (point_line_distance(p, a, b) < 1e-9)
                             throw deg_err(c, "point already on the line");
                         return std::vector<Vec2>{foot_of(p, a, b)};
                     }};

        t["parallel_through"] = {true, [deg_err](const Scene& s, const Clause& c, Rng& rng) {
                                     const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                                d = s.at(c.args[2]);
                                     if ((d - b).norm() < 1e-9)
                                         throw deg_err(c, "zero-length direction");
                                     const double tt =
                                         rng.uniform(0.4, 1.1) * pick_sign(rng);
                                     return std::vector<Vec2>{a + tt * (d - b)};
                                 }};

        t["perp_through"] = {true, [deg_err](const Scene& s, const Clause& c, Rng& rng) {
                                 const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                            p = s.at(c.args[2]);
                                 if ((b - a).norm() < 1e-9) throw deg_err(c, "zero-length line");
                                 if (point_line_distance(p, a, b) > 1e-9)
                                     throw deg_err(c, "foot point not on the line");
                                 const double tt = rng.uniform(0.35, 1.0) * (b - a).norm() *
                                                   pick_sign(rng);
                                 return std::vector<Vec2>{
                                     p + tt * rot90((b - a).normalized())};
                             }};

        t["angle_bisector"] = {true, [deg_err](const Scene& s, const Clause& c, Rng& rng) {
                                   const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                              d = s.at(c.args[2]);
                                   const Vec2 u = (a - b), v = (d - b);
                                   if (u.norm() < 1e-9 || v.norm() < 1e-9)
                                       throw deg_err(c, "zero-length ray");
                                   const Vec2 bis = u.normalized() + v.normalized();
                                   if (bis.norm() < 1e-6) throw deg_err(c, "straight angle");
                                   const double tt =
                                       rng.uniform(0.4, 1.2) * 0.5 * (u.norm() + v.norm());
                                   return std::vector<Vec2>{b + tt * bis.normalized()};
                               }};

        t["angle_mirror"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                                 const Vec2 a = s.at(c.args[0]), b = s.at(c.args[1]),
                                            p = s.at(c.args[2]);
                                 if ((b - a).norm() < 1e-9) throw deg_err(c, "zero-length mirror");
                                 if (point_line_distance(p, a, b) < 1e-9)
                                     throw deg_err(c, "point on the mirror line");
                                 return std::vector<Vec2>{reflect_across(p, a, b)};
                             }};

        t["reflect_line"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                                 const Vec2 p = s.at(c.args[0]), a = s.at(c.args[1]),
                                            b = s.at(c.args[2]);
                                 if ((b - a).norm() < 1e-9) throw deg_err(c, "zero-length mirror");
                                 if (point_line_distance(p, a, b) < 1e-9)
                                     throw deg_err(c, "point on the mirror line");
                                 return std::vector<Vec2>{reflect_across(p, a, b)};
                             }};

        t["reflect_point"] = {false, [deg_err](const Scene& s, const Clause& c, Rng&) {
                                  const Vec2 p = s.at(c.args[0]), m = s.at(c.args[1]);
                                  if ((p - m).norm() < 1e-9) throw deg_err(c, "coincident points");
                                  return std::vector<Vec2>{2.0 * m - p};
                              }};

        t["on_circle"] = {true, [deg_err](const Scene& s, const Clause& c, Rng& rng) {
                              const Vec2 o = s.at(c.args[0]), a = s.at(c.args[1]);
                              const double r = (a - o).norm();
                              if (r < 1e-9) throw deg_err(c, "zero radius");
                              return std::vector<Vec2>{o + r * dir_of(rng.uniform(0.0, kTwoPi))};
                          }};

        t["intersect_ll"] = {false, [](const Scene& s, const Clause& c, Rng&) {
                                 auto x = line_intersection(s.at(c.args[0]), s.at(c.args[1]),
                                                            s.at(c.args[2]), s.at(c.args[3]));
                                 if (!x)
                                     throw NumericFailureError(c.to_string(),
                                                               "parallel lines do not intersect");
                                 return std::vector<Vec2>{*x};
                             }};

        t["intersect_lc"] = {true, [](const Scene& s, const Clause& c, Rng& rng) {
                                 const Vec2 o = s.at(c.args[2]);
                                 const double r = (s.at(c.args[3]) - o).norm();
                                 auto roots = line_circle_intersections(s.at(c.args[0]),
                                                                        s.at(c.args[1]), o, r);
                                 if (roots.empty())
                                     throw NumericFailureError(c.to_string(),
                                                               "line misses the circle");
                                 return std::vector<Vec2>{roots[rng.index(roots.size())]};
                             }};

        t["eqdistance"] = {true, [deg_err](const Scene& s, const Clause& c, Rng& rng) {
                               const Vec2 a = s.at(c.args[0]);
                               const double r = (s.at(c.args[2]) - s.at(c.args[1])).norm();
                               if (r < 1e-9) throw deg_err(c, "zero reference length");
                               return std::vector<Vec2>{a + r * dir_of(rng.uniform(0.0, kTwoPi))};
                           }};

        return t;
    }();
    return table;
}

bool check_legibility(const Scene& candidate, const std::vector<DrawnSegment>& fresh,
                      const std::vector<std::string>& new_points,
                      const ConstructionLimits& limits, std::string& why) {
    for (const auto& n : new_points) {
        const Vec2 p = candidate.at(n);
        if (!p.allFinite()) {
            why = "non-finite coordinates";
            return false;
        }
        for (const auto& [name, q] : candidate.points) {
            if (name == n) continue;
            if ((p - q).norm() < limits.min_distance) {
                why = "points '" + n + "' and '" + name + "' too close";
                return false;
            }
        }
    }

    double min_x = std::numeric_limits<double>::max(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    for (const auto& [name, p] : candidate.points) {
        min_x = std::min(min_x, p.x());
        max_x = std::max(max_x, p.x());
        min_y = std::min(min_y, p.y());
        max_y = std::max(max_y, p.y());
    }
    if (max_x - min_x > limits.max_extent || max_y - min_y > limits.max_extent) {
        why = "scene extent too large";
        return false;
    }

    const double min_angle = rad_of(limits.min_angle_deg);
    std::vector<DrawnSegment> all = candidate.segments;
    for (const auto& s : fresh)
        if (std::find(all.begin(), all.end(), s) == all.end()) all.push_back(s);
    for (const auto& s : fresh) {
        for (const auto& o : all) {
            if (s == o) continue;
            std::string v, p, q;
            if (s.a == o.a) v = s.a, p = s.b, q = o.b;
            else if (s.a == o.b) v = s.a, p = s.b, q = o.a;
            else if (s.b == o.a) v = s.b, p = s.a, q = o.b;
            else if (s.b == o.b) v = s.b, p = s.a, q = o.a;
            else continue;
            if (angle_at(candidate.at(v), candidate.at(p), candidate.at(q)) < min_angle) {
                why = "segments meet at a glancing angle at '" + v + "'";
                return false;
            }
        }
    }
    return true;
}

// facts asserted by this clause alone, with placeholder class indices
FactSet clause_facts(const ClauseEffects& fx) {
    FactSet facts;
    for (const auto& g : fx.equal_segments) facts.push_back(SegmentEqFact{0, g});
    for (const auto& g : fx.equal_angles) facts.push_back(AngleEqFact{0, g});
    for (const auto& g : fx.parallel_lines) facts.push_back(ParallelFact{0, g});
    for (const auto& a : fx.right_angles) facts.push_back(RightAngleFact{a});
    for (const auto& c : fx.collinear) facts.push_back(c);
    for (const auto& c : fx.circles) {
        std::vector<std::string> members = c.members;
        std::sort(members.begin(), members.end());
        facts.push_back(OnCircleFact{c.center, std::move(members)});
    }
    return facts;
}

}  // namespace

Scene apply_relation(const Scene& scene, const Clause& clause, Rng& rng,
                     const PointOverrides* overrides, const ConstructionLimits& limits) {
    const auto& table = construction_table();
    auto it = table.find(RelationRegistry::builtin().lookup(clause.relation).construction_id);
    if (it == table.end())
        throw ConfigError("no construction registered for '" + clause.relation + "'");
    const Construction& proc = it->second;

    for (const auto& p : clause.new_points)
        if (scene.has(p)) throw DuplicatePointError(p);

    bool all_forced = overrides != nullptr;
    if (overrides)
        for (const auto& p : clause.new_points)
            if (!overrides->count(p)) all_forced = false;

    const int attempts = (proc.randomized && !all_forced) ? limits.max_attempts : 1;
    std::string why = "no valid placement";
    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::vector<Vec2> coords = proc.place(scene, clause, rng);
        if (coords.size() != clause.new_points.size())
            throw ConfigError("construction for '" + clause.relation +
                              "' returned wrong point count");
        if (overrides) {
            for (std::size_t i = 0; i < clause.new_points.size(); ++i) {
                auto ov = overrides->find(clause.new_points[i]);
                if (ov != overrides->end()) coords[i] = ov->second;
            }
        }

        Scene candidate = scene;
        for (std::size_t i = 0; i < clause.new_points.size(); ++i)
            candidate.add_point(clause.new_points[i], coords[i]);

        const ClauseEffects fx = clause_effects(candidate, clause);
        if (!check_legibility(candidate, fx.drawn, clause.new_points, limits, why)) continue;

        bool sound = true;
        for (const auto& fact : clause_facts(fx)) {
            if (residual(candidate, fact) >= limits.residual_tol) {
                sound = false;
                why = "asserted fact '" + fact_tag(fact) + "' does not hold";
                break;
            }
        }
        if (!sound) continue;

        for (const auto& s : fx.drawn) candidate.ensure_segment(s.a, s.b);
        for (const auto& c : fx.circles) {
            const double r = (candidate.at(c.through) - candidate.at(c.center)).norm();
            for (const auto& m : c.members) candidate.add_to_circle(c.center, r, m);
        }
        candidate.history.clauses.push_back(clause);
        return candidate;
    }
    throw DegenerateConstructionError(clause.to_string(), why);
}

Scene construct_scene(const ClauseList& program, std::uint64_t seed,
                      const PointOverrides* overrides, const ConstructionLimits& limits) {
    const ValidationReport report = validate_program(program);
    if (!report.ok()) {
        const auto& issue = report.issues.front();
        using Kind = ValidationIssue::Kind;
        switch (issue.kind) {
            case Kind::UnknownRelation: throw UnknownRelationError(issue.detail);
            case Kind::ArityMismatch: throw ArityMismatchError(issue.detail, -1, -1);
            case Kind::DuplicatePoint: throw DuplicatePointError(issue.detail);
            case Kind::UseBeforeDefinition: throw UseBeforeDefinitionError(issue.detail);
            case Kind::BadName: throw SyntaxError(0, "bad point name '" + issue.detail + "'");
        }
    }

    Scene scene;
    scene.seed = seed;
    for (std::size_t i = 0; i < program.clauses.size(); ++i) {
        Rng rng(mix64(seed, i + 1));
        scene = apply_relation(scene, program.clauses[i], rng, overrides, limits);
    }

    // Snap the display scale so the first drawn segment carries an exact
    // 2-decimal length; other segments are annotated only if they also land
    // exactly (equal or rationally related segments do).
    Rng scale_rng(mix64(seed, 0x5ca1eULL));
    const double raw = scale_rng.uniform(1.0, 10.0);
    scene.length_scale = raw;
    if (!scene.segments.empty()) {
        const auto& s = scene.segments.front();
        const double len = (scene.at(s.b) - scene.at(s.a)).norm();
        const std::int64_t centi = std::max<std::int64_t>(1, std::llround(len * raw * 100.0));
        scene.length_scale = static_cast<double>(centi) / 100.0 / len;
    }

    for (const auto& fact : extract_facts(scene)) {
        if (residual(scene, fact) >= limits.residual_tol)
            throw DegenerateConstructionError(fact_tag(fact), "extracted fact fails residual");
    }
    return scene;
}

}  // namespace geogen
