#include "geogen/facts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace geogen {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kGridSnapDeg = 0.5;    // detection window around the 15-degree grid
constexpr double kExactAngleRad = 1e-7;  // emission additionally requires exactness
constexpr double kExactLength = 1e-8;    // 2-decimal label must be exact to be emitted

}  // namespace

// ---- entities ----------------------------------------------------------------

Segment Segment::canonical(std::string x, std::string y) {
    if (y < x) std::swap(x, y);
    return {std::move(x), std::move(y)};
}

std::string Segment::display() const { return display_name(a) + display_name(b); }

std::string Segment::key() const { return a + "-" + b; }

Angle Angle::canonical(std::string v, std::string r1, std::string r2) {
    if (r2 < r1) std::swap(r1, r2);
    return {std::move(v), std::move(r1), std::move(r2)};
}

std::string Angle::display() const {
    return display_name(ray1) + display_name(vertex) + display_name(ray2);
}

std::string Angle::key() const { return ray1 + "-" + vertex + "-" + ray2; }

std::string display_name(const std::string& point) {
    std::string out = point;
    for (char& c : out)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return out;
}

std::string centi_text(std::int64_t centi) {
    std::string sign;
    if (centi < 0) {
        sign = "-";
        centi = -centi;
    }
    std::string frac = std::to_string(centi % 100);
    if (frac.size() < 2) frac.insert(frac.begin(), '0');
    return sign + std::to_string(centi / 100) + "." + frac;
}

std::string SegmentLengthFact::value_text() const { return centi_text(centi); }

std::int64_t parse_centi_text(const std::string& text) {
    const auto dot = text.find('.');
    if (dot == std::string::npos || text.size() - dot - 1 != 2)
        throw IoError("decimal value '" + text + "' is not a 2-decimal number");
    const bool neg = !text.empty() && text[0] == '-';
    const std::int64_t whole = std::stoll(text.substr(0, dot));
    const std::int64_t frac = std::stoll(text.substr(dot + 1));
    const std::int64_t mag = std::llabs(whole) * 100 + frac;
    return neg ? -mag : mag;
}

// ---- tags, keys, ordering ----------------------------------------------------

FactKind fact_kind(const Fact& fact) {
    struct Visitor {
        FactKind operator()(const PresentFact&) const { return FactKind::PointPresent; }
        FactKind operator()(const SegmentLengthFact&) const { return FactKind::SegmentLength; }
        FactKind operator()(const SegmentEqFact&) const { return FactKind::SegmentEq; }
        FactKind operator()(const AngleValueFact&) const { return FactKind::AngleValue; }
        FactKind operator()(const RightAngleFact&) const { return FactKind::RightAngle; }
        FactKind operator()(const AngleEqFact&) const { return FactKind::AngleEq; }
        FactKind operator()(const ParallelFact&) const { return FactKind::Parallel; }
        FactKind operator()(const CollinearFact&) const { return FactKind::Collinear; }
        FactKind operator()(const OnCircleFact&) const { return FactKind::OnCircle; }
    };
    return std::visit(Visitor{}, fact);
}

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

template <typename T>
std::string join_keys(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += xs[i].key();
    }
    return out;
}

}  // namespace

std::string fact_tag(const Fact& fact) {
    struct Visitor {
        std::string operator()(const PresentFact& f) const {
            return std::string("PointPresent@") + join(f.points, "-");
        }
        std::string operator()(const SegmentLengthFact& f) const {
            return "SegmentLength@" + f.segment.key() + ":" + f.value_text();
        }
        std::string operator()(const SegmentEqFact& f) const {
            return "SegmentEq#" + std::to_string(f.class_index);
        }
        std::string operator()(const AngleValueFact& f) const {
            return "AngleValue@" + f.angle.key() + ":" + std::to_string(f.degrees);
        }
        std::string operator()(const RightAngleFact& f) const {
            return "RightAngle@" + f.angle.key();
        }
        std::string operator()(const AngleEqFact& f) const {
            return "AngleEq#" + std::to_string(f.class_index);
        }
        std::string operator()(const ParallelFact& f) const {
            return "Parallel#" + std::to_string(f.class_index);
        }
        std::string operator()(const CollinearFact& f) const {
            return "Collinear@" + join(f.points, "-");
        }
        std::string operator()(const OnCircleFact& f) const {
            return "OnCircle@" + f.center + ":" + join(f.points, "-");
        }
    };
    return std::visit(Visitor{}, fact);
}

std::string fact_key(const Fact& fact) {
    if (const auto* f = std::get_if<SegmentEqFact>(&fact))
        return fact_tag(fact) + "{" + join_keys(f->members) + "}";
    if (const auto* f = std::get_if<AngleEqFact>(&fact))
        return fact_tag(fact) + "{" + join_keys(f->members) + "}";
    if (const auto* f = std::get_if<ParallelFact>(&fact))
        return fact_tag(fact) + "{" + join_keys(f->lines) + "}";
    return fact_tag(fact);
}

namespace {

int kind_rank(FactKind kind) { return static_cast<int>(kind); }

}  // namespace

bool fact_less(const Fact& lhs, const Fact& rhs) {
    const int lr = kind_rank(fact_kind(lhs)), rr = kind_rank(fact_kind(rhs));
    if (lr != rr) return lr < rr;
    return fact_key(lhs) < fact_key(rhs);
}

bool fact_sets_equal(FactSet a, FactSet b) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end(), fact_less);
    std::sort(b.begin(), b.end(), fact_less);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (fact_key(a[i]) != fact_key(b[i])) return false;
    return true;
}

// ---- JSON --------------------------------------------------------------------

namespace {

ordered_json segment_json(const Segment& s) { return ordered_json::array({s.a, s.b}); }

ordered_json angle_json(const Angle& a) {
    return ordered_json::array({a.ray1, a.vertex, a.ray2});
}

Segment segment_from(const ordered_json& j) {
    return Segment::canonical(j.at(0).get<std::string>(), j.at(1).get<std::string>());
}

Angle angle_from(const ordered_json& j) {
    return Angle::canonical(j.at(1).get<std::string>(), j.at(0).get<std::string>(),
                            j.at(2).get<std::string>());
}

std::int64_t parse_centi(const std::string& text) { return parse_centi_text(text); }

ordered_json fact_json(const Fact& fact) {
    ordered_json j;
    j["kind"] = kind_name(fact_kind(fact));
    struct Visitor {
        ordered_json& j;
        void operator()(const PresentFact& f) const { j["points"] = f.points; }
        void operator()(const SegmentLengthFact& f) const {
            j["segment"] = segment_json(f.segment);
            j["value"] = f.value_text();
        }
        void operator()(const SegmentEqFact& f) const {
            j["index"] = f.class_index;
            auto arr = ordered_json::array();
            for (const auto& m : f.members) arr.push_back(segment_json(m));
            j["members"] = std::move(arr);
        }
        void operator()(const AngleValueFact& f) const {
            j["angle"] = angle_json(f.angle);
            j["degrees"] = f.degrees;
        }
        void operator()(const RightAngleFact& f) const { j["angle"] = angle_json(f.angle); }
        void operator()(const AngleEqFact& f) const {
            j["index"] = f.class_index;
            auto arr = ordered_json::array();
            for (const auto& m : f.members) arr.push_back(angle_json(m));
            j["members"] = std::move(arr);
        }
        void operator()(const ParallelFact& f) const {
            j["index"] = f.class_index;
            auto arr = ordered_json::array();
            for (const auto& m : f.lines) arr.push_back(segment_json(m));
            j["lines"] = std::move(arr);
        }
        void operator()(const CollinearFact& f) const { j["points"] = f.points; }
        void operator()(const OnCircleFact& f) const {
            j["center"] = f.center;
            j["points"] = f.points;
        }
    };
    std::visit(Visitor{j}, fact);
    return j;
}

Fact fact_from_json(const ordered_json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "PointPresent") return PresentFact{j.at("points").get<std::vector<std::string>>()};
    if (kind == "SegmentLength")
        return SegmentLengthFact{segment_from(j.at("segment")),
                                 parse_centi(j.at("value").get<std::string>())};
    if (kind == "SegmentEq") {
        SegmentEqFact f;
        f.class_index = j.at("index").get<int>();
        for (const auto& m : j.at("members")) f.members.push_back(segment_from(m));
        return f;
    }
    if (kind == "AngleValue")
        return AngleValueFact{angle_from(j.at("angle")), j.at("degrees").get<int>()};
    if (kind == "RightAngle") return RightAngleFact{angle_from(j.at("angle"))};
    if (kind == "AngleEq") {
        AngleEqFact f;
        f.class_index = j.at("index").get<int>();
        for (const auto& m : j.at("members")) f.members.push_back(angle_from(m));
        return f;
    }
    if (kind == "Parallel") {
        ParallelFact f;
        f.class_index = j.at("index").get<int>();
        for (const auto& m : j.at("lines")) f.lines.push_back(segment_from(m));
        return f;
    }
    if (kind == "Collinear") return CollinearFact{j.at("points").get<std::vector<std::string>>()};
    if (kind == "OnCircle")
        return OnCircleFact{j.at("center").get<std::string>(),
                            j.at("points").get<std::vector<std::string>>()};
    throw IoError("unknown fact kind '" + kind + "'");
}

}  // namespace

std::string facts_to_json(const FactSet& facts) {
    auto arr = ordered_json::array();
    for (const auto& f : facts) arr.push_back(fact_json(f));
    return arr.dump();
}

FactSet facts_from_json(const std::string& json_text) {
    ordered_json arr;
    try {
        arr = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw IoError(std::string("facts are not valid JSON: ") + e.what());
    }
    FactSet out;
    for (const auto& j : arr) out.push_back(fact_from_json(j));
    return out;
}

// ---- per-clause geometric effects ---------------------------------------------

namespace {

// orders the named points along their common line; orientation is flipped if
// needed so the first name sorts before the last
std::vector<std::string> order_collinear(const Scene& scene, std::vector<std::string> names) {
    const Vec2 ref = scene.at(names[0]);
    Vec2 dir(0, 0);
    double best = -1.0;
    for (const auto& n : names) {
        const Vec2 d = scene.at(n) - ref;
        if (d.norm() > best) {
            best = d.norm();
            dir = d;
        }
    }
    if (dir.norm() > 0) dir.normalize();
    std::stable_sort(names.begin(), names.end(), [&](const std::string& x, const std::string& y) {
        return (scene.at(x) - ref).dot(dir) < (scene.at(y) - ref).dot(dir);
    });
    if (names.front() > names.back()) std::reverse(names.begin(), names.end());
    return names;
}

// the endpoint of (a,b) farther from v; ties break to the smaller name
std::string far_endpoint(const Scene& scene, const std::string& v, const std::string& a,
                         const std::string& b) {
    const double da = (scene.at(a) - scene.at(v)).norm();
    const double db = (scene.at(b) - scene.at(v)).norm();
    if (std::abs(da - db) < 1e-12) return std::min(a, b);
    return da > db ? a : b;
}

void draw(ClauseEffects& fx, const std::string& a, const std::string& b) {
    fx.drawn.push_back({std::min(a, b), std::max(a, b)});
}

}  // namespace

ClauseEffects clause_effects(const Scene& scene, const Clause& clause) {
    ClauseEffects fx;
    const auto& np = clause.new_points;
    const auto& args = clause.args;
    const std::string& rel = clause.relation;

    auto seg = [](const std::string& x, const std::string& y) { return Segment::canonical(x, y); };
    auto ang = [](const std::string& v, const std::string& r1, const std::string& r2) {
        return Angle::canonical(v, r1, r2);
    };

    if (rel == "free") {
        // presence handled by the uncovered-point rule
    } else if (rel == "segment") {
        draw(fx, np[0], np[1]);
    } else if (rel == "triangle" || rel == "iso_triangle" || rel == "equilateral") {
        const std::string &a = np[0], &b = np[1], &c = np[2];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, c, a);
        if (rel == "iso_triangle") fx.equal_segments.push_back({seg(a, b), seg(a, c)});
        if (rel == "equilateral") fx.equal_segments.push_back({seg(a, b), seg(b, c), seg(c, a)});
        fx.measured_candidates = {ang(a, b, c), ang(b, a, c), ang(c, a, b)};
    } else if (rel == "square") {
        const std::string &a = np[0], &b = np[1], &c = np[2], &d = np[3];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, c, d);
        draw(fx, d, a);
        fx.equal_segments.push_back({seg(a, b), seg(b, c), seg(c, d), seg(d, a)});
        fx.right_angles = {ang(a, d, b), ang(b, a, c), ang(c, b, d), ang(d, c, a)};
    } else if (rel == "parallelogram") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, c, x);
        draw(fx, x, a);
        fx.equal_segments.push_back({seg(a, b), seg(c, x)});
        fx.equal_segments.push_back({seg(b, c), seg(x, a)});
        fx.parallel_lines.push_back({seg(a, b), seg(c, x)});
        fx.parallel_lines.push_back({seg(b, c), seg(x, a)});
        fx.measured_candidates = {ang(a, b, x), ang(b, a, c), ang(c, b, x), ang(x, a, c)};
    } else if (rel == "trapezoid") {
        const std::string &a = np[0], &b = np[1], &c = np[2], &d = np[3];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, c, d);
        draw(fx, d, a);
        fx.parallel_lines.push_back({seg(a, b), seg(c, d)});
        fx.measured_candidates = {ang(a, d, b), ang(b, a, c), ang(c, b, d), ang(d, c, a)};
    } else if (rel == "midpoint") {
        const std::string &m = np[0], &a = args[0], &b = args[1];
        fx.drawn.push_back({std::min(a, b), std::max(a, b)});
        fx.equal_segments.push_back({seg(a, m), seg(m, b)});
    } else if (rel == "circumcenter") {
        const std::string &o = np[0], &a = args[0];
        fx.circles.push_back({o, a, {args[0], args[1], args[2]}});
    } else if (rel == "incenter") {
        const std::string &i = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, c, a);
        draw(fx, i, a);
        draw(fx, i, b);
        draw(fx, i, c);
        fx.equal_angles.push_back({ang(a, b, i), ang(a, c, i)});
        fx.equal_angles.push_back({ang(b, a, i), ang(b, c, i)});
        fx.equal_angles.push_back({ang(c, a, i), ang(c, b, i)});
    } else if (rel == "centroid" || rel == "orthocenter") {
        const std::string &g = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, c, a);
        draw(fx, g, a);
        draw(fx, g, b);
        draw(fx, g, c);
    } else if (rel == "foot") {
        const std::string &f = np[0], &c = args[0], &a = args[1], &b = args[2];
        fx.drawn.push_back({std::min(a, b), std::max(a, b)});
        draw(fx, c, f);
        fx.right_angles.push_back(ang(f, c, far_endpoint(scene, f, a, b)));
        fx.collinear.push_back({order_collinear(scene, {a, b, f})});
    } else if (rel == "parallel_through") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, b, c);
        draw(fx, a, x);
        fx.parallel_lines.push_back({seg(a, x), seg(b, c)});
    } else if (rel == "perp_through") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, a, b);
        draw(fx, c, x);
        fx.right_angles.push_back(ang(c, x, far_endpoint(scene, c, a, b)));
    } else if (rel == "angle_bisector") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, b, a);
        draw(fx, b, c);
        draw(fx, b, x);
        fx.equal_angles.push_back({ang(b, a, x), ang(b, c, x)});
    } else if (rel == "angle_mirror") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, a, b);
        draw(fx, b, c);
        draw(fx, b, x);
        fx.equal_angles.push_back({ang(b, a, c), ang(b, a, x)});
    } else if (rel == "reflect_line") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, b, c);
        draw(fx, b, a);
        draw(fx, b, x);
        draw(fx, c, a);
        draw(fx, c, x);
        fx.equal_segments.push_back({seg(a, b), seg(b, x)});
        fx.equal_segments.push_back({seg(a, c), seg(c, x)});
    } else if (rel == "reflect_point") {
        const std::string &x = np[0], &c = args[0], &m = args[1];
        fx.equal_segments.push_back({seg(c, m), seg(m, x)});
        fx.collinear.push_back({order_collinear(scene, {c, m, x})});
    } else if (rel == "on_circle") {
        const std::string &x = np[0], &o = args[0], &a = args[1];
        fx.circles.push_back({o, a, {a, x}});
    } else if (rel == "intersect_ll") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2], &d = args[3];
        fx.drawn.push_back({std::min(a, b), std::max(a, b)});
        fx.drawn.push_back({std::min(c, d), std::max(c, d)});
        fx.collinear.push_back({order_collinear(scene, {a, b, x})});
        fx.collinear.push_back({order_collinear(scene, {c, d, x})});
    } else if (rel == "intersect_lc") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &o = args[2], &c = args[3];
        fx.drawn.push_back({std::min(a, b), std::max(a, b)});
        fx.circles.push_back({o, c, {c, x}});
        fx.collinear.push_back({order_collinear(scene, {a, b, x})});
    } else if (rel == "eqdistance") {
        const std::string &x = np[0], &a = args[0], &b = args[1], &c = args[2];
        draw(fx, b, c);
        draw(fx, a, x);
        fx.equal_segments.push_back({seg(a, x), seg(b, c)});
    } else {
        throw ConfigError("no effects defined for relation '" + rel + "'");
    }
    return fx;
}

void rebuild_entities(Scene& scene) {
    scene.segments.clear();
    scene.circles.clear();
    for (const auto& clause : scene.history.clauses) {
        ClauseEffects fx = clause_effects(scene, clause);
        for (const auto& s : fx.drawn) scene.ensure_segment(s.a, s.b);
        for (const auto& c : fx.circles) {
            const double r = (scene.at(c.through) - scene.at(c.center)).norm();
            for (const auto& m : c.members) scene.add_to_circle(c.center, r, m);
        }
    }
}

// ---- extraction ----------------------------------------------------------------

namespace {

template <typename T>
class Grouper {
  public:
    void add_group(const std::vector<T>& items) {
        int first = -1;
        for (const auto& item : items) {
            const int id = intern(item);
            if (first < 0)
                first = id;
            else
                unite(first, id);
        }
    }

    std::vector<std::vector<T>> groups() {
        std::map<int, std::vector<T>> by_root;
        for (std::size_t i = 0; i < items_.size(); ++i)
            by_root[find(static_cast<int>(i))].push_back(items_[i]);
        std::vector<std::vector<T>> out;
        for (auto& [root, members] : by_root) {
            std::sort(members.begin(), members.end());
            members.erase(std::unique(members.begin(), members.end()), members.end());
            if (members.size() >= 2) out.push_back(std::move(members));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

  private:
    int intern(const T& item) {
        auto it = ids_.find(item);
        if (it != ids_.end()) return it->second;
        const int id = static_cast<int>(items_.size());
        ids_.emplace(item, id);
        items_.push_back(item);
        parent_.push_back(id);
        return id;
    }

    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }

    void unite(int a, int b) { parent_[find(a)] = find(b); }

    std::map<T, int> ids_;
    std::vector<T> items_;
    std::vector<int> parent_;
};

double measure(const Scene& scene, const Angle& a) {
    return angle_at(scene.at(a.vertex), scene.at(a.ray1), scene.at(a.ray2));
}

struct CollectNames {
    std::set<std::string>& out;
    void operator()(const PresentFact& f) const { out.insert(f.points.begin(), f.points.end()); }
    void operator()(const SegmentLengthFact& f) const {
        out.insert(f.segment.a);
        out.insert(f.segment.b);
    }
    void operator()(const SegmentEqFact& f) const {
        for (const auto& m : f.members) {
            out.insert(m.a);
            out.insert(m.b);
        }
    }
    void operator()(const AngleValueFact& f) const {
        out.insert({f.angle.vertex, f.angle.ray1, f.angle.ray2});
    }
    void operator()(const RightAngleFact& f) const {
        out.insert({f.angle.vertex, f.angle.ray1, f.angle.ray2});
    }
    void operator()(const AngleEqFact& f) const {
        for (const auto& m : f.members) out.insert({m.vertex, m.ray1, m.ray2});
    }
    void operator()(const ParallelFact& f) const {
        for (const auto& m : f.lines) {
            out.insert(m.a);
            out.insert(m.b);
        }
    }
    void operator()(const CollinearFact& f) const { out.insert(f.points.begin(), f.points.end()); }
    void operator()(const OnCircleFact& f) const {
        out.insert(f.center);
        out.insert(f.points.begin(), f.points.end());
    }
};

}  // namespace

std::vector<std::string> fact_point_names(const Fact& fact) {
    std::set<std::string> names;
    std::visit(CollectNames{names}, fact);
    return {names.begin(), names.end()};
}

FactSet extract_facts(const Scene& scene) {
    Grouper<Segment> seg_groups;
    Grouper<Angle> ang_groups;
    Grouper<Segment> par_groups;
    std::map<std::string, Angle> right_angles;           // key -> angle
    std::map<std::string, CollinearFact> collinear;      // key -> fact
    std::vector<DrawnSegment> drawn;
    std::vector<Angle> candidates;
    std::set<std::string> candidate_keys;

    for (const auto& clause : scene.history.clauses) {
        ClauseEffects fx = clause_effects(scene, clause);
        for (const auto& g : fx.equal_segments) seg_groups.add_group(g);
        for (const auto& g : fx.equal_angles) ang_groups.add_group(g);
        for (const auto& g : fx.parallel_lines) par_groups.add_group(g);
        for (const auto& a : fx.right_angles) right_angles.emplace(a.key(), a);
        for (const auto& c : fx.collinear) collinear.emplace(join(c.points, "-"), c);
        for (const auto& s : fx.drawn)
            if (std::find(drawn.begin(), drawn.end(), s) == drawn.end()) drawn.push_back(s);
        for (const auto& a : fx.measured_candidates)
            if (candidate_keys.insert(a.key()).second) candidates.push_back(a);
    }

    const auto angle_classes = ang_groups.groups();
    std::set<std::string> angle_eq_members;
    for (const auto& cls : angle_classes)
        for (const auto& a : cls) angle_eq_members.insert(a.key());

    // measured corners: annotate only exact multiples of 15 degrees in
    // [15, 165]; exact right angles become square markers instead of labels
    std::vector<AngleValueFact> angle_values;
    for (const auto& a : candidates) {
        if (right_angles.count(a.key())) continue;
        const double rad = measure(scene, a);
        const double deg = deg_of(rad);
        const int k = static_cast<int>(std::lround(deg / 15.0));
        if (k < 1 || k > 11) continue;
        if (std::abs(deg - 15.0 * k) > kGridSnapDeg) continue;
        if (std::abs(rad - rad_of(15.0 * k)) > kExactAngleRad) continue;
        if (15 * k == 90) {
            right_angles.emplace(a.key(), a);
        } else if (!angle_eq_members.count(a.key())) {
            angle_values.push_back({a, 15 * k});
        }
    }

    FactSet facts;

    // base segment presence + exact measured lengths
    std::vector<DrawnSegment> sorted_drawn = drawn;
    std::sort(sorted_drawn.begin(), sorted_drawn.end(),
              [](const DrawnSegment& x, const DrawnSegment& y) {
                  return std::tie(x.a, x.b) < std::tie(y.a, y.b);
              });
    for (const auto& s : sorted_drawn) {
        facts.push_back(PresentFact{{s.a, s.b}});
        const double u = (scene.at(s.b) - scene.at(s.a)).norm() * scene.length_scale;
        const std::int64_t centi = std::llround(u * 100.0);
        if (centi >= 1 && std::abs(u - static_cast<double>(centi) / 100.0) < kExactLength)
            facts.push_back(SegmentLengthFact{Segment::canonical(s.a, s.b), centi});
    }

    int index = 0;
    for (const auto& cls : seg_groups.groups()) facts.push_back(SegmentEqFact{++index, cls});
    index = 0;
    for (const auto& cls : angle_classes) facts.push_back(AngleEqFact{++index, cls});
    index = 0;
    for (const auto& cls : par_groups.groups()) facts.push_back(ParallelFact{++index, cls});

    for (const auto& av : angle_values) facts.push_back(av);
    for (const auto& [key, a] : right_angles) facts.push_back(RightAngleFact{a});
    for (const auto& [key, c] : collinear) facts.push_back(c);

    for (const auto& circle : scene.circles) {
        std::vector<std::string> members = circle.through;
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        facts.push_back(OnCircleFact{circle.center, std::move(members)});
    }

    // points not touched by any fact still need a presence sentence/marker
    std::set<std::string> covered;
    for (const auto& fact : facts)
        for (const auto& name : fact_point_names(fact)) covered.insert(name);
    for (const auto& [name, xy] : scene.points)
        if (!covered.count(name)) facts.push_back(PresentFact{{name}});

    std::sort(facts.begin(), facts.end(), fact_less);
    return facts;
}

// ---- residuals -------------------------------------------------------------------

double residual(const Scene& scene, const Fact& fact) {
    struct Visitor {
        const Scene& scene;

        double len(const Segment& s) const { return (scene.at(s.b) - scene.at(s.a)).norm(); }

        double operator()(const PresentFact& f) const {
            for (const auto& p : f.points) scene.at(p);
            return 0.0;
        }
        double operator()(const SegmentLengthFact& f) const {
            return std::abs(len(f.segment) * scene.length_scale - f.value());
        }
        double operator()(const SegmentEqFact& f) const {
            double worst = 0.0;
            for (std::size_t i = 0; i < f.members.size(); ++i)
                for (std::size_t j = i + 1; j < f.members.size(); ++j)
                    worst = std::max(worst, std::abs(len(f.members[i]) - len(f.members[j])));
            return worst;
        }
        double operator()(const AngleValueFact& f) const {
            return std::abs(measure(scene, f.angle) - rad_of(f.degrees));
        }
        double operator()(const RightAngleFact& f) const {
            const Vec2 u = (scene.at(f.angle.ray1) - scene.at(f.angle.vertex)).normalized();
            const Vec2 v = (scene.at(f.angle.ray2) - scene.at(f.angle.vertex)).normalized();
            return std::abs(u.dot(v));
        }
        double operator()(const AngleEqFact& f) const {
            double worst = 0.0;
            std::vector<double> vals;
            for (const auto& m : f.members) vals.push_back(measure(scene, m));
            for (std::size_t i = 0; i < vals.size(); ++i)
                for (std::size_t j = i + 1; j < vals.size(); ++j)
                    worst = std::max(worst, std::abs(vals[i] - vals[j]));
            return worst;
        }
        double operator()(const ParallelFact& f) const {
            double worst = 0.0;
            std::vector<Vec2> dirs;
            for (const auto& m : f.lines)
                dirs.push_back((scene.at(m.b) - scene.at(m.a)).normalized());
            for (std::size_t i = 0; i < dirs.size(); ++i)
                for (std::size_t j = i + 1; j < dirs.size(); ++j)
                    worst = std::max(worst, std::abs(cross2(dirs[i], dirs[j])));
            return worst;
        }
        double operator()(const CollinearFact& f) const {
            const Vec2 a = scene.at(f.points.front());
            const Vec2 b = scene.at(f.points.back());
            double worst = 0.0;
            for (const auto& p : f.points)
                worst = std::max(worst, point_line_distance(scene.at(p), a, b));
            return worst;
        }
        double operator()(const OnCircleFact& f) const {
            const Vec2 c = scene.at(f.center);
            double mean = 0.0;
            for (const auto& p : f.points) mean += (scene.at(p) - c).norm();
            mean /= static_cast<double>(f.points.size());
            double worst = 0.0;
            for (const auto& p : f.points)
                worst = std::max(worst, std::abs((scene.at(p) - c).norm() - mean));
            return worst;
        }
    };
    return std::visit(Visitor{scene}, fact);
}

}  // namespace geogen
