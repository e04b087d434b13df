#include "geogen/relation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace geogen {

const char* kind_name(FactKind kind) {
    switch (kind) {
        case FactKind::PointPresent: return "PointPresent";
        case FactKind::SegmentLength: return "SegmentLength";
        case FactKind::SegmentEq: return "SegmentEq";
        case FactKind::AngleValue: return "AngleValue";
        case FactKind::RightAngle: return "RightAngle";
        case FactKind::AngleEq: return "AngleEq";
        case FactKind::Parallel: return "Parallel";
        case FactKind::Collinear: return "Collinear";
        case FactKind::OnCircle: return "OnCircle";
    }
    return "?";
}

void RelationRegistry::add(RelationDef def) {
    if (def.name.empty()) throw ConfigError("relation name must not be empty");
    if (def.new_point_count < 1) throw ConfigError("relation must introduce at least one point");
    if (def.arg_count < 0) throw ConfigError("negative arg count");
    if (defs_.count(def.name)) throw ConfigError("relation '" + def.name + "' registered twice");
    if (def.dependency_kinds.empty())
        def.dependency_kinds.assign(static_cast<std::size_t>(def.arg_count),
                                    DependencyKind::Point);
    if (static_cast<int>(def.dependency_kinds.size()) != def.arg_count)
        throw ConfigError("dependency kinds do not match arg count for '" + def.name + "'");
    if (def.construction_id.empty()) def.construction_id = def.name;
    defs_.emplace(def.name, std::move(def));
}

const RelationDef* RelationRegistry::find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

const RelationDef& RelationRegistry::lookup(const std::string& name) const {
    const RelationDef* def = find(name);
    if (!def) throw UnknownRelationError(name);
    return *def;
}

std::vector<std::string> RelationRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& [name, def] : defs_) out.push_back(name);
    return out;
}

namespace {

RelationRegistry make_builtin() {
    RelationRegistry reg;
    using FK = FactKind;
    auto def = [&](const std::string& name, int news, int args, std::vector<FK> kinds) {
        RelationDef d;
        d.name = name;
        d.new_point_count = news;
        d.arg_count = args;
        d.fact_templates = std::move(kinds);
        reg.add(std::move(d));
    };

    def("free", 1, 0, {FK::PointPresent});
    def("segment", 2, 0, {FK::PointPresent, FK::SegmentLength});
    def("triangle", 3, 0, {FK::PointPresent, FK::SegmentLength, FK::AngleValue, FK::RightAngle});
    def("iso_triangle", 3, 0,
        {FK::PointPresent, FK::SegmentLength, FK::SegmentEq, FK::AngleValue, FK::RightAngle});
    def("equilateral", 3, 0, {FK::PointPresent, FK::SegmentLength, FK::SegmentEq, FK::AngleValue});
    def("square", 4, 0, {FK::PointPresent, FK::SegmentLength, FK::SegmentEq, FK::RightAngle});
    def("parallelogram", 1, 3,
        {FK::PointPresent, FK::SegmentLength, FK::SegmentEq, FK::Parallel, FK::AngleValue,
         FK::RightAngle});
    def("trapezoid", 4, 0,
        {FK::PointPresent, FK::SegmentLength, FK::Parallel, FK::AngleValue, FK::RightAngle});
    def("midpoint", 1, 2, {FK::PointPresent, FK::SegmentLength, FK::SegmentEq});
    def("circumcenter", 1, 3, {FK::PointPresent, FK::OnCircle});
    def("incenter", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::AngleEq});
    def("centroid", 1, 3, {FK::PointPresent, FK::SegmentLength});
    def("orthocenter", 1, 3, {FK::PointPresent, FK::SegmentLength});
    def("foot", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::RightAngle, FK::Collinear});
    def("parallel_through", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::Parallel});
    def("perp_through", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::RightAngle});
    def("angle_bisector", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::AngleEq});
    def("angle_mirror", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::AngleEq});
    def("reflect_line", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::SegmentEq});
    def("reflect_point", 1, 2, {FK::PointPresent, FK::SegmentEq, FK::Collinear});
    def("on_circle", 1, 2, {FK::PointPresent, FK::OnCircle});
    def("intersect_ll", 1, 4, {FK::PointPresent, FK::SegmentLength, FK::Collinear});
    def("intersect_lc", 1, 4, {FK::PointPresent, FK::SegmentLength, FK::Collinear, FK::OnCircle});
    def("eqdistance", 1, 3, {FK::PointPresent, FK::SegmentLength, FK::SegmentEq});
    return reg;
}

}  // namespace

const RelationRegistry& RelationRegistry::builtin() {
    static const RelationRegistry reg = make_builtin();
    return reg;
}

std::string Clause::to_string() const {
    std::ostringstream out;
    out << relation;
    for (const auto& p : new_points) out << ' ' << p;
    for (const auto& p : args) out << ' ' << p;
    return out.str();
}

std::string ClauseList::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i) out << '\n';
        out << clauses[i].to_string();
    }
    return out.str();
}

bool is_valid_point_name(const std::string& name) {
    if (name.empty()) return false;
    if (name[0] < 'a' || name[0] > 'z') return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    });
}

namespace {

bool is_valid_relation_name(const std::string& name) {
    if (name.empty()) return false;
    if (name[0] < 'a' || name[0] > 'z') return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

struct Token {
    std::string text;
    std::size_t offset;
};

// Splits the program text into clause token groups. '#' comments run to end
// of line; ';' and newline both terminate a clause.
std::vector<std::vector<Token>> tokenize_clauses(const std::string& text) {
    std::vector<std::vector<Token>> groups(1);
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '#') {
            while (i < n && text[i] != '\n') ++i;
        } else if (c == '\n' || c == ';') {
            if (!groups.back().empty()) groups.emplace_back();
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            const std::size_t start = i;
            while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ';' &&
                   text[i] != '#')
                ++i;
            groups.back().push_back({text.substr(start, i - start), start});
        }
    }
    if (groups.back().empty()) groups.pop_back();
    return groups;
}

void check_structure(const Clause& clause, const RelationRegistry& registry,
                     const std::set<std::string>& known, ValidationReport& report) {
    using Kind = ValidationIssue::Kind;
    const RelationDef* def = registry.find(clause.relation);
    if (!def) {
        report.issues.push_back({Kind::UnknownRelation, clause.relation});
        return;
    }
    const int got = static_cast<int>(clause.new_points.size() + clause.args.size());
    if (got != def->arity()) {
        report.issues.push_back({Kind::ArityMismatch, clause.relation});
        return;
    }
    std::set<std::string> introduced;
    for (const auto& p : clause.new_points) {
        if (!is_valid_point_name(p)) {
            report.issues.push_back({Kind::BadName, p});
        } else if (known.count(p) || !introduced.insert(p).second) {
            report.issues.push_back({Kind::DuplicatePoint, p});
        }
    }
    for (const auto& p : clause.args) {
        if (!is_valid_point_name(p)) {
            report.issues.push_back({Kind::BadName, p});
        } else if (introduced.count(p)) {
            report.issues.push_back({Kind::DuplicatePoint, p});
        } else if (!known.count(p)) {
            report.issues.push_back({Kind::UseBeforeDefinition, p});
        }
    }
}

}  // namespace

ValidationReport validate_clause(const Clause& clause, const RelationRegistry& registry,
                                 const std::set<std::string>& known_points) {
    ValidationReport report;
    check_structure(clause, registry, known_points, report);
    return report;
}

ValidationReport validate_program(const ClauseList& program, const RelationRegistry& registry,
                                  const std::set<std::string>& predefined) {
    ValidationReport report;
    std::set<std::string> known = predefined;
    for (const auto& clause : program.clauses) {
        check_structure(clause, registry, known, report);
        for (const auto& p : clause.new_points) known.insert(p);
    }
    return report;
}

ClauseList parse_program(const std::string& text, const RelationRegistry& registry,
                         const std::set<std::string>& predefined) {
    ClauseList program;
    std::set<std::string> known = predefined;
    for (const auto& tokens : tokenize_clauses(text)) {
        const Token& head = tokens.front();
        if (!is_valid_relation_name(head.text)) throw SyntaxError(head.offset, "bad relation name");
        const RelationDef& def = registry.lookup(head.text);
        const int got = static_cast<int>(tokens.size()) - 1;
        if (got != def.arity()) throw ArityMismatchError(def.name, got, def.arity());

        Clause clause;
        clause.relation = def.name;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            if (!is_valid_point_name(tokens[t].text))
                throw SyntaxError(tokens[t].offset, "bad point name '" + tokens[t].text + "'");
            if (t <= static_cast<std::size_t>(def.new_point_count))
                clause.new_points.push_back(tokens[t].text);
            else
                clause.args.push_back(tokens[t].text);
        }
        std::set<std::string> introduced;
        for (const auto& p : clause.new_points) {
            if (known.count(p) || !introduced.insert(p).second) throw DuplicatePointError(p);
        }
        for (const auto& p : clause.args) {
            if (introduced.count(p)) throw DuplicatePointError(p);
            if (!known.count(p)) throw UseBeforeDefinitionError(p);
        }
        known.insert(clause.new_points.begin(), clause.new_points.end());
        program.clauses.push_back(std::move(clause));
    }
    return program;
}

std::string print_program(const ClauseList& program) { return program.to_string(); }

}  // namespace geogen
