#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "geogen/errors.hpp"

namespace geogen {

enum class FactKind {
    PointPresent,
    SegmentLength,
    SegmentEq,
    AngleValue,
    RightAngle,
    AngleEq,
    Parallel,
    Collinear,
    OnCircle,
};

const char* kind_name(FactKind kind);

// All clause arguments are previously constructed points.
enum class DependencyKind { Point };

struct RelationDef {
    std::string name;
    int new_point_count = 0;
    int arg_count = 0;
    std::vector<DependencyKind> dependency_kinds;
    // key into the construction procedure table used by the engine
    std::string construction_id;
    // fact kinds this relation can assert
    std::vector<FactKind> fact_templates;

    int arity() const { return new_point_count + arg_count; }
};

struct ParseError : Error {
    using Error::Error;
};

struct SyntaxError : ParseError {
    std::size_t position;
    SyntaxError(std::size_t pos, const std::string& what)
        : ParseError("syntax error at offset " + std::to_string(pos) + ": " + what),
          position(pos) {}
};

struct UnknownRelationError : ParseError {
    std::string relation;
    explicit UnknownRelationError(const std::string& name)
        : ParseError("unknown relation '" + name + "'"), relation(name) {}
};

struct ArityMismatchError : ParseError {
    std::string relation;
    int got, want;
    ArityMismatchError(const std::string& name, int g, int w)
        : ParseError("relation '" + name + "' takes " + std::to_string(w) + " points, got " +
                     std::to_string(g)),
          relation(name),
          got(g),
          want(w) {}
};

struct DuplicatePointError : ParseError {
    std::string point;
    explicit DuplicatePointError(const std::string& name)
        : ParseError("point '" + name + "' introduced twice"), point(name) {}
};

struct UseBeforeDefinitionError : ParseError {
    std::string point;
    explicit UseBeforeDefinitionError(const std::string& name)
        : ParseError("point '" + name + "' used before definition"), point(name) {}
};

class RelationRegistry {
  public:
    void add(RelationDef def);
    const RelationDef* find(const std::string& name) const;
    // throws UnknownRelationError
    const RelationDef& lookup(const std::string& name) const;
    std::vector<std::string> names() const;
    std::size_t size() const { return defs_.size(); }

    // the 24 built-in relations
    static const RelationRegistry& builtin();

  private:
    std::map<std::string, RelationDef> defs_;
};

struct Clause {
    std::string relation;
    std::vector<std::string> new_points;
    std::vector<std::string> args;

    std::string to_string() const;
};

struct ClauseList {
    std::vector<Clause> clauses;

    std::string to_string() const;
    bool empty() const { return clauses.empty(); }
    std::size_t size() const { return clauses.size(); }
};

struct ValidationIssue {
    enum class Kind { UnknownRelation, ArityMismatch, DuplicatePoint, UseBeforeDefinition, BadName };
    Kind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

// [a-z][a-z0-9]*
bool is_valid_point_name(const std::string& name);

// Surface syntax: one clause per line or ';'-separated, '#' starts a comment,
// clause := relation new_points... args...
ClauseList parse_program(const std::string& text,
                         const RelationRegistry& registry = RelationRegistry::builtin(),
                         const std::set<std::string>& predefined = {});

std::string print_program(const ClauseList& program);

ValidationReport validate_clause(const Clause& clause, const RelationRegistry& registry,
                                 const std::set<std::string>& known_points);

ValidationReport validate_program(const ClauseList& program,
                                  const RelationRegistry& registry = RelationRegistry::builtin(),
                                  const std::set<std::string>& predefined = {});

}  // namespace geogen
