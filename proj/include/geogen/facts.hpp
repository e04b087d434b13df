#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "geogen/scene.hpp"

namespace geogen {

// ---- canonical entity names ------------------------------------------------

struct Segment {
    std::string a, b;  // a < b

    static Segment canonical(std::string x, std::string y);
    std::string display() const;  // "AB"
    std::string key() const;      // "a-b"
    auto operator<=>(const Segment&) const = default;
};

struct Angle {
    std::string vertex;
    std::string ray1, ray2;  // ray1 < ray2

    static Angle canonical(std::string v, std::string r1, std::string r2);
    std::string display() const;  // "ABC", vertex in the middle
    std::string key() const;      // "a-b-c", vertex in the middle
    auto operator<=>(const Angle&) const = default;
};

// ---- semantic facts ----------------------------------------------------------
//
// The fact set is the single source of truth shared by the renderer (data-fact
// tags), the captioner (one sentence per fact) and the validator. Class
// indices are dense per kind, assigned by canonical order of the class's
// smallest member.

struct SegmentEqFact {
    int class_index = 0;
    std::vector<Segment> members;
    bool operator==(const SegmentEqFact&) const = default;
};

struct AngleEqFact {
    int class_index = 0;
    std::vector<Angle> members;
    bool operator==(const AngleEqFact&) const = default;
};

struct ParallelFact {
    int class_index = 0;
    std::vector<Segment> lines;
    bool operator==(const ParallelFact&) const = default;
};

struct AngleValueFact {
    Angle angle;
    int degrees = 0;  // multiple of 15 in [15, 165], never 90
    bool operator==(const AngleValueFact&) const = default;
};

struct RightAngleFact {
    Angle angle;
    bool operator==(const RightAngleFact&) const = default;
};

struct CollinearFact {
    std::vector<std::string> points;  // ordered along the line
    bool operator==(const CollinearFact&) const = default;
};

struct OnCircleFact {
    std::string center;
    std::vector<std::string> points;  // sorted
    bool operator==(const OnCircleFact&) const = default;
};

struct SegmentLengthFact {
    Segment segment;
    std::int64_t centi = 0;  // length in hundredths, e.g. 124 displays as 1.24

    double value() const { return static_cast<double>(centi) / 100.0; }
    std::string value_text() const;  // "1.24"
    bool operator==(const SegmentLengthFact&) const = default;
};

// presence of a bare point (1 name) or of a drawn segment (2 names, sorted)
struct PresentFact {
    std::vector<std::string> points;
    bool operator==(const PresentFact&) const = default;
};

using Fact = std::variant<PresentFact, SegmentLengthFact, SegmentEqFact, AngleValueFact,
                          RightAngleFact, AngleEqFact, ParallelFact, CollinearFact, OnCircleFact>;

using FactSet = std::vector<Fact>;

FactKind fact_kind(const Fact& fact);

// public tag grammar: "<Kind>#<class_index>" for equivalence-class kinds,
// "<Kind>@<canonical-args>" for the rest
std::string fact_tag(const Fact& fact);

// full canonical identity (class kinds include members), used for ordering,
// equality and deduplication
std::string fact_key(const Fact& fact);

bool fact_less(const Fact& lhs, const Fact& rhs);
bool fact_sets_equal(FactSet a, FactSet b);

// lossless JSON serialization (strings to keep 2-decimal values exact)
std::string facts_to_json(const FactSet& facts);
FactSet facts_from_json(const std::string& json_text);

// ---- extraction and verification --------------------------------------------

// geometric effects of one clause, before global canonicalization
struct ClauseEffects {
    std::vector<std::vector<Segment>> equal_segments;
    std::vector<std::vector<Angle>> equal_angles;
    std::vector<std::vector<Segment>> parallel_lines;
    std::vector<Angle> right_angles;
    std::vector<CollinearFact> collinear;
    struct Circle {
        std::string center;
        std::string through;  // point defining the radius
        std::vector<std::string> members;
    };
    std::vector<Circle> circles;
    std::vector<DrawnSegment> drawn;         // segments this clause draws
    std::vector<Angle> measured_candidates;  // corners checked for 15-degree values
};

// pure in the scene coordinates; no randomness
ClauseEffects clause_effects(const Scene& scene, const Clause& clause);

// derives every fact implied by the construction history plus measured
// length/angle annotations; deterministic in the scene
FactSet extract_facts(const Scene& scene);

// distance from exact satisfaction; 0 when the fact holds exactly
double residual(const Scene& scene, const Fact& fact);

// rebuilds segments/circles entity lists from history + coordinates
void rebuild_entities(Scene& scene);

// every point name a fact mentions (members, vertices, centers), sorted
std::vector<std::string> fact_point_names(const Fact& fact);

std::string display_name(const std::string& point);  // "a1" -> "A1"

std::string centi_text(std::int64_t centi);        // 124 -> "1.24", fixed 2 decimals
std::int64_t parse_centi_text(const std::string&);  // "1.24" -> 124; throws IoError

}  // namespace geogen
