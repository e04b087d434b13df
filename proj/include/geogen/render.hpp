#pragma once

#include <map>

#include "geogen/facts.hpp"
#include "geogen/scene.hpp"
#include "geogen/style.hpp"

namespace geogen {

struct SvgDocument {
    std::string text;
    std::vector<std::string> warnings;  // label collisions, never fatal
};

enum class MarkerKind {
    PointDot,      // single-point presence
    SegmentStroke, // two-point presence
    LengthText,
    Ticks,
    DegreeText,
    Square,
    Arcs,
    Triangles,
    DashedLine,
    CircleStroke,
};

struct AnnotationPlan {
    MarkerKind marker;
    int multiplicity;  // ticks / arcs / triangles per member
};

// Total over fact kinds. Off-grid angle values cannot come out of fact
// extraction, so hitting one here is a caller bug, not bad data.
AnnotationPlan annotation_plan(const Fact& fact);

// Outward unit direction (world coordinates) for each point's name label,
// radial from the scene centroid; +x when a point sits on the centroid.
std::map<std::string, Vec2> layout_labels(const Scene& scene, const StyleConfig& style);

// Deterministic annotated SVG. Every fact is realized as exactly one
// <g data-fact="..."> group; the multiset of data-fact attributes equals
// the input facts.
SvgDocument render_svg(const Scene& scene, const FactSet& facts,
                       const StyleConfig& style = {});

// data-fact attribute values in document order (a multiset of fact tags),
// unescaped; used by the alignment checker
std::vector<std::string> svg_fact_tags(const std::string& svg_text);

}  // namespace geogen
