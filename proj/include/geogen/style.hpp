#pragma once

#include <cstdint>
#include <string>

#include "geogen/errors.hpp"

namespace geogen {

struct Palette {
    std::string background = "#ffffff";
    std::string line = "#1f2937";        // base segments
    std::string point = "#111827";       // point dots
    std::string label = "#111827";       // point name text
    std::string tick = "#ec4899";        // segment-equality ticks
    std::string arc = "#dc2626";         // angle-equality arcs
    std::string value = "#b91c1c";       // degree / length text
    std::string parallel = "#2563eb";    // direction triangles
    std::string dashed = "#6b7280";      // collinearity lines
    std::string circle = "#0f766e";      // circle strokes
};

// Marker dimensions are fractions of canvas_size so diagrams stay legible
// when the canvas is resized.
struct StyleConfig {
    int canvas_size = 512;
    double margin = 0.12;          // padding around the scene bbox
    double segment_width = 2.0;    // px
    double annotation_width = 1.6; // px
    double point_radius = 3.0;     // px
    double font_size = 15.0;       // px
    double tick_len = 0.04;
    double tick_spacing = 0.015;
    double arc_base = 0.06;
    double arc_step = 0.02;
    double square_size = 0.04;
    double triangle_size = 0.018;
    double label_offset = 0.032;
    std::string dash_pattern = "6,4";
    Palette palette;

    void validate() const;  // throws ConfigError on non-positive dimensions
};

// Seeded jitter over widths, font size, and palette; the default config is
// returned untouched by the pipeline unless style variation is switched on.
StyleConfig sample_style(std::uint64_t seed);

}  // namespace geogen
