#include "geogen/style.hpp"

#include "geogen/rng.hpp"

namespace geogen {

void StyleConfig::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0)) throw ConfigError(std::string("style: ") + what + " must be positive");
    };
    if (canvas_size <= 0) throw ConfigError("style: canvas_size must be positive");
    positive(margin, "margin");
    positive(segment_width, "segment_width");
    positive(annotation_width, "annotation_width");
    positive(point_radius, "point_radius");
    positive(font_size, "font_size");
    positive(tick_len, "tick_len");
    positive(tick_spacing, "tick_spacing");
    positive(arc_base, "arc_base");
    positive(arc_step, "arc_step");
    positive(square_size, "square_size");
    positive(triangle_size, "triangle_size");
    positive(label_offset, "label_offset");
    if (dash_pattern.empty()) throw ConfigError("style: dash_pattern must be non-empty");
}

StyleConfig sample_style(std::uint64_t seed) {
    Rng rng(mix64(seed, 0x5791ull));
    StyleConfig s;
    s.segment_width *= rng.uniform(0.7, 1.5);
    s.annotation_width *= rng.uniform(0.7, 1.4);
    s.font_size *= rng.uniform(0.85, 1.3);
    s.point_radius *= rng.uniform(0.8, 1.3);
    switch (rng.index(3)) {
        case 0:
            break;  // stock palette
        case 1:
            s.palette.tick = "#d946ef";
            s.palette.arc = "#ea580c";
            s.palette.parallel = "#0d9488";
            s.palette.value = "#c2410c";
            break;
        case 2:
            s.palette.line = "#0f172a";
            s.palette.tick = "#db2777";
            s.palette.arc = "#b91c1c";
            s.palette.parallel = "#4f46e5";
            s.palette.circle = "#15803d";
            break;
    }
    return s;
}

}  // namespace geogen
