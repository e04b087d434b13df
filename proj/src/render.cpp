#include "geogen/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "geogen/geometry.hpp"

namespace geogen {

namespace {

std::string num(double v) {
    if (std::abs(v) < 0.005) v = 0.0;  // avoid "-0.00"
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string esc(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct View {
    double scale = 1.0;
    double cx = 0.0, cy = 0.0;
    double half = 256.0;

    Vec2 to_screen(const Vec2& w) const {
        return {half + (w.x() - cx) * scale, half - (w.y() - cy) * scale};
    }
    // direction only: flip y, renormalize
    static Vec2 dir_screen(const Vec2& d) {
        Vec2 s(d.x(), -d.y());
        double n = s.norm();
        return n > 0 ? Vec2(s / n) : Vec2(1, 0);
    }
};

View fit_view(const Scene& scene, const StyleConfig& style) {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    auto grow = [&](double x, double y) {
        if (first) {
            xmin = xmax = x;
            ymin = ymax = y;
            first = false;
        } else {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    };
    for (const auto& [name, p] : scene.points) grow(p.x(), p.y());
    for (const auto& c : scene.circles) {
        Vec2 o = scene.at(c.center);
        grow(o.x() - c.radius, o.y() - c.radius);
        grow(o.x() + c.radius, o.y() + c.radius);
    }
    View v;
    v.half = style.canvas_size / 2.0;
    if (first) return v;
    double extent = std::max({xmax - xmin, ymax - ymin, 0.8});
    double pad = style.margin * style.canvas_size;
    v.scale = (style.canvas_size - 2.0 * pad) / extent;
    v.cx = (xmin + xmax) / 2.0;
    v.cy = (ymin + ymax) / 2.0;
    return v;
}

struct TextBox {
    std::string text;
    double x, y, w, h;
};

bool boxes_overlap(const TextBox& a, const TextBox& b) {
    return std::abs(a.x - b.x) * 2.0 < (a.w + b.w) &&
           std::abs(a.y - b.y) * 2.0 < (a.h + b.h);
}

class SvgBuilder {
  public:
    SvgBuilder(const Scene& scene, const StyleConfig& style)
        : scene_(scene), style_(style), view_(fit_view(scene, style)) {}

    std::string line(const Vec2& a, const Vec2& b, const std::string& color,
                     double width, const std::string& extra = "") {
        return "<line x1=\"" + num(a.x()) + "\" y1=\"" + num(a.y()) + "\" x2=\"" +
               num(b.x()) + "\" y2=\"" + num(b.y()) + "\" stroke=\"" + color +
               "\" stroke-width=\"" + num(width) + "\"" + extra + "/>";
    }

    std::string text_at(const Vec2& pos, const std::string& content,
                        const std::string& color, double size) {
        boxes_.push_back({content, pos.x(), pos.y(),
                          0.62 * size * static_cast<double>(content.size()),
                          1.1 * size});
        return "<text x=\"" + num(pos.x()) + "\" y=\"" + num(pos.y()) +
               "\" fill=\"" + color + "\" font-family=\"sans-serif\" font-size=\"" +
               num(size) + "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" +
               esc(content) + "</text>";
    }

    std::string marker_for(const Fact& fact);

    const View& view() const { return view_; }
    const std::vector<TextBox>& boxes() const { return boxes_; }

    Vec2 at(const std::string& name) const { return view_.to_screen(scene_.at(name)); }
    Vec2 world(const std::string& name) const { return scene_.at(name); }
    double px(double fraction) const { return fraction * style_.canvas_size; }

  private:
    const Scene& scene_;
    const StyleConfig& style_;
    View view_;
    std::vector<TextBox> boxes_;

    std::string ticks_for(const Segment& seg, int count);
    std::string arcs_for(const Angle& angle, int count);
    std::string triangles_for(const Segment& seg, const Vec2& canon_dir, int count);
};

std::string SvgBuilder::ticks_for(const Segment& seg, int count) {
    Vec2 a = at(seg.a), b = at(seg.b);
    Vec2 u = dir_of(a, b);
    Vec2 n = rot90(u);
    Vec2 mid = midpoint_of(a, b);
    double spacing = px(style_.tick_spacing);
    double halflen = px(style_.tick_len) / 2.0;
    std::string out;
    for (int j = 0; j < count; ++j) {
        double off = (j - (count - 1) / 2.0) * spacing;
        Vec2 c = mid + u * off;
        out += line(c - n * halflen, c + n * halflen, style_.palette.tick,
                    style_.annotation_width);
    }
    return out;
}

std::string SvgBuilder::arcs_for(const Angle& angle, int count) {
    Vec2 v = at(angle.vertex);
    Vec2 u1 = View::dir_screen(world(angle.ray1) - world(angle.vertex));
    Vec2 u2 = View::dir_screen(world(angle.ray2) - world(angle.vertex));
    double a1 = std::atan2(u1.y(), u1.x());
    double a2 = std::atan2(u2.y(), u2.x());
    double delta = a2 - a1;
    while (delta > M_PI) delta -= 2 * M_PI;
    while (delta <= -M_PI) delta += 2 * M_PI;
    int sweep = delta > 0 ? 1 : 0;
    std::string out;
    for (int j = 0; j < count; ++j) {
        double r = px(style_.arc_base + style_.arc_step * j);
        Vec2 s = v + u1 * r;
        Vec2 e = v + u2 * r;
        out += "<path d=\"M " + num(s.x()) + " " + num(s.y()) + " A " + num(r) +
               " " + num(r) + " 0 0 " + std::to_string(sweep) + " " + num(e.x()) +
               " " + num(e.y()) + "\" fill=\"none\" stroke=\"" + style_.palette.arc +
               "\" stroke-width=\"" + num(style_.annotation_width) + "\"/>";
    }
    return out;
}

std::string SvgBuilder::triangles_for(const Segment& seg, const Vec2& canon_dir,
                                      int count) {
    Vec2 a = at(seg.a), b = at(seg.b);
    Vec2 u = dir_of(a, b);
    // Every member of the class points the same way on screen.
    if (u.dot(View::dir_screen(canon_dir)) < 0) u = -u;
    Vec2 n = rot90(u);
    Vec2 mid = midpoint_of(a, b);
    double size = px(style_.triangle_size);
    double spacing = 2.6 * size;
    std::string out;
    for (int j = 0; j < count; ++j) {
        double off = (j - (count - 1) / 2.0) * spacing;
        Vec2 c = mid + u * off;
        Vec2 apex = c + u * size;
        Vec2 b1 = c - u * (0.5 * size) + n * (0.65 * size);
        Vec2 b2 = c - u * (0.5 * size) - n * (0.65 * size);
        out += "<polygon points=\"" + num(apex.x()) + "," + num(apex.y()) + " " +
               num(b1.x()) + "," + num(b1.y()) + " " + num(b2.x()) + "," +
               num(b2.y()) + "\" fill=\"" + style_.palette.parallel + "\"/>";
    }
    return out;
}

std::string SvgBuilder::marker_for(const Fact& fact) {
    AnnotationPlan plan = annotation_plan(fact);
    std::string body;

    switch (plan.marker) {
        case MarkerKind::PointDot: {
            const auto& f = std::get<PresentFact>(fact);
            Vec2 p = at(f.points[0]);
            body = "<circle cx=\"" + num(p.x()) + "\" cy=\"" + num(p.y()) +
                   "\" r=\"" + num(style_.point_radius) + "\" fill=\"" +
                   style_.palette.point + "\"/>";
            break;
        }
        case MarkerKind::SegmentStroke: {
            const auto& f = std::get<PresentFact>(fact);
            body = line(at(f.points[0]), at(f.points[1]), style_.palette.line,
                        style_.segment_width);
            break;
        }
        case MarkerKind::LengthText: {
            const auto& f = std::get<SegmentLengthFact>(fact);
            Vec2 a = at(f.segment.a), b = at(f.segment.b);
            Vec2 n = rot90(dir_of(a, b));
            Vec2 mid = midpoint_of(a, b);
            Vec2 center(view_.half, view_.half);
            if (n.dot(mid - center) < 0) n = -n;
            Vec2 pos = mid + n * (0.55 * style_.font_size + 4.0);
            body = text_at(pos, f.value_text(), style_.palette.value, style_.font_size);
            break;
        }
        case MarkerKind::Ticks: {
            const auto& f = std::get<SegmentEqFact>(fact);
            for (const auto& seg : f.members) body += ticks_for(seg, plan.multiplicity);
            break;
        }
        case MarkerKind::DegreeText: {
            const auto& f = std::get<AngleValueFact>(fact);
            Vec2 v = at(f.angle.vertex);
            Vec2 u1 = View::dir_screen(world(f.angle.ray1) - world(f.angle.vertex));
            Vec2 u2 = View::dir_screen(world(f.angle.ray2) - world(f.angle.vertex));
            Vec2 bis = u1 + u2;
            double nb = bis.norm();
            bis = nb > 1e-9 ? Vec2(bis / nb) : rot90(u1);
            Vec2 pos = v + bis * px(style_.arc_base + 2 * style_.arc_step);
            body = text_at(pos, std::to_string(f.degrees) + "\xc2\xb0",
                           style_.palette.value, style_.font_size);
            break;
        }
        case MarkerKind::Square: {
            const auto& f = std::get<RightAngleFact>(fact);
            Vec2 v = at(f.angle.vertex);
            Vec2 u1 = View::dir_screen(world(f.angle.ray1) - world(f.angle.vertex));
            Vec2 u2 = View::dir_screen(world(f.angle.ray2) - world(f.angle.vertex));
            double side = px(style_.square_size) * 0.5;
            Vec2 p1 = v + u1 * side;
            Vec2 p2 = v + u1 * side + u2 * side;
            Vec2 p3 = v + u2 * side;
            body = "<path d=\"M " + num(p1.x()) + " " + num(p1.y()) + " L " +
                   num(p2.x()) + " " + num(p2.y()) + " L " + num(p3.x()) + " " +
                   num(p3.y()) + "\" fill=\"none\" stroke=\"" + style_.palette.arc +
                   "\" stroke-width=\"" + num(style_.annotation_width) + "\"/>";
            break;
        }
        case MarkerKind::Arcs: {
            const auto& f = std::get<AngleEqFact>(fact);
            for (const auto& ang : f.members) body += arcs_for(ang, plan.multiplicity);
            break;
        }
        case MarkerKind::Triangles: {
            const auto& f = std::get<ParallelFact>(fact);
            Vec2 canon = dir_of(world(f.lines.front().a), world(f.lines.front().b));
            for (const auto& seg : f.lines)
                body += triangles_for(seg, canon, plan.multiplicity);
            break;
        }
        case MarkerKind::DashedLine: {
            const auto& f = std::get<CollinearFact>(fact);
            Vec2 first = at(f.points.front());
            Vec2 last = at(f.points.back());
            Vec2 u = dir_of(first, last);
            double ext = 0.07 * (last - first).norm();
            body = line(first - u * ext, last + u * ext, style_.palette.dashed,
                        style_.annotation_width,
                        " stroke-dasharray=\"" + style_.dash_pattern + "\"");
            break;
        }
        case MarkerKind::CircleStroke: {
            const auto& f = std::get<OnCircleFact>(fact);
            Vec2 o = world(f.center);
            double r = 0;
            for (const auto& m : f.points) r += (world(m) - o).norm();
            r /= static_cast<double>(f.points.size());
            Vec2 c = view().to_screen(o);
            body = "<circle cx=\"" + num(c.x()) + "\" cy=\"" + num(c.y()) +
                   "\" r=\"" + num(r * view().scale) + "\" fill=\"none\" stroke=\"" +
                   style_.palette.circle + "\" stroke-width=\"" +
                   num(style_.annotation_width) + "\"/>";
            break;
        }
    }
    return "<g data-fact=\"" + esc(fact_tag(fact)) + "\">" + body + "</g>\n";
}

}  // namespace

AnnotationPlan annotation_plan(const Fact& fact) {
    return std::visit(
        [](const auto& f) -> AnnotationPlan {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PresentFact>) {
                return {f.points.size() == 1 ? MarkerKind::PointDot
                                            : MarkerKind::SegmentStroke,
                        1};
            } else if constexpr (std::is_same_v<T, SegmentLengthFact>) {
                return {MarkerKind::LengthText, 1};
            } else if constexpr (std::is_same_v<T, SegmentEqFact>) {
                return {MarkerKind::Ticks, f.class_index};
            } else if constexpr (std::is_same_v<T, AngleValueFact>) {
                if (f.degrees % 15 != 0 || f.degrees < 15 || f.degrees > 165)
                    throw std::logic_error("annotation_plan: angle value " +
                                           std::to_string(f.degrees) +
                                           " is outside the drawable grid");
                return {MarkerKind::DegreeText, 1};
            } else if constexpr (std::is_same_v<T, RightAngleFact>) {
                return {MarkerKind::Square, 1};
            } else if constexpr (std::is_same_v<T, AngleEqFact>) {
                return {MarkerKind::Arcs, f.class_index};
            } else if constexpr (std::is_same_v<T, ParallelFact>) {
                return {MarkerKind::Triangles, f.class_index};
            } else if constexpr (std::is_same_v<T, CollinearFact>) {
                return {MarkerKind::DashedLine, 1};
            } else {
                static_assert(std::is_same_v<T, OnCircleFact>);
                return {MarkerKind::CircleStroke, 1};
            }
        },
        fact);
}

std::map<std::string, Vec2> layout_labels(const Scene& scene, const StyleConfig&) {
    Vec2 centroid = Vec2::Zero();
    for (const auto& [name, p] : scene.points) centroid += p;
    if (!scene.points.empty()) centroid /= static_cast<double>(scene.points.size());

    std::map<std::string, Vec2> dirs;
    for (const auto& [name, p] : scene.points) {
        Vec2 d = p - centroid;
        double n = d.norm();
        dirs[name] = n > 1e-9 ? Vec2(d / n) : Vec2(1, 0);
    }
    return dirs;
}

SvgDocument render_svg(const Scene& scene, const FactSet& facts,
                       const StyleConfig& style) {
    style.validate();

    SvgBuilder builder(scene, style);
    std::string canvas = std::to_string(style.canvas_size);

    std::string out;
    out.reserve(4096);
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + canvas +
           "\" height=\"" + canvas + "\" viewBox=\"0 0 " + canvas + " " + canvas +
           "\">\n";
    out += "<rect width=\"" + canvas + "\" height=\"" + canvas + "\" fill=\"" +
           style.palette.background + "\"/>\n";

    // Which points / segments are already depicted by a presence fact?
    std::set<std::string> covered_points;
    std::set<std::pair<std::string, std::string>> covered_segments;
    for (const auto& fact : facts)
        if (const auto* p = std::get_if<PresentFact>(&fact)) {
            if (p->points.size() == 1) covered_points.insert(p->points[0]);
            else covered_segments.insert({p->points[0], p->points[1]});
        }

    for (const auto& seg : scene.segments)
        if (!covered_segments.count({seg.a, seg.b}))
            out += builder.line(builder.at(seg.a), builder.at(seg.b),
                                style.palette.line, style.segment_width) +
                   "\n";

    SvgDocument doc;
    for (const auto& fact : facts) {
        try {
            out += builder.marker_for(fact);
        } catch (const UnresolvedReferenceError& e) {
            throw UnresolvedReferenceError(std::string(e.what()) +
                                           " referenced by fact " + fact_tag(fact));
        }
    }

    for (const auto& [name, p] : scene.points)
        if (!covered_points.count(name)) {
            Vec2 s = builder.at(name);
            out += "<circle cx=\"" + num(s.x()) + "\" cy=\"" + num(s.y()) +
                   "\" r=\"" + num(style.point_radius) + "\" fill=\"" +
                   style.palette.point + "\"/>\n";
        }

    auto dirs = layout_labels(scene, style);
    double offset = style.label_offset * style.canvas_size;
    for (const auto& [name, p] : scene.points) {
        Vec2 anchor = builder.at(name) + View::dir_screen(dirs.at(name)) * offset;
        out += builder.text_at(anchor, display_name(name), style.palette.label,
                               style.font_size) +
               "\n";
    }

    out += "</svg>\n";

    const auto& boxes = builder.boxes();
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (boxes_overlap(boxes[i], boxes[j]))
                doc.warnings.push_back("label overlap: \"" + boxes[i].text +
                                       "\" and \"" + boxes[j].text + "\"");

    doc.text = std::move(out);
    return doc;
}

std::vector<std::string> svg_fact_tags(const std::string& svg_text) {
    static const std::string kNeedle = "data-fact=\"";
    std::vector<std::string> tags;
    for (std::size_t pos = svg_text.find(kNeedle); pos != std::string::npos;
         pos = svg_text.find(kNeedle, pos)) {
        pos += kNeedle.size();
        std::size_t end = svg_text.find('"', pos);
        if (end == std::string::npos) break;
        std::string tag = svg_text.substr(pos, end - pos);
        for (auto [entity, plain] : {std::pair<const char*, const char*>{"&amp;", "&"},
                                     {"&lt;", "<"},
                                     {"&gt;", ">"},
                                     {"&quot;", "\""}}) {
            const std::string from = entity;
            for (std::size_t at = tag.find(from); at != std::string::npos;
                 at = tag.find(from, at + 1))
                tag.replace(at, from.size(), plain);
        }
        tags.push_back(std::move(tag));
        pos = end + 1;
    }
    return tags;
}

}  // namespace geogen
