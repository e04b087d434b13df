#include "geogen/caption.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>

#include "geogen/rng.hpp"

namespace geogen {

namespace {

const std::array<const char*, 13> kCountWords = {
    "zero", "one",   "two",   "three", "four", "five",  "six",
    "seven", "eight", "nine", "ten",   "eleven", "twelve"};

std::string count_word(int n) {
    if (n >= 0 && n < static_cast<int>(kCountWords.size())) return kCountWords[n];
    return std::to_string(n);
}

int parse_count(const std::string& word) {
    for (std::size_t i = 0; i < kCountWords.size(); ++i)
        if (word == kCountWords[i]) return static_cast<int>(i);
    return std::stoi(word);  // numeric fallback beyond twelve
}

std::string plural(int n, const char* one, const char* many) {
    return count_word(n) + " " + (n == 1 ? one : many);
}

// "A" | "A and B" | "A, B, and C"
std::string join_list(const std::vector<std::string>& items) {
    if (items.empty()) return "";
    if (items.size() == 1) return items[0];
    if (items.size() == 2) return items[0] + " and " + items[1];
    std::string out;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) out += items[i] + ", ";
    out += "and " + items.back();
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string rest = text;
    std::size_t comma;
    while ((comma = rest.find(", ")) != std::string::npos) {
        items.push_back(rest.substr(0, comma));
        rest = rest.substr(comma + 2);
    }
    if (rest.rfind("and ", 0) == 0) rest = rest.substr(4);
    std::size_t mid = rest.find(" and ");
    if (items.empty() && mid != std::string::npos) {
        items.push_back(rest.substr(0, mid));
        rest = rest.substr(mid + 5);
    }
    if (!rest.empty()) items.push_back(rest);
    return items;
}

std::string lower_name(const std::string& display) {
    std::string out = display;
    if (!out.empty() && out[0] >= 'A' && out[0] <= 'Z')
        out[0] = static_cast<char>(out[0] - 'A' + 'a');
    return out;
}

// "A1BC" -> {"a1", "b", "c"}
std::vector<std::string> split_name_run(const std::string& run) {
    std::vector<std::string> names;
    std::string current;
    for (char c : run) {
        if (c >= 'A' && c <= 'Z') {
            if (!current.empty()) names.push_back(current);
            current = std::string(1, static_cast<char>(c - 'A' + 'a'));
        } else if (c >= '0' && c <= '9' && !current.empty()) {
            current += c;
        } else {
            return {};  // not a name run
        }
    }
    if (!current.empty()) names.push_back(current);
    return names;
}

std::string displayed(const std::vector<std::string>& names) {
    std::vector<std::string> shown;
    shown.reserve(names.size());
    for (const auto& n : names) shown.push_back(display_name(n));
    return join_list(shown);
}

struct SentenceWriter {
    std::string operator()(const PresentFact& f) const {
        if (f.points.size() == 1) return "Point " + display_name(f.points[0]) + " is present.";
        return "Line segment " + Segment::canonical(f.points[0], f.points[1]).display() +
               " is present.";
    }
    std::string operator()(const SegmentLengthFact& f) const {
        return "The length of " + f.segment.display() + " is " + f.value_text() + ".";
    }
    std::string operator()(const SegmentEqFact& f) const {
        std::vector<std::string> shown;
        for (const auto& s : f.members) shown.push_back(s.display());
        return "Segments " + join_list(shown) + " have equal length, marked with " +
               plural(f.class_index, "tick", "ticks") + ".";
    }
    std::string operator()(const AngleValueFact& f) const {
        return "Angle " + f.angle.display() + " measures " + std::to_string(f.degrees) +
               " degrees.";
    }
    std::string operator()(const RightAngleFact& f) const {
        return "Angle " + f.angle.display() +
               " is a right angle, marked with a small square.";
    }
    std::string operator()(const AngleEqFact& f) const {
        std::vector<std::string> shown;
        for (const auto& a : f.members) shown.push_back(a.display());
        return "Angles " + join_list(shown) + " are equal, marked with " +
               plural(f.class_index, "arc", "arcs") + ".";
    }
    std::string operator()(const ParallelFact& f) const {
        std::vector<std::string> shown;
        for (const auto& s : f.lines) shown.push_back(s.display());
        return "Lines " + join_list(shown) + " are parallel, marked with " +
               plural(f.class_index, "triangle", "triangles") + ".";
    }
    std::string operator()(const CollinearFact& f) const {
        return "Points " + displayed(f.points) + " are collinear, shown with a dashed line.";
    }
    std::string operator()(const OnCircleFact& f) const {
        return "Points " + displayed(f.points) + " lie on a circle centered at " +
               display_name(f.center) + ".";
    }
};

std::int64_t parse_centi(const std::string& value) {
    std::size_t dot = value.find('.');
    std::int64_t whole = std::stoll(value.substr(0, dot));
    std::int64_t frac = std::stoll(value.substr(dot + 1));
    return whole * 100 + frac;
}

std::optional<Fact> match_sentence(const std::string& sentence) {
    static const std::regex point_present(R"(^Point ([A-Z][0-9]*) is present\.$)");
    static const std::regex segment_present(R"(^Line segment ([A-Z0-9]+) is present\.$)");
    static const std::regex seg_length(R"(^The length of ([A-Z0-9]+) is ([0-9]+\.[0-9]{2})\.$)");
    static const std::regex seg_eq(
        R"(^Segments (.+) have equal length, marked with ([a-z0-9]+) ticks?\.$)");
    static const std::regex angle_value(R"(^Angle ([A-Z0-9]+) measures ([0-9]+) degrees\.$)");
    static const std::regex right_angle(
        R"(^Angle ([A-Z0-9]+) is a right angle, marked with a small square\.$)");
    static const std::regex angle_eq(
        R"(^Angles (.+) are equal, marked with ([a-z0-9]+) arcs?\.$)");
    static const std::regex parallel(
        R"(^Lines (.+) are parallel, marked with ([a-z0-9]+) triangles?\.$)");
    static const std::regex collinear(
        R"(^Points (.+) are collinear, shown with a dashed line\.$)");
    static const std::regex on_circle(
        R"(^Points (.+) lie on a circle centered at ([A-Z][0-9]*)\.$)");

    std::smatch m;
    if (std::regex_match(sentence, m, point_present))
        return Fact(PresentFact{{lower_name(m[1])}});
    if (std::regex_match(sentence, m, segment_present)) {
        auto names = split_name_run(m[1]);
        if (names.size() != 2) return std::nullopt;
        Segment s = Segment::canonical(names[0], names[1]);
        return Fact(PresentFact{{s.a, s.b}});
    }
    if (std::regex_match(sentence, m, seg_length)) {
        auto names = split_name_run(m[1]);
        if (names.size() != 2) return std::nullopt;
        return Fact(SegmentLengthFact{Segment::canonical(names[0], names[1]),
                                      parse_centi(m[2])});
    }
    if (std::regex_match(sentence, m, seg_eq)) {
        std::vector<Segment> members;
        for (const auto& item : split_list(m[1])) {
            auto names = split_name_run(item);
            if (names.size() != 2) return std::nullopt;
            members.push_back(Segment::canonical(names[0], names[1]));
        }
        if (members.size() < 2) return std::nullopt;
        return Fact(SegmentEqFact{parse_count(m[2]), std::move(members)});
    }
    if (std::regex_match(sentence, m, angle_value)) {
        auto names = split_name_run(m[1]);
        if (names.size() != 3) return std::nullopt;
        return Fact(AngleValueFact{Angle::canonical(names[1], names[0], names[2]),
                                   std::stoi(m[2])});
    }
    if (std::regex_match(sentence, m, right_angle)) {
        auto names = split_name_run(m[1]);
        if (names.size() != 3) return std::nullopt;
        return Fact(RightAngleFact{Angle::canonical(names[1], names[0], names[2])});
    }
    if (std::regex_match(sentence, m, angle_eq)) {
        std::vector<Angle> members;
        for (const auto& item : split_list(m[1])) {
            auto names = split_name_run(item);
            if (names.size() != 3) return std::nullopt;
            members.push_back(Angle::canonical(names[1], names[0], names[2]));
        }
        if (members.size() < 2) return std::nullopt;
        return Fact(AngleEqFact{parse_count(m[2]), std::move(members)});
    }
    if (std::regex_match(sentence, m, parallel)) {
        std::vector<Segment> lines;
        for (const auto& item : split_list(m[1])) {
            auto names = split_name_run(item);
            if (names.size() != 2) return std::nullopt;
            lines.push_back(Segment::canonical(names[0], names[1]));
        }
        if (lines.size() < 2) return std::nullopt;
        return Fact(ParallelFact{parse_count(m[2]), std::move(lines)});
    }
    if (std::regex_match(sentence, m, collinear)) {
        std::vector<std::string> pts;
        for (const auto& item : split_list(m[1])) {
            auto names = split_name_run(item);
            if (names.size() != 1) return std::nullopt;
            pts.push_back(names[0]);
        }
        if (pts.size() < 3) return std::nullopt;
        return Fact(CollinearFact{std::move(pts)});
    }
    if (std::regex_match(sentence, m, on_circle)) {
        std::vector<std::string> pts;
        for (const auto& item : split_list(m[1])) {
            auto names = split_name_run(item);
            if (names.size() != 1) return std::nullopt;
            pts.push_back(names[0]);
        }
        if (pts.empty()) return std::nullopt;
        return Fact(OnCircleFact{lower_name(m[2]), std::move(pts)});
    }
    return std::nullopt;
}

bool is_preamble(const std::string& sentence) {
    static const std::regex preamble(
        R"(^The diagram contains (points? .+|no labeled points)\.$)");
    return std::regex_match(sentence, preamble);
}

}  // namespace

std::string CaptionText::flat() const {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i) out += ' ';
        out += sentences[i];
    }
    return out;
}

std::string fact_to_sentence(const Fact& fact) { return std::visit(SentenceWriter{}, fact); }

CaptionText caption_facts(const FactSet& facts, std::optional<std::uint64_t> shuffle_seed) {
    std::set<std::string> names;
    for (const auto& fact : facts)
        for (const auto& n : fact_point_names(fact)) names.insert(n);

    std::string preamble;
    if (names.empty()) {
        preamble = "The diagram contains no labeled points.";
    } else {
        std::vector<std::string> shown(names.begin(), names.end());
        preamble = std::string("The diagram contains ") +
                   (shown.size() == 1 ? "point " : "points ") + displayed(shown) + ".";
    }

    std::vector<std::string> body;
    body.reserve(facts.size());
    for (const auto& fact : facts) body.push_back(fact_to_sentence(fact));

    if (shuffle_seed) {
        Rng rng(mix64(*shuffle_seed, 0xCAB5ull));
        for (std::size_t i = body.size(); i > 1; --i)
            std::swap(body[i - 1], body[rng.index(i)]);
    }

    CaptionText caption;
    caption.sentences.reserve(body.size() + 1);
    caption.sentences.push_back(std::move(preamble));
    for (auto& s : body) caption.sentences.push_back(std::move(s));
    return caption;
}

std::vector<std::string> split_caption_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\n') c = ' ';
        if (current.empty() && c == ' ') continue;
        current += c;
        if (c == '.') {
            bool decimal = i + 1 < text.size() && text[i + 1] >= '0' && text[i + 1] <= '9';
            if (!decimal) {
                sentences.push_back(current);
                current.clear();
            }
        }
    }
    std::string tail;
    for (char c : current)
        if (c != ' ' || !tail.empty()) tail += c;
    if (!tail.empty()) sentences.push_back(tail);
    return sentences;
}

FactSet parse_caption(const std::string& text) {
    FactSet facts;
    const auto sentences = split_caption_sentences(text);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (is_preamble(sentences[i])) continue;
        auto fact = match_sentence(sentences[i]);
        if (!fact) throw UnrecognizedSentenceError(i, sentences[i]);
        facts.push_back(std::move(*fact));
    }
    std::sort(facts.begin(), facts.end(), fact_less);
    return facts;
}

const std::string& caption_template_table() {
    static const std::string table =
        "preamble|The diagram contains {points}.\n"
        "point_present|Point {point} is present.\n"
        "segment_present|Line segment {segment} is present.\n"
        "segment_length|The length of {segment} is {value}.\n"
        "segment_eq|Segments {segments} have equal length, marked with {count} {tick|ticks}.\n"
        "angle_value|Angle {angle} measures {degrees} degrees.\n"
        "right_angle|Angle {angle} is a right angle, marked with a small square.\n"
        "angle_eq|Angles {angles} are equal, marked with {count} {arc|arcs}.\n"
        "parallel|Lines {segments} are parallel, marked with {count} {triangle|triangles}.\n"
        "collinear|Points {points} are collinear, shown with a dashed line.\n"
        "on_circle|Points {points} lie on a circle centered at {center}.\n";
    return table;
}

}  // namespace geogen
