#include "geogen/qa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "geogen/caption.hpp"
#include "geogen/facts.hpp"

namespace geogen {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

// payload of the last \boxed{...}, brace-balanced; nullopt when absent
std::optional<std::string> last_boxed(const std::string& text) {
    const std::string marker = "boxed{";
    std::size_t best = std::string::npos;
    for (std::size_t pos = text.find(marker); pos != std::string::npos;
         pos = text.find(marker, pos + 1))
        if (pos > 0 && text[pos - 1] == '\\') best = pos;
    if (best == std::string::npos) return std::nullopt;

    std::size_t start = best + marker.size();
    int depth = 1;
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        else if (text[i] == '}' && --depth == 0)
            return text.substr(start, i - start);
    }
    return std::nullopt;  // unbalanced braces
}

bool equals_none(std::string payload) {
    // tolerate the prompt's `None' typography and plain quotes
    while (!payload.empty() && (payload.front() == '`' || payload.front() == '\'' ||
                                payload.front() == '"'))
        payload.erase(payload.begin());
    while (!payload.empty() && (payload.back() == '\'' || payload.back() == '"' ||
                                payload.back() == '`'))
        payload.pop_back();
    if (payload.size() != 4) return false;
    const char* none = "none";
    for (std::size_t i = 0; i < 4; ++i)
        if (std::tolower(static_cast<unsigned char>(payload[i])) != none[i]) return false;
    return true;
}

std::optional<std::int64_t> parse_numeric_centi(const std::string& payload) {
    std::string cleaned;
    for (char c : payload) {
        if (c == '$' || c == ' ' || c == ',') continue;
        cleaned += c;
    }
    if (cleaned.empty()) return std::nullopt;
    const char* begin = cleaned.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + cleaned.size()) return std::nullopt;  // partial parse
    if (!std::isfinite(value)) return std::nullopt;
    return std::llround(value * 100.0);
}

// text between the last "Generated Question:" marker and the following
// "Generated Response:" marker
std::optional<std::string> extract_question(const std::string& response) {
    const std::string q_marker = "Generated Question:";
    const std::string r_marker = "Generated Response:";
    std::size_t q = response.rfind(q_marker);
    if (q == std::string::npos) return std::nullopt;
    std::size_t r = response.find(r_marker, q + q_marker.size());
    if (r == std::string::npos) return std::nullopt;
    std::string question = trim(response.substr(q + q_marker.size(), r - q - q_marker.size()));
    if (question.empty()) return std::nullopt;
    return question;
}

// requirement 1.4: the question must not copy caption sentences verbatim
bool leaks_caption(const std::string& question, const std::string& caption) {
    for (const auto& sentence : split_caption_sentences(caption))
        if (question.find(sentence) != std::string::npos) return true;
    return false;
}

std::string substitute_description(const std::string& tmpl, const std::string& caption) {
    const std::string slot = "{description}";
    std::size_t pos = tmpl.find(slot);
    std::string out = tmpl;
    out.replace(pos, slot.size(), caption);
    return out;
}

}  // namespace

const std::string& qa_stage1_template() {
    static const std::string text =
        "You are a helpful dataset processor. Please:\n"
        "\n"
        "1. Generate a mathemetical question according to the given description of a "
        "geometric image with the following requirements:\n"
        "    1.1 The problem should base on the given description, i.e., you must **NOT** "
        "generate problems that are unrelated to the given description. \n"
        "    1.2 The problem difficulty should not be too low, such as determining some "
        "information in the description. \n"
        "    1.3 It should also not be too hard, like introducing too much extra "
        "information, but anyway you can introduce some extra information to form a good "
        "geometric problem. \n"
        "    1.4 You should **NOT** include or repeat any information in the description, "
        "and just contain the real question. For example, if the description says: `Line "
        "segment AB is present. The length of BA is 1.24.', then when you generate the "
        "question, you should not include the length of AB.\n"
        "    1.5 If the question is inconsistent with the given description, the final "
        "answer should be `None'.\n"
        "2. Answer the question you just provided, and express the final answer to two "
        "decimal places. The final answer should be in \\\\boxed{{answer}}.\n"
        "\n"
        "Description: \n"
        "{description}\n"
        "Generated Question:\n"
        "{question}\n"
        "Generated Response:\n"
        "{response}\n"
        "Final Answer:\n"
        "\\\\boxed{{answer}}\n";
    return text;
}

const std::string& qa_stage2_template() {
    static const std::string text =
        "You are a helpful dataset processor. Please:\n"
        "1. Generate a mathemetical question according to the given description of a "
        "geometric image with the following requirements:\n"
        "    1.1 The problem should base on the given description, i.e., you must **NOT** "
        "generate problems that are unrelated to the given description. \n"
        "    1.2 You can introduce some extra information to form a good geometric "
        "problem.\n"
        "    1.3 If you find that it is hard to generate some difficult questions, just "
        "give a simple question. For example, when the lengths of all four sides of a "
        "quadrilateral are given, you can no longer assume it is a parallelogram or "
        "rectangle. In such cases, the problem may only allow for questions like asking "
        "for the perimeter, or determining the length of a segment when a certain point "
        "divides a side into an n-equal part, etc.\n"
        "    1.4 You should **NOT** include or repeat any information in the description, "
        "and just contain the real question. For example, if the description says: `Line "
        "segment AB is present. The length of BA is 1.24.', then when you generate the "
        "question, you should not include the length of AB.\n"
        "    1.5 If the question is inconsistent with the given description, the final "
        "answer should be `None'.\n"
        "2. Answer the question you just provided, and express the final answer to two "
        "decimal places. The final answer should be in \\\\boxed{{answer}}.\n"
        "\n"
        "Description: \n"
        "{description}\n"
        "Generated Question:\n"
        "{question}\n"
        "Generated Response:\n"
        "{response}\n"
        "Final Answer:\n"
        "\\\\boxed{{answer}}\n";
    return text;
}

ParsedAnswer parse_final_answer(const std::string& response) {
    ParsedAnswer out;
    auto boxed = last_boxed(response);
    if (!boxed) return out;  // ParseFailure, empty payload
    out.payload = trim(*boxed);
    if (equals_none(out.payload)) {
        out.kind = AnswerKind::NoneSentinel;
        return out;
    }
    if (auto centi = parse_numeric_centi(out.payload)) {
        out.kind = AnswerKind::Value;
        out.centi = *centi;
    }
    return out;
}

std::string build_prompt(int stage, const std::string& caption) {
    if (caption.empty()) throw ConfigError("build_prompt: caption must be non-empty");
    if (stage == 1) return substitute_description(qa_stage1_template(), caption);
    if (stage == 2) return substitute_description(qa_stage2_template(), caption);
    throw ConfigError("build_prompt: stage must be 1 or 2");
}

std::string QaPair::answer_text() const { return centi_text(answer_centi); }

QaPair generate_qa(const std::string& caption, LlmClient& client, const QaConfig& config) {
    QaPair pair;

    auto attempt = [&](int stage, double temperature) -> bool {
        const std::string prompt = build_prompt(stage, caption);
        const std::string response = client.complete(prompt, temperature);
        pair.transcripts.push_back({prompt, response, temperature});
        ++pair.stage_count;

        ParsedAnswer answer = parse_final_answer(response);
        if (answer.kind != AnswerKind::Value) return false;
        auto question = extract_question(response);
        if (!question || leaks_caption(*question, caption)) return false;

        pair.question = *question;
        pair.answer_centi = answer.centi;
        return true;
    };

    if (attempt(1, config.stage1_temperature)) return pair;
    for (int retry = 0; retry < config.stage2_budget; ++retry)
        if (attempt(2, config.stage2_temperature)) return pair;
    throw RetriesExhaustedError(config.stage2_budget);
}

}  // namespace geogen
