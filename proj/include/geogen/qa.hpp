#pragma once

#include <cstdint>
#include <vector>

#include "geogen/llm.hpp"

namespace geogen {

struct RetriesExhaustedError : Error {
    int budget;
    explicit RetriesExhaustedError(int b)
        : Error("no self-consistent question after " + std::to_string(b) +
                " regeneration attempts"),
          budget(b) {}
};

enum class AnswerKind { Value, NoneSentinel, ParseFailure };

struct ParsedAnswer {
    AnswerKind kind = AnswerKind::ParseFailure;
    std::int64_t centi = 0;  // meaningful only when kind == Value
    std::string payload;     // raw boxed text, empty when no box was found
};

// Takes the last \boxed{...} in the response; numeric payloads are
// normalized to 2 decimals, payload "None" (case-insensitive, quotes
// tolerated) is the inconsistency sentinel, anything else is a failure.
ParsedAnswer parse_final_answer(const std::string& response);

// Appendix-style generation prompts with {description} substituted; the
// {question}/{response}/{answer} slots stay literal for the model to fill.
std::string build_prompt(int stage, const std::string& caption);

// embedded twins of data/prompts/qa_stage{1,2}.txt (pinned to the files by test)
const std::string& qa_stage1_template();
const std::string& qa_stage2_template();

struct Transcript {
    std::string prompt;
    std::string response;
    double temperature = 0.0;
};

struct QaPair {
    std::string question;
    std::int64_t answer_centi = 0;
    int stage_count = 0;  // total model calls consumed
    std::vector<Transcript> transcripts;

    std::string answer_text() const;  // "3.14"
};

struct QaConfig {
    double stage1_temperature = 0.2;
    double stage2_temperature = 0.8;
    int stage2_budget = 5;  // regeneration attempts after the stage-1 call
};

// Two-stage protocol: one low-temperature attempt, then high-temperature
// regenerations until a self-consistent (non-None, parseable, leak-free)
// question appears or the budget runs out.
QaPair generate_qa(const std::string& caption, LlmClient& client,
                   const QaConfig& config = {});

}  // namespace geogen
