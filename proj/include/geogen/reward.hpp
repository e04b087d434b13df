#pragma once

#include <optional>

#include "geogen/llm.hpp"
#include "geogen/metrics.hpp"

namespace geogen {

struct RewardWeights {
    double lambda_r = 0.7;  // reasoning vs caption mix
    double s_c = 0.9;       // correctness vs format inside reasoning
    double w_r = 0.7;       // ROUGE vs BLEU inside caption

    void validate() const;  // all in [0,1]
};

struct SolverConfig {
    // The gold answer is kept away from the solver by default; enabling this
    // reproduces the literal protocol where the solver sees the reference.
    bool reveal_gold = false;
};

struct RewardBreakdown {
    double reasoning = 0.0;
    double caption = 0.0;
    double total = 0.0;
    double rouge = 0.0;
    double bleu = 0.0;
    bool correct = false;
    bool formatted = false;
    bool solver_ok = true;  // false when the solver transport failed
    std::optional<std::int64_t> answer_centi;
    std::string solver_raw;
};

// w_r * rouge_l + (1 - w_r) * bleu4 over tokenized text
double caption_reward(const std::string& candidate, const std::string& gold, double w_r);

// s_c * I(answer == gold) + (1 - s_c) * F(parsed at all); answers compared
// after 2-decimal normalization
double reasoning_reward(const std::optional<std::int64_t>& answer_centi,
                        std::int64_t gold_centi, double s_c);

// One solver call on (candidate caption, question), then the lambda_r mix.
// Transport failures zero the reasoning part and set solver_ok = false; the
// candidate is still scored.
RewardBreakdown composite_reward(const std::string& candidate_caption,
                                 const std::string& gold_caption,
                                 const std::string& question, std::int64_t gold_centi,
                                 LlmClient& solver, const RewardWeights& weights = {},
                                 const SolverConfig& solver_config = {});

// embedded twin of data/prompts/solver.txt
const std::string& solver_prompt_template();

std::string build_solver_prompt(const std::string& caption, const std::string& question,
                                const SolverConfig& config = {},
                                std::optional<std::int64_t> gold_centi = std::nullopt);

}  // namespace geogen
