#include "geogen/reward.hpp"

#include "geogen/facts.hpp"
#include "geogen/qa.hpp"

namespace geogen {

void RewardWeights::validate() const {
    auto unit = [](double v, const char* what) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError(std::string("reward weight ") + what + " must be in [0,1]");
    };
    unit(lambda_r, "lambda_r");
    unit(s_c, "s_c");
    unit(w_r, "w_r");
}

const std::string& solver_prompt_template() {
    static const std::string text =
        "You are a careful geometry solver. Using only the diagram description below, "
        "answer the question.\n"
        "Express the final answer to two decimal places. The final answer should be in "
        "\\\\boxed{{answer}}.\n"
        "If the question cannot be answered from the description, the final answer "
        "should be `None'.\n"
        "\n"
        "Description:\n"
        "{description}\n"
        "Question:\n"
        "{question}\n"
        "Final Answer:\n"
        "\\\\boxed{{answer}}\n";
    return text;
}

std::string build_solver_prompt(const std::string& caption, const std::string& question,
                                const SolverConfig& config,
                                std::optional<std::int64_t> gold_centi) {
    if (caption.empty() || question.empty())
        throw ConfigError("solver prompt needs a non-empty caption and question");
    std::string out = solver_prompt_template();
    auto fill = [&out](const std::string& slot, const std::string& value) {
        std::size_t pos = out.find(slot);
        out.replace(pos, slot.size(), value);
    };
    fill("{description}", caption);
    fill("{question}", question);
    if (config.reveal_gold && gold_centi) {
        const std::string marker = "Final Answer:";
        std::size_t pos = out.rfind(marker);
        out.insert(pos, "Reference Answer:\n" + centi_text(*gold_centi) + "\n");
    }
    return out;
}

double caption_reward(const std::string& candidate, const std::string& gold, double w_r) {
    if (candidate.empty() || gold.empty())
        throw EmptyInputError("caption_reward: empty text");
    return w_r * rouge_l(candidate, gold) + (1.0 - w_r) * bleu4(candidate, gold);
}

double reasoning_reward(const std::optional<std::int64_t>& answer_centi,
                        std::int64_t gold_centi, double s_c) {
    const double format = answer_centi.has_value() ? 1.0 : 0.0;
    const double correct = (answer_centi && *answer_centi == gold_centi) ? 1.0 : 0.0;
    return s_c * correct + (1.0 - s_c) * format;
}

RewardBreakdown composite_reward(const std::string& candidate_caption,
                                 const std::string& gold_caption,
                                 const std::string& question, std::int64_t gold_centi,
                                 LlmClient& solver, const RewardWeights& weights,
                                 const SolverConfig& solver_config) {
    weights.validate();

    RewardBreakdown out;
    out.rouge = rouge_l(candidate_caption, gold_caption);
    out.bleu = bleu4(candidate_caption, gold_caption);
    out.caption = weights.w_r * out.rouge + (1.0 - weights.w_r) * out.bleu;

    const std::string prompt = build_solver_prompt(
        candidate_caption, question, solver_config,
        solver_config.reveal_gold ? std::optional<std::int64_t>(gold_centi) : std::nullopt);
    try {
        out.solver_raw = solver.complete(prompt, 0.0);
        ParsedAnswer answer = parse_final_answer(out.solver_raw);
        if (answer.kind == AnswerKind::Value) out.answer_centi = answer.centi;
        out.formatted = out.answer_centi.has_value();
        out.correct = out.answer_centi && *out.answer_centi == gold_centi;
        out.reasoning = reasoning_reward(out.answer_centi, gold_centi, weights.s_c);
    } catch (const TransportError& e) {
        out.solver_ok = false;
        out.solver_raw = e.what();
        out.reasoning = 0.0;
    }

    out.total = weights.lambda_r * out.reasoning + (1.0 - weights.lambda_r) * out.caption;
    return out;
}

}  // namespace geogen
