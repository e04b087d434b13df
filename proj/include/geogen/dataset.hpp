#pragma once

#include <nlohmann/json.hpp>
#include <optional>

#include "geogen/facts.hpp"
#include "geogen/sampler.hpp"

namespace geogen {

struct SchemaViolationError : Error {
    std::size_t line;
    std::string field;
    SchemaViolationError(std::size_t l, const std::string& f, const std::string& why)
        : Error("line " + std::to_string(l) + ": field '" + f + "': " + why),
          line(l),
          field(f) {}
};

// One reward audit entry; appended every time a record is scored.
struct RewardSummary {
    int epoch = 0;
    double total = 0, reasoning = 0, caption = 0, rouge = 0, bleu = 0;
    bool correct = false, formatted = false, solver_ok = true;
    std::optional<std::int64_t> answer_centi;
};

struct DatasetRecord {
    std::string id;
    std::string image_path;  // relative to the dataset root
    std::string caption;     // current caption (RAFT may rewrite it)
    std::string question;    // empty until the QA stage runs
    std::optional<std::int64_t> gold_answer_centi;
    FactSet facts;
    Difficulty difficulty = Difficulty::Easy;
    std::uint64_t seed = 0;
    std::vector<RewardSummary> reward_history;
    nlohmann::ordered_json extras;  // unknown JSONL fields, preserved on rewrite
};

using Dataset = std::vector<DatasetRecord>;

nlohmann::ordered_json record_to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::ordered_json& j, std::size_t line = 0);

// JSONL, one record per line; write ∘ read = identity
Dataset read_records(const std::string& path);
void write_records(const std::string& path, const Dataset& dataset);

}  // namespace geogen
