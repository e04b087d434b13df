#include "geogen/dataset.hpp"

#include <fstream>

namespace geogen {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* const kKnownFields[] = {"version",    "id",   "image_path", "caption",
                                    "question",   "gold_answer", "facts",
                                    "difficulty", "seed", "reward_history"};

bool is_known(const std::string& key) {
    for (const char* k : kKnownFields)
        if (key == k) return true;
    return false;
}

ordered_json summary_to_json(const RewardSummary& s) {
    ordered_json j{{"epoch", s.epoch},       {"total", s.total},
                   {"reasoning", s.reasoning}, {"caption", s.caption},
                   {"rouge", s.rouge},       {"bleu", s.bleu},
                   {"correct", s.correct},   {"formatted", s.formatted},
                   {"solver_ok", s.solver_ok}};
    if (s.answer_centi)
        j["answer"] = centi_text(*s.answer_centi);
    else
        j["answer"] = nullptr;
    return j;
}

RewardSummary summary_from_json(const ordered_json& j) {
    RewardSummary s;
    s.epoch = j.value("epoch", 0);
    s.total = j.value("total", 0.0);
    s.reasoning = j.value("reasoning", 0.0);
    s.caption = j.value("caption", 0.0);
    s.rouge = j.value("rouge", 0.0);
    s.bleu = j.value("bleu", 0.0);
    s.correct = j.value("correct", false);
    s.formatted = j.value("formatted", false);
    s.solver_ok = j.value("solver_ok", true);
    if (j.contains("answer") && !j["answer"].is_null())
        s.answer_centi = parse_centi_text(j["answer"].get<std::string>());
    return s;
}

}  // namespace

ordered_json record_to_json(const DatasetRecord& record) {
    ordered_json j;
    j["version"] = 1;
    j["id"] = record.id;
    j["image_path"] = record.image_path;
    j["caption"] = record.caption;
    j["question"] = record.question;
    if (record.gold_answer_centi)
        j["gold_answer"] = centi_text(*record.gold_answer_centi);
    else
        j["gold_answer"] = nullptr;
    j["facts"] = ordered_json::parse(facts_to_json(record.facts));
    j["difficulty"] = difficulty_name(record.difficulty);
    j["seed"] = record.seed;
    j["reward_history"] = ordered_json::array();
    for (const auto& s : record.reward_history) j["reward_history"].push_back(summary_to_json(s));
    if (record.extras.is_object())
        for (const auto& [key, value] : record.extras.items())
            if (!is_known(key)) j[key] = value;
    return j;
}

DatasetRecord record_from_json(const ordered_json& j, std::size_t line) {
    auto require = [&](const char* field) -> const ordered_json& {
        if (!j.contains(field)) throw SchemaViolationError(line, field, "missing");
        return j.at(field);
    };
    auto text_field = [&](const char* field) -> std::string {
        const auto& v = require(field);
        if (!v.is_string()) throw SchemaViolationError(line, field, "expected string");
        return v.get<std::string>();
    };

    DatasetRecord record;
    record.id = text_field("id");
    record.image_path = text_field("image_path");
    record.caption = text_field("caption");
    record.question = text_field("question");

    const auto& gold = require("gold_answer");
    if (gold.is_string()) {
        try {
            record.gold_answer_centi = parse_centi_text(gold.get<std::string>());
        } catch (const std::exception&) {
            throw SchemaViolationError(line, "gold_answer",
                                       "not a 2-dp decimal: " + gold.get<std::string>());
        }
    } else if (!gold.is_null()) {
        throw SchemaViolationError(line, "gold_answer", "expected string or null");
    }

    try {
        record.facts = facts_from_json(require("facts").dump());
    } catch (const Error& e) {
        throw SchemaViolationError(line, "facts", e.what());
    }
    try {
        record.difficulty = difficulty_from(text_field("difficulty"));
    } catch (const ConfigError& e) {
        throw SchemaViolationError(line, "difficulty", e.what());
    }
    const auto& seed = require("seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw SchemaViolationError(line, "seed", "expected integer");
    record.seed = seed.get<std::uint64_t>();

    if (j.contains("reward_history")) {
        if (!j["reward_history"].is_array())
            throw SchemaViolationError(line, "reward_history", "expected array");
        for (const auto& s : j["reward_history"])
            record.reward_history.push_back(summary_from_json(s));
    }

    record.extras = ordered_json::object();
    for (const auto& [key, value] : j.items())
        if (!is_known(key)) record.extras[key] = value;
    return record;
}

Dataset read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    Dataset dataset;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw SchemaViolationError(line_no, "-", "line is not valid JSON");
        dataset.push_back(record_from_json(j, line_no));
    }
    return dataset;
}

void write_records(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset file: " + path);
    for (const auto& record : dataset) out << record_to_json(record).dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace geogen
