#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geogen/dataset.hpp"
#include "geogen/qa.hpp"
#include "geogen/raft.hpp"
#include "geogen/sampler.hpp"
#include "geogen/style.hpp"

namespace geogen {

struct FailureCapExceededError : Error {
    int failures;
    int budget;
    FailureCapExceededError(int got, int allowed)
        : Error("generation failures (" + std::to_string(got) +
                ") exceeded the allowed budget of " + std::to_string(allowed)),
          failures(got),
          budget(allowed) {}
};

struct DifficultyMix {
    double easy = 0.3;
    double medium = 0.4;
    double hard = 0.3;

    void validate() const;  // non-negative, sums to 1 within 1e-9
    Difficulty pick(Rng& rng) const;
};

struct PipelineConfig {
    int count = 10;
    std::uint64_t seed = 0;
    DifficultyMix mix;
    bool vary_style = false;       // per-record style jitter
    bool shuffle_captions = false; // per-record sentence order shuffle
    bool dump_scenes = false;      // also write scenes/{id}.scene.json
    StyleConfig style;
    RewardWeights weights;
    QaConfig qa;
    RaftConfig raft;
    std::string out_dir = "out";
    double failure_cap = 0.05;  // tolerated generation-failure fraction of count
    int threads = 0;            // 0 = hardware concurrency

    void validate() const;
};

// JSON config file with the documented key set; unknown keys are rejected.
PipelineConfig load_pipeline_config(const std::string& path);

struct GenerateStats {
    int requested = 0;
    int attempted = 0;
    int failures = 0;
    int per_difficulty[3] = {0, 0, 0};  // easy / medium / hard
    std::vector<std::string> failure_log;
};

struct GenerateResult {
    Dataset dataset;
    GenerateStats stats;
};

// Record i is a pure function of (config, i): images/{id}.svg plus a JSONL
// line, both written under config.out_dir. Generation failures are skipped
// and replacement seeds drawn, up to floor(failure_cap * count) of them.
GenerateResult generate_dataset(const PipelineConfig& config);

struct QaOutcome {
    Dataset dataset;                       // records that earned a QA pair
    std::vector<std::string> drop_log;     // one line per dropped record
    std::vector<Transcript> transcripts;   // audit trail, in call order
};

// generate_qa over every record; RetriesExhausted drops the record,
// transport errors abort the stage.
QaOutcome qa_dataset(const Dataset& dataset, LlmClient& client, const QaConfig& config,
                     int threads = 1);

// Alignment checker: for every record, the caption parses back to exactly
// record.facts and the SVG's data-fact multiset equals the fact tags.
// Returns one message per violation; empty means the dataset is aligned.
std::vector<std::string> validate_dataset(const Dataset& dataset,
                                          const std::string& dataset_root);

std::string stats_report(const Dataset& dataset);

}  // namespace geogen
