#pragma once

#include <array>
#include <map>

#include "geogen/dataset.hpp"
#include "geogen/reward.hpp"

namespace geogen {

struct GeneratorUnavailableError : Error {
    using Error::Error;
};

struct ShortCandidateFileError : GeneratorUnavailableError {
    ShortCandidateFileError(const std::string& path, int have, int want)
        : GeneratorUnavailableError("candidate file " + path + " holds " +
                                    std::to_string(have) + " lines, need " +
                                    std::to_string(want)) {}
};

struct HookFailureError : Error {
    using Error::Error;
};

// Produces N candidate captions for a record. reload() is called between
// epochs so endpoint-backed implementations can pick up a retrained model;
// file/stub implementations may treat it as a version bump or a no-op.
class CaptionGenerator {
  public:
    virtual ~CaptionGenerator() = default;
    virtual std::vector<std::string> generate(const DatasetRecord& record, int n) = 0;
    virtual void reload() {}
};

// Deterministic template mutations of the record's gold caption; exactly one
// candidate slot (chosen by a stable hash of the record id) carries the gold
// caption verbatim, every other slot differs from it.
class PerturbingStubGenerator : public CaptionGenerator {
  public:
    explicit PerturbingStubGenerator(std::uint64_t seed) : seed_(seed) {}

    std::vector<std::string> generate(const DatasetRecord& record, int n) override;
    void reload() override { ++version_; }

    int version() const { return version_; }

  private:
    std::uint64_t seed_;
    int version_ = 0;
};

// Replays pre-generated candidates from {dir}/{id}.candidates.txt, one per
// line. Frozen: reload() is a no-op, so selections are idempotent.
class ReplayGenerator : public CaptionGenerator {
  public:
    explicit ReplayGenerator(std::string dir) : dir_(std::move(dir)) {}

    std::vector<std::string> generate(const DatasetRecord& record, int n) override;

  private:
    std::string dir_;
};

// Asks an LLM endpoint to rewrite the current caption n times.
class RemoteGenerator : public CaptionGenerator {
  public:
    RemoteGenerator(LlmClient& client, double temperature = 1.0)
        : client_(client), temperature_(temperature) {}

    std::vector<std::string> generate(const DatasetRecord& record, int n) override;

  private:
    LlmClient& client_;
    double temperature_;
};

enum class SelectionPolicy { PaperFaithful, MonotoneGuard };

struct RaftConfig {
    int n_candidates = 8;
    int top_k = 1;
    int epochs = 5;
    SelectionPolicy policy = SelectionPolicy::PaperFaithful;
    RewardWeights weights;
    SolverConfig solver;
    int parallelism = 1;        // records scored concurrently within an epoch
    std::string trainer_hook;   // command template with {sft_file} and {epoch}; empty = none

    void validate() const;  // throws ConfigError
};

struct EpochStats {
    int epoch = 0;
    double mean_total = 0, max_total = 0, min_total = 0;
    int replacements = 0;
    int failures = 0;
    std::array<int, 10> histogram{};  // totals bucketed over [0,1]
};

struct RaftReport {
    std::vector<EpochStats> epochs;
    // per-record total of the caption in force after each epoch
    std::map<std::string, std::vector<double>> trajectories;
};

struct RaftResult {
    Dataset dataset;
    RaftReport report;
    std::vector<std::string> sft_files;
};

// Indices of the k highest totals, descending; ties go to the lowest index.
std::vector<int> select_best(const std::vector<RewardBreakdown>& scores, int k);

std::pair<Dataset, EpochStats> refine_epoch(const Dataset& dataset,
                                            CaptionGenerator& generator, LlmClient& solver,
                                            const RaftConfig& config, int epoch,
                                            RaftReport* report = nullptr);

// {image_path, caption} JSONL ordered by record id; when image_root is given,
// each image file must exist under it.
void emit_sft_file(const Dataset& dataset, const std::string& path,
                   const std::optional<std::string>& image_root = std::nullopt);

RaftResult run_raft(Dataset dataset, CaptionGenerator& generator, LlmClient& solver,
                    const RaftConfig& config, const std::string& out_dir,
                    const std::optional<std::string>& image_root = std::nullopt);

}  // namespace geogen
