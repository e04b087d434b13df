#include "geogen/raft.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include "geogen/caption.hpp"
#include "geogen/rng.hpp"

namespace geogen {

namespace {

namespace fs = std::filesystem;

// stable across platforms, unlike std::hash
std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i) out += ' ';
        out += sentences[i];
    }
    return out;
}

// the reference caption RAFT scores against: always the rule-derived text,
// even after earlier epochs rewrote record.caption
std::string gold_caption_of(const DatasetRecord& record) {
    return caption_facts(record.facts).flat();
}

}  // namespace

std::vector<std::string> PerturbingStubGenerator::generate(const DatasetRecord& record,
                                                           int n) {
    if (n < 1) throw ConfigError("candidate count must be >= 1");
    const std::string gold = gold_caption_of(record);
    const int gold_slot = static_cast<int>(fnv1a(record.id) % static_cast<std::uint64_t>(n));

    std::vector<std::string> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i == gold_slot) {
            out[i] = gold;
            continue;
        }
        Rng rng(mix64(mix64(seed_, fnv1a(record.id)),
                      mix64(static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(version_) + 1)));
        auto sentences = split_caption_sentences(gold);
        switch (rng.index(3)) {
            case 0:  // drop a non-preamble sentence
                if (sentences.size() >= 2)
                    sentences.erase(sentences.begin() + 1 +
                                    static_cast<long>(rng.index(sentences.size() - 1)));
                break;
            case 1:  // swap two body sentences
                if (sentences.size() >= 3) {
                    std::size_t a = 1 + rng.index(sentences.size() - 1);
                    std::size_t b = 1 + rng.index(sentences.size() - 1);
                    std::swap(sentences[a], sentences[b]);
                    break;
                }
                [[fallthrough]];
            case 2:  // hedge wording the gold caption never uses
                sentences.push_back("The figure is drawn approximately to scale.");
                break;
        }
        std::string text = join_sentences(sentences);
        if (text == gold) text += " This candidate restates the diagram.";
        out[i] = text;
    }
    return out;
}

std::vector<std::string> ReplayGenerator::generate(const DatasetRecord& record, int n) {
    const std::string path = dir_ + "/" + record.id + ".candidates.txt";
    std::ifstream in(path);
    if (!in) throw ShortCandidateFileError(path, 0, n);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    if (static_cast<int>(lines.size()) < n)
        throw ShortCandidateFileError(path, static_cast<int>(lines.size()), n);
    lines.resize(static_cast<std::size_t>(n));
    return lines;
}

std::vector<std::string> RemoteGenerator::generate(const DatasetRecord& record, int n) {
    const std::string prompt =
        "Rewrite the following geometric diagram description. Preserve every stated "
        "fact, keep all point names and numeric values unchanged, and output only the "
        "rewritten description.\n\n" +
        record.caption;
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(client_.complete(prompt, temperature_));
    return out;
}

void RaftConfig::validate() const {
    if (n_candidates < 1) throw ConfigError("raft: n_candidates must be >= 1");
    if (top_k < 1 || top_k > n_candidates)
        throw ConfigError("raft: top_k must satisfy 1 <= top_k <= n_candidates");
    if (epochs < 1) throw ConfigError("raft: epochs must be >= 1");
    if (parallelism < 1) throw ConfigError("raft: parallelism must be >= 1");
    weights.validate();
}

std::vector<int> select_best(const std::vector<RewardBreakdown>& scores, int k) {
    std::vector<int> indices(scores.size());
    std::iota(indices.begin(), indices.end(), 0);
    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)].total >
               scores[static_cast<std::size_t>(b)].total;
    });
    indices.resize(static_cast<std::size_t>(std::min<int>(k, static_cast<int>(scores.size()))));
    return indices;
}

namespace {

// Caption-only records (no question / gold answer yet) are scored without a
// solver call: reasoning 0, caption metrics as usual.
RewardBreakdown score_candidate(const std::string& candidate, const std::string& gold,
                                const DatasetRecord& record, LlmClient& solver,
                                const RaftConfig& config) {
    if (!record.question.empty() && record.gold_answer_centi)
        return composite_reward(candidate, gold, record.question, *record.gold_answer_centi,
                                solver, config.weights, config.solver);
    RewardBreakdown out;
    out.rouge = rouge_l(candidate, gold);
    out.bleu = bleu4(candidate, gold);
    out.caption = config.weights.w_r * out.rouge + (1.0 - config.weights.w_r) * out.bleu;
    out.total = (1.0 - config.weights.lambda_r) * out.caption;
    out.formatted = false;
    return out;
}

RewardSummary summarize(const RewardBreakdown& b, int epoch) {
    RewardSummary s;
    s.epoch = epoch;
    s.total = b.total;
    s.reasoning = b.reasoning;
    s.caption = b.caption;
    s.rouge = b.rouge;
    s.bleu = b.bleu;
    s.correct = b.correct;
    s.formatted = b.formatted;
    s.solver_ok = b.solver_ok;
    s.answer_centi = b.answer_centi;
    return s;
}

struct RecordOutcome {
    DatasetRecord record;
    double after_total = 0.0;
    bool replaced = false;
    bool failed = false;
};

}  // namespace

std::pair<Dataset, EpochStats> refine_epoch(const Dataset& dataset,
                                            CaptionGenerator& generator, LlmClient& solver,
                                            const RaftConfig& config, int epoch,
                                            RaftReport* report) {
    if (dataset.empty()) throw ConfigError("refine_epoch: dataset is empty");
    config.validate();

    std::vector<RecordOutcome> outcomes(dataset.size());

    auto process = [&](std::size_t idx) {
        RecordOutcome& out = outcomes[idx];
        out.record = dataset[idx];
        DatasetRecord& record = out.record;
        try {
            const std::string gold = gold_caption_of(record);
            auto candidates = generator.generate(record, config.n_candidates);
            if (static_cast<int>(candidates.size()) != config.n_candidates)
                throw GeneratorUnavailableError(
                    "generator returned " + std::to_string(candidates.size()) +
                    " candidates, expected " + std::to_string(config.n_candidates));

            std::vector<RewardBreakdown> scores;
            scores.reserve(candidates.size());
            for (const auto& candidate : candidates)
                scores.push_back(score_candidate(candidate, gold, record, solver, config));

            const int best = select_best(scores, config.top_k).front();
            // selection optimality, asserted every record
            for (const auto& s : scores)
                if (s.total > scores[static_cast<std::size_t>(best)].total)
                    throw std::logic_error("select_best missed the argmax");

            bool replace = true;
            RewardBreakdown incumbent;
            if (config.policy == SelectionPolicy::MonotoneGuard) {
                incumbent = score_candidate(record.caption, gold, record, solver, config);
                replace = scores[static_cast<std::size_t>(best)].total > incumbent.total;
            }

            if (replace) {
                out.replaced = record.caption != candidates[static_cast<std::size_t>(best)];
                record.caption = candidates[static_cast<std::size_t>(best)];
                out.after_total = scores[static_cast<std::size_t>(best)].total;
                record.reward_history.push_back(
                    summarize(scores[static_cast<std::size_t>(best)], epoch));
            } else {
                out.after_total = incumbent.total;
                record.reward_history.push_back(summarize(incumbent, epoch));
            }
        } catch (const std::exception&) {
            out.failed = true;
            out.record = dataset[idx];  // carry forward unchanged
        }
    };

    const int workers = std::min<int>(config.parallelism, static_cast<int>(dataset.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < dataset.size();
                     i = next.fetch_add(1))
                    process(i);
            });
        for (auto& t : pool) t.join();
    }

    Dataset refined;
    refined.reserve(dataset.size());
    EpochStats stats;
    stats.epoch = epoch;
    double sum = 0.0;
    int scored = 0;
    stats.min_total = 1.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& out = outcomes[i];
        if (out.failed) {
            ++stats.failures;
        } else {
            ++scored;
            sum += out.after_total;
            stats.max_total = std::max(stats.max_total, out.after_total);
            stats.min_total = std::min(stats.min_total, out.after_total);
            int bucket = std::min(9, static_cast<int>(out.after_total * 10.0));
            ++stats.histogram[static_cast<std::size_t>(std::max(0, bucket))];
            if (out.replaced) ++stats.replacements;
        }
        if (report) {
            auto& trajectory = report->trajectories[out.record.id];
            if (out.failed)
                trajectory.push_back(trajectory.empty() ? 0.0 : trajectory.back());
            else
                trajectory.push_back(out.after_total);
        }
        refined.push_back(std::move(out.record));
    }
    if (scored > 0) stats.mean_total = sum / scored;
    else stats.min_total = 0.0;
    return {std::move(refined), stats};
}

void emit_sft_file(const Dataset& dataset, const std::string& path,
                   const std::optional<std::string>& image_root) {
    Dataset ordered = dataset;
    std::sort(ordered.begin(), ordered.end(),
              [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });

    if (image_root)
        for (const auto& record : ordered) {
            fs::path image = fs::path(*image_root) / record.image_path;
            if (!fs::exists(image))
                throw IoError("record " + record.id +
                              ": image file missing: " + image.string());
        }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write sft file: " + path);
    for (const auto& record : ordered) {
        nlohmann::ordered_json j{{"image_path", record.image_path},
                                 {"caption", record.caption}};
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

RaftResult run_raft(Dataset dataset, CaptionGenerator& generator, LlmClient& solver,
                    const RaftConfig& config, const std::string& out_dir,
                    const std::optional<std::string>& image_root) {
    config.validate();
    fs::create_directories(out_dir);

    RaftResult result;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        auto [refined, stats] =
            refine_epoch(dataset, generator, solver, config, epoch, &result.report);
        dataset = std::move(refined);
        result.report.epochs.push_back(stats);

        const std::string sft_path =
            (fs::path(out_dir) / ("sft_epoch_" + std::to_string(epoch) + ".jsonl")).string();
        emit_sft_file(dataset, sft_path, image_root);
        result.sft_files.push_back(sft_path);

        if (!config.trainer_hook.empty()) {
            std::string cmd = config.trainer_hook;
            auto replace_all = [&cmd](const std::string& slot, const std::string& value) {
                for (std::size_t pos = cmd.find(slot); pos != std::string::npos;
                     pos = cmd.find(slot, pos + value.size()))
                    cmd.replace(pos, slot.size(), value);
            };
            replace_all("{sft_file}", sft_path);
            replace_all("{epoch}", std::to_string(epoch));
            const int rc = std::system(cmd.c_str());
            if (rc != 0)
                throw HookFailureError("trainer hook failed at epoch " +
                                       std::to_string(epoch) + " (status " +
                                       std::to_string(rc) + "): " + cmd);
        }
        if (epoch < config.epochs) generator.reload();
    }
    result.dataset = std::move(dataset);
    return result;
}

}  // namespace geogen
