// Acceptance gate: eight end-to-end properties, one pass/fail line each.
// Exit code 0 only when every criterion holds.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>
#include <vector>

#include "geogen/caption.hpp"
#include "geogen/construct.hpp"
#include "geogen/metrics.hpp"
#include "geogen/pipeline.hpp"
#include "geogen/qa.hpp"
#include "geogen/raft.hpp"
#include "geogen/render.hpp"
#include "geogen/reward.hpp"
#include "geogen/rng.hpp"
#include "geogen/sampler.hpp"

using namespace geogen;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// pinned tolerances
constexpr double kResidualTol = 1e-6;   // geometric admission threshold
constexpr double kOracleTol = 1e-9;     // metric-vs-oracle agreement
constexpr double kFixtureTol = 1e-6;    // hand-computed metric fixtures
constexpr double kRewardTol = 1e-12;    // reward algebra (float associativity slack)

struct Criterion {
    int index;
    std::string name;
    bool ok = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

int hw_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 4 : static_cast<int>(hc);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& stem) {
        path = fs::temp_directory_path() / (stem + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<unreadable:" + p.string() + ">";
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

Difficulty tier_of(int i) {
    switch (i % 3) {
        case 0: return Difficulty::Easy;
        case 1: return Difficulty::Medium;
        default: return Difficulty::Hard;
    }
}

// ---------------------------------------------------------------- criterion 1

Criterion check_alignment() {
    Criterion c{1, "cross-modal alignment on 1,000 samples", false, ""};
    const auto start = Clock::now();
    const int kSamples = 1000;

    std::atomic<int> mismatches{0};
    std::mutex mu;
    std::string first_error;

    parallel_for(kSamples, hw_threads(), [&](int i) {
        try {
            SampledScene sample = generate_scene(tier_of(i), mix64(0xA11CEull, i));
            FactSet facts = extract_facts(sample.scene);

            std::multiset<std::string> want;
            for (const Fact& f : facts) want.insert(fact_tag(f));

            SvgDocument doc = render_svg(sample.scene, facts);
            auto rendered = svg_fact_tags(doc.text);
            std::multiset<std::string> got(rendered.begin(), rendered.end());

            const bool svg_ok = got == want;
            const bool caption_ok =
                fact_sets_equal(parse_caption(caption_facts(facts).flat()), facts);
            if (!svg_ok || !caption_ok) {
                ++mismatches;
                std::lock_guard<std::mutex> lock(mu);
                if (first_error.empty())
                    first_error = "sample " + std::to_string(i) +
                                  (svg_ok ? " caption" : " svg") + " mismatch";
            }
        } catch (const std::exception& e) {
            ++mismatches;
            std::lock_guard<std::mutex> lock(mu);
            if (first_error.empty())
                first_error = "sample " + std::to_string(i) + ": " + e.what();
        }
    });

    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << kSamples << " samples, " << mismatches.load() << " mismatches, "
           << std::fixed << elapsed << "s";
    if (!first_error.empty()) detail << "; first: " << first_error;
    c.detail = detail.str();
    c.ok = mismatches.load() == 0 && elapsed < 120.0;
    return c;
}

// ---------------------------------------------------------------- criterion 2

Criterion check_soundness() {
    Criterion c{2, "geometric soundness over 10,000 fuzzed seeds", false, ""};
    const auto start = Clock::now();
    const int kSeeds = 10000;

    std::atomic<int> violations{0};
    std::mutex mu;
    std::string first_error;

    parallel_for(kSeeds, hw_threads(), [&](int i) {
        try {
            SampledScene sample = generate_scene(tier_of(i), mix64(0xF00Dull, i));
            FactSet facts = extract_facts(sample.scene);
            for (const Fact& fact : facts) {
                const double r = residual(sample.scene, fact);
                if (!(r < kResidualTol)) {
                    ++violations;
                    std::lock_guard<std::mutex> lock(mu);
                    if (first_error.empty())
                        first_error = "seed " + std::to_string(i) + " fact " +
                                      fact_tag(fact) + " residual " + std::to_string(r);
                    return;
                }
            }
        } catch (const std::exception& e) {
            ++violations;
            std::lock_guard<std::mutex> lock(mu);
            if (first_error.empty())
                first_error = "seed " + std::to_string(i) + ": " + e.what();
        }
    });

    // deliberately degenerate fixtures must be rejected
    int rejected = 0;
    {
        ClauseList program = parse_program("free a\nfree b\nfree c\ncircumcenter o a b c");
        PointOverrides overrides{{"a", Vec2(0, 0)}, {"b", Vec2(1, 0)}, {"c", Vec2(2, 0)}};
        try {
            construct_scene(program, 1, &overrides);
        } catch (const DegenerateConstructionError&) {
            ++rejected;
        }
    }
    {
        ClauseList program = parse_program("segment a b");
        PointOverrides overrides{{"a", Vec2(1, 1)}, {"b", Vec2(1, 1)}};
        try {
            construct_scene(program, 1, &overrides);
        } catch (const DegenerateConstructionError&) {
            ++rejected;
        }
    }
    {
        ClauseList program = parse_program("triangle a b c");
        PointOverrides overrides{{"a", Vec2(0, 0)}, {"b", Vec2(2, 0)}, {"c", Vec2(2, 0.05)}};
        try {
            construct_scene(program, 1, &overrides);
        } catch (const DegenerateConstructionError&) {
            ++rejected;
        }
    }

    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << kSeeds << " seeds, " << violations.load() << " residual violations, "
           << rejected << "/3 degenerate fixtures rejected, " << std::fixed << elapsed
           << "s";
    if (!first_error.empty()) detail << "; first: " << first_error;
    c.detail = detail.str();
    c.ok = violations.load() == 0 && rejected == 3 && elapsed < 300.0;
    return c;
}

// ---------------------------------------------------------------- criterion 3

Criterion check_determinism() {
    Criterion c{3, "byte-identical regeneration of a 200-record dataset", false, ""};
    TempDir dir_a("geogen-acc3a"), dir_b("geogen-acc3b");

    PipelineConfig config;
    config.count = 200;
    config.seed = 99;
    config.vary_style = true;
    config.shuffle_captions = true;
    config.threads = hw_threads();

    config.out_dir = dir_a.path.string();
    GenerateResult first = generate_dataset(config);
    config.out_dir = dir_b.path.string();
    GenerateResult second = generate_dataset(config);

    int diffs = 0;
    std::string first_diff;
    if (slurp(dir_a.path / "dataset.jsonl") != slurp(dir_b.path / "dataset.jsonl")) {
        ++diffs;
        first_diff = "dataset.jsonl";
    }
    for (const auto& record : first.dataset)
        if (slurp(dir_a.path / record.image_path) != slurp(dir_b.path / record.image_path)) {
            ++diffs;
            if (first_diff.empty()) first_diff = record.image_path;
        }

    std::ostringstream detail;
    detail << first.dataset.size() << " records, " << second.dataset.size()
           << " on rerun, " << diffs << " differing files";
    if (!first_diff.empty()) detail << "; first: " << first_diff;
    c.detail = detail.str();
    c.ok = diffs == 0 && first.dataset.size() == 200 && second.dataset.size() == 200;
    return c;
}

// ---------------------------------------------------------------- criterion 4

namespace oracle {

using Tokens = std::vector<std::string>;

std::map<Tokens, int> ngrams(const Tokens& tokens, std::size_t n) {
    std::map<Tokens, int> counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[Tokens(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

double bleu(const Tokens& cand, const Tokens& ref) {
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        auto c_counts = ngrams(cand, n);
        long total = 0, clipped = 0;
        auto r_counts = ngrams(ref, n);
        for (const auto& [gram, count] : c_counts) {
            total += count;
            auto it = r_counts.find(gram);
            if (it != r_counts.end()) clipped += std::min(count, it->second);
        }
        const double p = total == 0 ? 1.0
                                    : std::max(static_cast<double>(clipped), 1e-9) /
                                          static_cast<double>(total);
        log_sum += 0.25 * std::log(p);
    }
    const double bp = cand.size() < ref.size()
                          ? std::exp(1.0 - static_cast<double>(ref.size()) /
                                               static_cast<double>(cand.size()))
                          : 1.0;
    return bp * std::exp(log_sum);
}

double rouge(const Tokens& cand, const Tokens& ref) {
    std::vector<std::vector<int>> dp(cand.size() + 1,
                                     std::vector<int>(ref.size() + 1, 0));
    for (std::size_t i = 1; i <= cand.size(); ++i)
        for (std::size_t j = 1; j <= ref.size(); ++j)
            dp[i][j] = cand[i - 1] == ref[j - 1]
                           ? dp[i - 1][j - 1] + 1
                           : std::max(dp[i - 1][j], dp[i][j - 1]);
    const int lcs = dp[cand.size()][ref.size()];
    if (lcs == 0) return 0.0;
    const double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
    const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
    return 2.0 * p * r / (p + r);
}

}  // namespace oracle

Criterion check_metric_oracles() {
    Criterion c{4, "BLEU/ROUGE agree with brute-force oracles and fixtures", false, ""};
    static const std::vector<std::string> vocab = {
        "the", "length", "of", "ab", "bc", "segment", "angle", "abc", "is",
        "1.24", "60", "degrees", "points", "circle", "parallel", "marked"};

    std::mt19937 gen(424242);
    std::uniform_int_distribution<int> len_dist(1, 24);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    auto draw = [&] {
        std::vector<std::string> out;
        const int len = len_dist(gen);
        for (int i = 0; i < len; ++i) out.push_back(vocab[pick(gen)]);
        return out;
    };

    int failures = 0;
    std::string first_error;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        auto cand = draw();
        auto ref = draw();
        const double db = std::abs(bleu4(cand, ref) - oracle::bleu(cand, ref));
        const double dr = std::abs(rouge_l(cand, ref) - oracle::rouge(cand, ref));
        worst = std::max({worst, db, dr});
        if (db > kOracleTol || dr > kOracleTol) {
            ++failures;
            if (first_error.empty())
                first_error = "trial " + std::to_string(trial) + " delta " +
                              std::to_string(std::max(db, dr));
        }
    }

    // hand fixtures. A 4-token candidate against an 8-token reference with
    // perfect n-gram precision isolates the brevity penalty: exp(1 - 8/4).
    const double bp_case =
        bleu4("the quick brown fox", "the quick brown fox jumps over the lazy");
    const bool bp_ok = std::abs(bp_case - std::exp(-1.0)) < kFixtureTol;

    // 6-token prefix of an 8-token reference: P = 1, R = 3/4, F1 = 6/7
    const double rouge_case = rouge_l("the quick brown fox jumps over",
                                      "the quick brown fox jumps over the lazy");
    const bool rouge_ok = std::abs(rouge_case - 6.0 / 7.0) < kFixtureTol;

    const bool identity_ok =
        std::abs(bleu4("point a is present", "point a is present") - 1.0) < kFixtureTol &&
        std::abs(rouge_l("point a", "point a") - 1.0) < kFixtureTol;

    std::ostringstream detail;
    detail << "50 oracle pairs (worst delta " << std::scientific << worst << "), BP case "
           << std::fixed << bp_case << " vs " << std::exp(-1.0) << ", ROUGE case "
           << rouge_case << " vs " << (6.0 / 7.0);
    if (!first_error.empty()) detail << "; first: " << first_error;
    c.detail = detail.str();
    c.ok = failures == 0 && bp_ok && rouge_ok && identity_ok;
    return c;
}

// ---------------------------------------------------------------- criterion 5

Criterion check_reward_algebra() {
    Criterion c{5, "composite reward grid and [0,1] bounds", false, ""};
    const RewardWeights w;  // paper constants 0.7 / 0.9 / 0.7

    int failures = 0;
    std::string first_error;
    auto expect = [&](double got, double want, const std::string& label) {
        if (std::abs(got - want) > kRewardTol) {
            ++failures;
            if (first_error.empty())
                first_error = label + ": got " + std::to_string(got) + ", want " +
                              std::to_string(want);
        }
    };

    // reasoning states: correct -> 1.0, wrong-but-formatted -> 1-s_c, silent -> 0
    const std::optional<std::int64_t> correct{248}, wrong{100}, silent{std::nullopt};
    const double grid[3][3] = {
        // caption 0.0, 0.5, 1.0
        {0.7, 0.85, 1.0},   // correct
        {0.07, 0.22, 0.37}, // formatted but wrong
        {0.0, 0.15, 0.3},   // unformatted
    };
    const std::optional<std::int64_t> answers[3] = {correct, wrong, silent};
    const double captions[3] = {0.0, 0.5, 1.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double reasoning = reasoning_reward(answers[i], 248, w.s_c);
            const double total = w.lambda_r * reasoning + (1.0 - w.lambda_r) * captions[j];
            expect(total, grid[i][j],
                   "grid[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }

    // the full composite path at the caption endpoints
    {
        const std::string gold =
            "The diagram contains points A and B. Line segment AB is present. "
            "The length of AB is 1.24.";
        MockLlmClient right({"\\boxed{2.48}"});
        RewardBreakdown best = composite_reward(gold, gold, "Twice the length?", 248, right);
        expect(best.total, 1.0, "composite correct+identical");

        MockLlmClient none({"\\boxed{None}"});
        RewardBreakdown abstain = composite_reward(gold, gold, "Twice the length?", 248, none);
        expect(abstain.total, 0.3, "composite abstain+identical");

        MockLlmClient off({"\\boxed{9.99}"});
        RewardBreakdown miss = composite_reward(gold, gold, "Twice the length?", 248, off);
        expect(miss.total, 0.7 * 0.1 + 0.3, "composite wrong+identical");
    }

    // bounds under 10^4 randomized inputs
    static const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta",
                                                   "1.00",  "2.50", "angle", "segment"};
    std::mt19937 gen(5150);
    std::uniform_int_distribution<int> len_dist(1, 12);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> centi_dist(-500, 500);
    std::uniform_int_distribution<int> mode(0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int out_of_range = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<std::string> cand_tokens, gold_tokens;
        const int nc = len_dist(gen), ng = len_dist(gen);
        for (int i = 0; i < nc; ++i) cand_tokens.push_back(vocab[pick(gen)]);
        for (int i = 0; i < ng; ++i) gold_tokens.push_back(vocab[pick(gen)]);

        RewardWeights rw;
        rw.lambda_r = unit(gen);
        rw.s_c = unit(gen);
        rw.w_r = unit(gen);

        std::optional<std::int64_t> answer;
        const int m = mode(gen);
        if (m != 2) answer = centi_dist(gen);
        const std::int64_t gold_centi = centi_dist(gen);

        const double reasoning = reasoning_reward(answer, gold_centi, rw.s_c);
        const double caption =
            rw.w_r * rouge_l(cand_tokens, gold_tokens) + (1.0 - rw.w_r) * bleu4(cand_tokens, gold_tokens);
        const double total = rw.lambda_r * reasoning + (1.0 - rw.lambda_r) * caption;
        if (!(reasoning >= 0.0 && reasoning <= 1.0 + kRewardTol) ||
            !(caption >= 0.0 && caption <= 1.0 + kRewardTol) ||
            !(total >= 0.0 && total <= 1.0 + kRewardTol))
            ++out_of_range;
    }
    if (out_of_range > 0) {
        ++failures;
        if (first_error.empty())
            first_error = std::to_string(out_of_range) + " rewards out of [0,1]";
    }

    std::ostringstream detail;
    detail << "9 grid cells, 3 composite endpoints, 10000 random inputs, " << failures
           << " failures";
    if (!first_error.empty()) detail << "; first: " << first_error;
    c.detail = detail.str();
    c.ok = failures == 0;
    return c;
}

// ---------------------------------------------------------------- criterion 6

Criterion check_raft_selection() {
    Criterion c{6, "RAFT selects gold candidates and improves monotonically", false, ""};
    TempDir dir("geogen-acc6");

    // a 200-record dataset with corrupted incumbent captions
    PipelineConfig pipe;
    pipe.count = 200;
    pipe.seed = 1234;
    pipe.out_dir = (dir.path / "data").string();
    pipe.threads = hw_threads();
    GenerateResult generated = generate_dataset(pipe);
    Dataset dataset = generated.dataset;
    for (auto& record : dataset) record.caption += " The sketch is approximate.";

    int failures = 0;
    std::string first_error;
    auto fail = [&](const std::string& why) {
        ++failures;
        if (first_error.empty()) first_error = why;
    };

    // (a) stub generator, N=8, top-1: the gold candidate wins in 100% of records
    {
        PerturbingStubGenerator gen(2024);
        FunctionLlmClient solver([](const std::string&, double) -> std::string {
            throw TransportError("no solver in caption-only scoring");
        });
        RaftConfig config;
        config.n_candidates = 8;
        config.top_k = 1;
        config.parallelism = hw_threads();
        auto [refined, stats] = refine_epoch(dataset, gen, solver, config, 1);
        if (stats.failures != 0) fail("epoch reported " + std::to_string(stats.failures) + " failures");
        int wrong = 0;
        for (const auto& record : refined)
            if (record.caption != caption_facts(record.facts).flat()) ++wrong;
        if (wrong != 0) fail(std::to_string(wrong) + "/200 records missed the gold candidate");
        if (stats.replacements != 200)
            fail("expected 200 replacements, got " + std::to_string(stats.replacements));
    }

    // (b) argmax and tie-break invariants of the selector
    {
        auto mk = [](double total) {
            RewardBreakdown b;
            b.total = total;
            return b;
        };
        std::vector<RewardBreakdown> scores = {mk(0.2), mk(0.8), mk(0.5), mk(0.8)};
        if (select_best(scores, 1) != std::vector<int>{1}) fail("argmax selection broke");
        if (select_best(scores, 3) != std::vector<int>{1, 3, 2}) fail("tie-break order broke");
        std::mt19937 gen(8);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<RewardBreakdown> random_scores;
            const int n = 2 + trial % 7;
            for (int i = 0; i < n; ++i) random_scores.push_back(mk(unit(gen)));
            const int best = select_best(random_scores, 1).front();
            for (int i = 0; i < n; ++i) {
                if (random_scores[i].total > random_scores[best].total)
                    fail("argmax missed a higher-scoring candidate");
                if (random_scores[i].total == random_scores[best].total && i < best)
                    fail("tie broke away from the lowest index");
            }
        }
    }

    // (c) monotone_guard: per-record totals never decrease across 5 epochs
    {
        PerturbingStubGenerator gen(77);
        FunctionLlmClient solver([](const std::string&, double) -> std::string {
            throw TransportError("no solver in caption-only scoring");
        });
        RaftConfig config;
        config.n_candidates = 8;
        config.epochs = 5;
        config.policy = SelectionPolicy::MonotoneGuard;
        config.parallelism = hw_threads();
        Dataset subset(dataset.begin(), dataset.begin() + 50);
        RaftResult result =
            run_raft(subset, gen, solver, config, (dir.path / "raft_mono").string());
        if (result.report.epochs.size() != 5) fail("expected 5 epoch reports");
        int decreases = 0;
        for (const auto& [id, trajectory] : result.report.trajectories)
            for (std::size_t e = 1; e < trajectory.size(); ++e)
                if (trajectory[e] < trajectory[e - 1] - kRewardTol) ++decreases;
        if (decreases != 0)
            fail(std::to_string(decreases) + " per-record reward decreases under the guard");
    }

    // (d) frozen replay: selections are idempotent after the first epoch
    {
        Dataset subset(dataset.begin(), dataset.begin() + 20);
        fs::path cand_dir = dir.path / "candidates";
        fs::create_directories(cand_dir);
        for (const auto& record : subset) {
            std::ofstream out(cand_dir / (record.id + ".candidates.txt"));
            out << "A plainly wrong first candidate sentence.\n";
            out << caption_facts(record.facts).flat() << "\n";
            out << "A plainly wrong third candidate sentence.\n";
        }
        ReplayGenerator gen(cand_dir.string());
        FunctionLlmClient solver([](const std::string&, double) -> std::string {
            throw TransportError("no solver in caption-only scoring");
        });
        RaftConfig config;
        config.n_candidates = 3;
        config.epochs = 3;
        config.parallelism = hw_threads();
        RaftResult result =
            run_raft(subset, gen, solver, config, (dir.path / "raft_replay").string());
        if (result.report.epochs.size() != 3) fail("expected 3 epoch reports");
        if (result.report.epochs[0].replacements != 20)
            fail("replay epoch 1 should replace all 20 corrupted captions");
        if (result.report.epochs[1].replacements != 0 ||
            result.report.epochs[2].replacements != 0)
            fail("replay selections changed after epoch 1");
        const std::string sft1 = slurp(result.sft_files[1]);
        const std::string sft2 = slurp(result.sft_files[2]);
        if (sft1 != sft2) fail("SFT files differ between idempotent epochs");
    }

    std::ostringstream detail;
    detail << "stub gold selection, selector invariants, 5-epoch guard, frozen replay; "
           << failures << " failures";
    if (!first_error.empty()) detail << "; first: " << first_error;
    c.detail = detail.str();
    c.ok = failures == 0;
    return c;
}

// ---------------------------------------------------------------- criterion 7

Criterion check_qa_protocol() {
    Criterion c{7, "QA temperature schedule, escalation, budget, and parsing", false, ""};
    int failures = 0;
    std::string first_error;
    auto fail = [&](const std::string& why) {
        ++failures;
        if (first_error.empty()) first_error = why;
    };

    const std::string caption =
        "The diagram contains points A and B. Line segment AB is present. "
        "The length of AB is 1.24.";
    auto response = [](const std::string& q, const std::string& a) {
        return "Generated Question:\n" + q + "\nGenerated Response:\n...\nFinal Answer:\n\\boxed{" +
               a + "}\n";
    };

    // full escalation: None five times, then exhaustion, schedule 0.2 then 0.8 x5
    {
        std::vector<std::string> script(6, response("q", "None"));
        MockLlmClient client(script);
        bool threw = false;
        try {
            generate_qa(caption, client);
        } catch (const RetriesExhaustedError& e) {
            threw = true;
            if (e.budget != 5) fail("budget reported as " + std::to_string(e.budget));
        }
        if (!threw) fail("retry budget did not abort");
        if (client.calls().size() != 6)
            fail("expected 6 calls, saw " + std::to_string(client.calls().size()));
        else {
            if (client.calls()[0].temperature != 0.2) fail("stage-1 temperature drifted");
            for (std::size_t i = 1; i < client.calls().size(); ++i)
                if (client.calls()[i].temperature != 0.8) fail("stage-2 temperature drifted");
        }
    }

    // single None escalates once and succeeds at stage 2
    {
        MockLlmClient client({response("inconsistent", "None"), response("Valid question?", "0.62")});
        QaPair pair = generate_qa(caption, client);
        if (pair.stage_count != 2) fail("escalation consumed the wrong number of calls");
        if (pair.answer_centi != 62) fail("stage-2 answer mangled");
        if (client.calls().size() != 2 || client.calls()[1].temperature != 0.8)
            fail("stage-2 call not issued at 0.8");
    }

    // parse fixtures: numeric, None, malformed
    {
        if (parse_final_answer("\\boxed{12.34}").kind != AnswerKind::Value ||
            parse_final_answer("\\boxed{12.34}").centi != 1234)
            fail("numeric box misparsed");
        if (parse_final_answer("\\boxed{`None'}").kind != AnswerKind::NoneSentinel)
            fail("None box misparsed");
        if (parse_final_answer("\\boxed{\\sqrt{2}}").kind != AnswerKind::ParseFailure)
            fail("malformed box accepted");
        if (parse_final_answer("no box at all").kind != AnswerKind::ParseFailure)
            fail("missing box accepted");
        if (parse_final_answer("\\boxed{1} ... \\boxed{2.00}").centi != 200)
            fail("last-box rule broke");
    }

    std::ostringstream detail;
    detail << "schedule, escalation, budget, parse fixtures; " << failures << " failures";
    if (!first_error.empty()) detail << "; first: " << first_error;
    c.detail = detail.str();
    c.ok = failures == 0;
    return c;
}

// ---------------------------------------------------------------- criterion 8

Criterion check_scale() {
    Criterion c{8, "10,000-record generation under 10 minutes, zero violations", false, ""};
    TempDir dir("geogen-acc8");
    const auto start = Clock::now();

    PipelineConfig config;
    config.count = 10000;
    config.seed = 7777;
    config.threads = hw_threads();
    config.out_dir = dir.path.string();

    GenerateResult result = generate_dataset(config);
    const double gen_elapsed = seconds_since(start);

    auto violations = validate_dataset(result.dataset, config.out_dir);
    const double elapsed = seconds_since(start);

    std::ostringstream detail;
    detail << result.dataset.size() << " records in " << std::fixed << gen_elapsed
           << "s (" << result.stats.failures << " resampled), " << violations.size()
           << " violations, validated by " << elapsed << "s";
    if (!violations.empty()) detail << "; first: " << violations.front();
    c.detail = detail.str();
    c.ok = result.dataset.size() == 10000 && violations.empty() && gen_elapsed < 600.0;
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(check_alignment());
    results.push_back(check_soundness());
    results.push_back(check_determinism());
    results.push_back(check_metric_oracles());
    results.push_back(check_reward_algebra());
    results.push_back(check_raft_selection());
    results.push_back(check_qa_protocol());
    results.push_back(check_scale());

    bool all_ok = true;
    for (const auto& c : results) {
        all_ok = all_ok && c.ok;
        std::printf("%s — criterion %d: %s (%s)\n", c.ok ? "PASS" : "FAIL", c.index,
                    c.name.c_str(), c.detail.c_str());
    }
    std::printf("%s\n", all_ok ? "ACCEPTANCE: ALL CRITERIA PASSED"
                               : "ACCEPTANCE: FAILURES PRESENT");
    return all_ok ? 0 : 1;
}
