#include "doctest.h"
#include "geogen/caption.hpp"
#include "geogen/raft.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace geogen;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("geogen-raft-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// independent copy of the FNV-1a hash, for cross-checking the gold slot
std::uint64_t fnv1a_oracle(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

FactSet simple_facts() {
    FactSet facts;
    facts.push_back(PresentFact{{"a", "b"}});
    facts.push_back(SegmentLengthFact{Segment::canonical("a", "b"), 124});
    return facts;
}

DatasetRecord make_record(const std::string& id) {
    DatasetRecord r;
    r.id = id;
    r.image_path = "images/" + id + ".svg";
    r.facts = simple_facts();
    r.caption = caption_facts(r.facts).flat();
    r.seed = 11;
    return r;
}

RewardBreakdown with_total(double total) {
    RewardBreakdown b;
    b.total = total;
    return b;
}

// counting solver double: returns a fixed boxed answer
class CountingSolver : public LlmClient {
  public:
    explicit CountingSolver(std::string answer) : answer_(std::move(answer)) {}
    std::string complete(const std::string&, double) override {
        ++calls_;
        return "\\boxed{" + answer_ + "}";
    }
    int calls() const { return calls_.load(); }

  private:
    std::string answer_;
    std::atomic<int> calls_{0};
};

}  // namespace

TEST_CASE("select_best ranks by total with stable ties") {
    std::vector<RewardBreakdown> scores = {with_total(0.2), with_total(0.8), with_total(0.5)};
    CHECK(select_best(scores, 1) == std::vector<int>{1});
    CHECK(select_best(scores, 2) == std::vector<int>{1, 2});
    CHECK(select_best(scores, 3) == std::vector<int>{1, 2, 0});
    // k beyond the candidate count clamps
    CHECK(select_best(scores, 10) == std::vector<int>{1, 2, 0});

    std::vector<RewardBreakdown> tie = {with_total(0.5), with_total(0.5), with_total(0.1)};
    CHECK(select_best(tie, 1) == std::vector<int>{0});
    CHECK(select_best(tie, 2) == std::vector<int>{0, 1});
}

TEST_CASE("raft config validation") {
    RaftConfig config;
    config.validate();

    RaftConfig bad = config;
    bad.top_k = 9;  // > n_candidates
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.n_candidates = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.epochs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.parallelism = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.weights.lambda_r = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("stub generator plants the gold caption in a hashed slot") {
    PerturbingStubGenerator gen(42);
    for (const char* id : {"g000001", "g000002", "g000017", "g000404"}) {
        DatasetRecord record = make_record(id);
        const std::string gold = caption_facts(record.facts).flat();
        const int n = 8;
        auto candidates = gen.generate(record, n);
        REQUIRE(static_cast<int>(candidates.size()) == n);

        const int slot = static_cast<int>(fnv1a_oracle(id) % n);
        CHECK(candidates[slot] == gold);
        for (int i = 0; i < n; ++i)
            if (i != slot) CHECK(candidates[i] != gold);

        // deterministic
        CHECK(gen.generate(record, n) == candidates);
    }

    // a single slot must carry gold
    DatasetRecord record = make_record("g000009");
    auto only = gen.generate(record, 1);
    REQUIRE(only.size() == 1);
    CHECK(only[0] == caption_facts(record.facts).flat());

    CHECK_THROWS_AS(gen.generate(record, 0), ConfigError);
}

TEST_CASE("stub generator versioning keeps the gold slot across reloads") {
    PerturbingStubGenerator gen(7);
    DatasetRecord record = make_record("g000033");
    const std::string gold = caption_facts(record.facts).flat();
    auto before = gen.generate(record, 6);
    gen.reload();
    CHECK(gen.version() == 1);
    auto after = gen.generate(record, 6);
    const int slot = static_cast<int>(fnv1a_oracle("g000033") % 6);
    CHECK(before[slot] == gold);
    CHECK(after[slot] == gold);
    for (int i = 0; i < 6; ++i) CHECK((after[i] == gold) == (i == slot));
}

TEST_CASE("one epoch restores corrupted captions to gold") {
    Dataset dataset;
    for (int i = 1; i <= 4; ++i) {
        DatasetRecord r = make_record("g00000" + std::to_string(i));
        r.caption += " The figure is sketched freehand.";  // corrupt the incumbent
        dataset.push_back(r);
    }

    PerturbingStubGenerator gen(42);
    CountingSolver solver("1.00");
    RaftConfig config;
    config.epochs = 1;

    auto [refined, stats] = refine_epoch(dataset, gen, solver, config, 1);
    REQUIRE(refined.size() == dataset.size());
    for (const auto& record : refined)
        CHECK(record.caption == caption_facts(record.facts).flat());

    CHECK(stats.epoch == 1);
    CHECK(stats.replacements == 4);
    CHECK(stats.failures == 0);
    // caption-only scoring of the gold candidate: (1 - 0.7) * 1.0
    CHECK(stats.mean_total == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(stats.max_total == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(stats.min_total == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(stats.histogram[3] == 4);

    // a caption-only dataset never touches the solver
    CHECK(solver.calls() == 0);

    // reward history was appended
    for (const auto& record : refined) {
        REQUIRE(record.reward_history.size() == 1);
        CHECK(record.reward_history[0].epoch == 1);
        CHECK(record.reward_history[0].total == doctest::Approx(0.3).epsilon(1e-12));
    }
}

TEST_CASE("records with QA fields are scored through the solver") {
    Dataset dataset;
    DatasetRecord r = make_record("g000001");
    r.question = "What is twice the length of AB?";
    r.gold_answer_centi = 248;
    dataset.push_back(r);

    PerturbingStubGenerator gen(42);
    CountingSolver solver("2.48");  // always correct
    RaftConfig config;

    auto [refined, stats] = refine_epoch(dataset, gen, solver, config, 1);
    CHECK(solver.calls() == config.n_candidates);
    CHECK(stats.failures == 0);
    // gold candidate: reasoning 1, caption 1 -> total 1
    CHECK(stats.max_total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(refined[0].caption == caption_facts(r.facts).flat());
    REQUIRE(refined[0].reward_history.size() == 1);
    CHECK(refined[0].reward_history[0].correct);
}

TEST_CASE("monotone guard refuses weaker candidates") {
    TempDir dir;
    Dataset dataset;
    DatasetRecord r = make_record("g000001");
    dataset.push_back(r);  // incumbent caption is already gold

    {
        std::ofstream out(dir.file("g000001.candidates.txt"));
        out << "A wrong description of some other figure.\n";
        out << "Another unrelated sentence entirely.\n";
    }
    ReplayGenerator gen(dir.path.string());
    CountingSolver solver("1.00");
    RaftConfig config;
    config.n_candidates = 2;
    config.policy = SelectionPolicy::MonotoneGuard;

    auto [refined, stats] = refine_epoch(dataset, gen, solver, config, 1);
    CHECK(stats.replacements == 0);
    CHECK(refined[0].caption == r.caption);
    // history still records the incumbent's score for the audit trail
    REQUIRE(refined[0].reward_history.size() == 1);
    CHECK(refined[0].reward_history[0].total == doctest::Approx(0.3).epsilon(1e-12));

    // the faithful policy takes the best candidate even when it is worse
    RaftConfig faithful = config;
    faithful.policy = SelectionPolicy::PaperFaithful;
    auto [forced, fstats] = refine_epoch(dataset, gen, solver, faithful, 1);
    CHECK(fstats.replacements == 1);
    CHECK(forced[0].caption != r.caption);
}

TEST_CASE("short or missing candidate files fail the record, not the epoch") {
    TempDir dir;
    Dataset dataset;
    dataset.push_back(make_record("g000001"));
    dataset.push_back(make_record("g000002"));
    {
        std::ofstream out(dir.file("g000001.candidates.txt"));
        out << caption_facts(simple_facts()).flat() << "\n";
        out << "Second candidate line.\n";
        out << "Third candidate line.\n";
    }
    // g000002 has no file at all

    ReplayGenerator gen(dir.path.string());
    CountingSolver solver("1.00");
    RaftConfig config;
    config.n_candidates = 3;

    auto [refined, stats] = refine_epoch(dataset, gen, solver, config, 1);
    CHECK(stats.failures == 1);
    CHECK(refined[1].caption == dataset[1].caption);    // carried forward
    CHECK(refined[1].reward_history.empty());           // not scored
    CHECK(refined[0].reward_history.size() == 1);       // the healthy record ran

    // the typed error reports have/want counts
    try {
        gen.generate(dataset[1], 3);
        FAIL("expected ShortCandidateFileError");
    } catch (const ShortCandidateFileError& e) {
        CHECK(std::string(e.what()).find("0 lines, need 3") != std::string::npos);
    }
    try {
        gen.generate(dataset[0], 5);
        FAIL("expected ShortCandidateFileError");
    } catch (const ShortCandidateFileError& e) {
        CHECK(std::string(e.what()).find("3 lines, need 5") != std::string::npos);
    }
}

TEST_CASE("frozen replay is idempotent from the second epoch on") {
    TempDir dir;
    Dataset dataset;
    dataset.push_back(make_record("g000001"));
    dataset[0].caption += " An extra remark to replace.";  // start off gold
    {
        std::ofstream out(dir.file("g000001.candidates.txt"));
        out << "The diagram contains points A and B. Line segment AB is present.\n";
        out << caption_facts(simple_facts()).flat() << "\n";
    }
    ReplayGenerator gen(dir.path.string());
    CountingSolver solver("1.00");
    RaftConfig config;
    config.n_candidates = 2;
    config.epochs = 3;

    RaftResult result = run_raft(dataset, gen, solver, config, dir.file("out"));
    REQUIRE(result.report.epochs.size() == 3);
    CHECK(result.report.epochs[0].replacements == 1);  // gold beats the truncation
    CHECK(result.report.epochs[1].replacements == 0);
    CHECK(result.report.epochs[2].replacements == 0);
    CHECK(result.dataset[0].caption == caption_facts(simple_facts()).flat());

    // per-epoch SFT files: same content once the selection stabilizes
    REQUIRE(result.sft_files.size() == 3);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    CHECK(slurp(result.sft_files[0]) == slurp(result.sft_files[1]));
    CHECK(slurp(result.sft_files[1]) == slurp(result.sft_files[2]));

    // trajectories track every epoch
    REQUIRE(result.report.trajectories.count("g000001") == 1);
    CHECK(result.report.trajectories.at("g000001").size() == 3);
}

TEST_CASE("sft files are id-ordered and image-checked") {
    TempDir dir;
    Dataset dataset;
    dataset.push_back(make_record("g000009"));
    dataset.push_back(make_record("g000001"));
    dataset.push_back(make_record("g000005"));

    const std::string path = dir.file("sft.jsonl");
    emit_sft_file(dataset, path);

    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].find("g000001") != std::string::npos);
    CHECK(lines[1].find("g000005") != std::string::npos);
    CHECK(lines[2].find("g000009") != std::string::npos);
    auto j = nlohmann::ordered_json::parse(lines[0]);
    CHECK(j["image_path"] == "images/g000001.svg");
    CHECK(j["caption"] == dataset[1].caption);

    // re-emitting is byte-stable
    const std::string path2 = dir.file("sft2.jsonl");
    emit_sft_file(dataset, path2);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    std::string ta((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string tb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(ta == tb);

    // with an image root, missing files are named in the error
    try {
        emit_sft_file(dataset, dir.file("sft3.jsonl"), dir.path.string());
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("g000001") != std::string::npos);
    }

    // create the images and the same call succeeds
    fs::create_directories(dir.path / "images");
    for (const auto& r : dataset) {
        std::ofstream img(dir.path / r.image_path);
        img << "<svg/>";
    }
    emit_sft_file(dataset, dir.file("sft3.jsonl"), dir.path.string());
}

TEST_CASE("trainer hook runs per epoch with substituted slots") {
    TempDir dir;
    Dataset dataset;
    dataset.push_back(make_record("g000001"));

    PerturbingStubGenerator gen(1);
    CountingSolver solver("1.00");
    RaftConfig config;
    config.n_candidates = 2;
    config.epochs = 2;
    const std::string log = dir.file("hook.log");
    config.trainer_hook = "echo epoch={epoch} file={sft_file} >> " + log;

    RaftResult result = run_raft(dataset, gen, solver, config, dir.file("out"));
    std::ifstream in(log);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].find("epoch=1") != std::string::npos);
    CHECK(lines[0].find("sft_epoch_1.jsonl") != std::string::npos);
    CHECK(lines[1].find("epoch=2") != std::string::npos);
    CHECK(lines[1].find(result.sft_files[1]) != std::string::npos);
}

TEST_CASE("a failing trainer hook aborts but keeps artifacts") {
    TempDir dir;
    Dataset dataset;
    dataset.push_back(make_record("g000001"));

    PerturbingStubGenerator gen(1);
    CountingSolver solver("1.00");
    RaftConfig config;
    config.n_candidates = 2;
    config.epochs = 2;
    config.trainer_hook = "exit 7";

    CHECK_THROWS_AS(run_raft(dataset, gen, solver, config, dir.file("out")),
                    HookFailureError);
    CHECK(fs::exists(dir.path / "out" / "sft_epoch_1.jsonl"));
    CHECK_FALSE(fs::exists(dir.path / "out" / "sft_epoch_2.jsonl"));
}

TEST_CASE("parallel scoring matches serial scoring") {
    Dataset dataset;
    for (int i = 1; i <= 9; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "g%06d", i);
        DatasetRecord r = make_record(id);
        r.caption += " An extra remark to replace.";
        dataset.push_back(r);
    }
    PerturbingStubGenerator gen(5);
    CountingSolver solver("1.00");
    RaftConfig serial;
    serial.parallelism = 1;
    RaftConfig parallel = serial;
    parallel.parallelism = 4;

    auto [a, sa] = refine_epoch(dataset, gen, solver, serial, 1);
    auto [b, sb] = refine_epoch(dataset, gen, solver, parallel, 1);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].caption == b[i].caption);
    }
    CHECK(sa.replacements == sb.replacements);
    CHECK(sa.mean_total == doctest::Approx(sb.mean_total).epsilon(1e-12));
    CHECK(sa.histogram == sb.histogram);
}
