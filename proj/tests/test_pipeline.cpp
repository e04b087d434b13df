#include "doctest.h"
#include "geogen/caption.hpp"
#include "geogen/construct.hpp"
#include "geogen/pipeline.hpp"
#include "geogen/render.hpp"

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
               ("geogen-pipe-" + std::to_string(::getpid()) + "-" +
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

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

std::string good_response(const std::string& question, const std::string& answer) {
    return "Generated Question:\n" + question +
           "\nGenerated Response:\nWorking...\nFinal Answer:\n\\boxed{" + answer + "}\n";
}

}  // namespace

TEST_CASE("difficulty mix validation and sampling") {
    DifficultyMix mix;
    mix.validate();  // default 0.3/0.4/0.3

    DifficultyMix bad;
    bad.easy = -0.1;
    bad.medium = 0.6;
    bad.hard = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    DifficultyMix off;
    off.easy = 0.5;
    off.medium = 0.5;
    off.hard = 0.5;
    CHECK_THROWS_AS(off.validate(), ConfigError);

    DifficultyMix all_easy;
    all_easy.easy = 1.0;
    all_easy.medium = 0.0;
    all_easy.hard = 0.0;
    all_easy.validate();
    Rng rng(99);
    for (int i = 0; i < 50; ++i) CHECK(all_easy.pick(rng) == Difficulty::Easy);
}

TEST_CASE("pipeline config validation") {
    PipelineConfig config;
    config.validate();

    PipelineConfig bad = config;
    bad.count = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.failure_cap = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.threads = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.qa.stage2_budget = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("generate_dataset is reproducible byte for byte") {
    TempDir a, b;
    PipelineConfig config;
    config.count = 6;
    config.seed = 123;
    config.vary_style = true;
    config.shuffle_captions = true;
    config.dump_scenes = true;
    config.threads = 2;

    config.out_dir = a.file("out");
    GenerateResult first = generate_dataset(config);
    config.out_dir = b.file("out");
    GenerateResult second = generate_dataset(config);

    CHECK(first.stats.requested == 6);
    CHECK(static_cast<int>(first.dataset.size()) == 6);
    CHECK(first.stats.per_difficulty[0] + first.stats.per_difficulty[1] +
              first.stats.per_difficulty[2] ==
          6);

    CHECK(slurp(fs::path(a.file("out")) / "dataset.jsonl") ==
          slurp(fs::path(b.file("out")) / "dataset.jsonl"));
    for (const auto& record : first.dataset) {
        CHECK(slurp(fs::path(a.file("out")) / record.image_path) ==
              slurp(fs::path(b.file("out")) / record.image_path));
        CHECK(slurp(fs::path(a.file("out")) / "scenes" / (record.id + ".scene.json")) ==
              slurp(fs::path(b.file("out")) / "scenes" / (record.id + ".scene.json")));
    }

    // ids are positional
    CHECK(first.dataset[0].id == "g000000");
    CHECK(first.dataset[5].id == "g000005");

    // scene dumps are self-reproducing: replaying the recorded history with
    // the recorded construction seed rebuilds the exact coordinates
    for (const auto& record : first.dataset) {
        Scene scene =
            parse_scene(slurp(fs::path(a.file("out")) / "scenes" / (record.id + ".scene.json")));
        Scene replay = construct_scene(scene.history, scene.seed);
        REQUIRE(replay.points.size() == scene.points.size());
        for (std::size_t i = 0; i < scene.points.size(); ++i) {
            CHECK(replay.points[i].first == scene.points[i].first);
            CHECK(replay.points[i].second.x() == scene.points[i].second.x());
            CHECK(replay.points[i].second.y() == scene.points[i].second.y());
        }
    }

    // the shipped dataset validates clean
    CHECK(validate_dataset(first.dataset, a.file("out")).empty());

    // and reading the JSONL back gives the same records
    Dataset loaded = read_records((fs::path(a.file("out")) / "dataset.jsonl").string());
    REQUIRE(loaded.size() == first.dataset.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].id == first.dataset[i].id);
        CHECK(loaded[i].caption == first.dataset[i].caption);
        CHECK(fact_sets_equal(loaded[i].facts, first.dataset[i].facts));
    }
}

TEST_CASE("an all-easy mix yields only easy records") {
    TempDir dir;
    PipelineConfig config;
    config.count = 5;
    config.seed = 7;
    config.mix.easy = 1.0;
    config.mix.medium = 0.0;
    config.mix.hard = 0.0;
    config.out_dir = dir.file("out");
    GenerateResult result = generate_dataset(config);
    CHECK(result.stats.per_difficulty[0] == 5);
    for (const auto& record : result.dataset) CHECK(record.difficulty == Difficulty::Easy);
}

TEST_CASE("config files load, reject unknown keys, and propagate weights") {
    TempDir dir;
    const std::string path = dir.file("config.json");
    {
        std::ofstream out(path);
        out << R"({
            "count": 25,
            "seed": 99,
            "out_dir": "somewhere",
            "vary_style": true,
            "difficulty_mix": {"easy": 0.5, "medium": 0.25, "hard": 0.25},
            "style": {"canvas_size": 640, "font_size": 13.5},
            "weights": {"lambda_r": 0.6, "s_c": 0.8, "w_r": 0.5},
            "qa": {"stage2_budget": 3},
            "raft": {"n_candidates": 4, "policy": "monotone_guard"}
        })";
    }
    PipelineConfig config = load_pipeline_config(path);
    CHECK(config.count == 25);
    CHECK(config.seed == 99);
    CHECK(config.out_dir == "somewhere");
    CHECK(config.vary_style);
    CHECK(config.mix.easy == 0.5);
    CHECK(config.style.canvas_size == 640);
    CHECK(config.style.font_size == 13.5);
    CHECK(config.weights.lambda_r == 0.6);
    CHECK(config.qa.stage2_budget == 3);
    CHECK(config.raft.n_candidates == 4);
    CHECK(config.raft.policy == SelectionPolicy::MonotoneGuard);
    // the reward weights flow into the raft stage
    CHECK(config.raft.weights.lambda_r == 0.6);
    CHECK(config.raft.weights.s_c == 0.8);

    {
        std::ofstream out(path);
        out << R"({"count": 5, "colour_scheme": "neon"})";
    }
    CHECK_THROWS_AS(load_pipeline_config(path), ConfigError);

    {
        std::ofstream out(path);
        out << R"({"style": {"canvas_sizes": 640}})";
    }
    CHECK_THROWS_AS(load_pipeline_config(path), ConfigError);

    {
        std::ofstream out(path);
        out << R"({"raft": {"policy": "harmonic"}})";
    }
    CHECK_THROWS_AS(load_pipeline_config(path), ConfigError);

    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_pipeline_config(path), ConfigError);

    CHECK_THROWS_AS(load_pipeline_config(dir.file("missing.json")), ConfigError);
}

TEST_CASE("qa_dataset keeps successes and drops exhausted records") {
    Dataset dataset;
    for (int i = 0; i < 2; ++i) {
        DatasetRecord r;
        r.id = "g00000" + std::to_string(i);
        r.image_path = "images/" + r.id + ".svg";
        r.facts.push_back(PresentFact{{"a", "b"}});
        r.caption = caption_facts(r.facts).flat();
        dataset.push_back(r);
    }

    SUBCASE("both records succeed") {
        MockLlmClient client({
            good_response("Question one?", "1.00"),
            good_response("Inconsistent", "None"),
            good_response("Question two?", "2.00"),
        });
        QaOutcome outcome = qa_dataset(dataset, client, QaConfig{});
        REQUIRE(outcome.dataset.size() == 2);
        CHECK(outcome.dataset[0].question == "Question one?");
        REQUIRE(outcome.dataset[0].gold_answer_centi.has_value());
        CHECK(*outcome.dataset[0].gold_answer_centi == 100);
        CHECK(outcome.dataset[1].question == "Question two?");
        REQUIRE(outcome.dataset[1].gold_answer_centi.has_value());
        CHECK(*outcome.dataset[1].gold_answer_centi == 200);
        CHECK(outcome.drop_log.empty());
        CHECK(outcome.transcripts.size() == 3);
    }

    SUBCASE("an exhausted record is dropped, the rest survive") {
        std::vector<std::string> script(6, good_response("q", "None"));
        script.push_back(good_response("Question two?", "2.00"));
        MockLlmClient client(script);
        QaOutcome outcome = qa_dataset(dataset, client, QaConfig{});
        REQUIRE(outcome.dataset.size() == 1);
        CHECK(outcome.dataset[0].id == "g000001");
        REQUIRE(outcome.drop_log.size() == 1);
        CHECK(outcome.drop_log[0].find("g000000") != std::string::npos);
    }

    SUBCASE("every record exhausting leaves an empty dataset") {
        std::vector<std::string> script(12, good_response("q", "None"));
        MockLlmClient client(script);
        QaOutcome outcome = qa_dataset(dataset, client, QaConfig{});
        CHECK(outcome.dataset.empty());
        CHECK(outcome.drop_log.size() == 2);
    }

    SUBCASE("transport errors abort the stage") {
        FunctionLlmClient broken([](const std::string&, double) -> std::string {
            throw TransportError("endpoint down");
        });
        CHECK_THROWS_AS(qa_dataset(dataset, broken, QaConfig{}), TransportError);
    }
}

TEST_CASE("validate_dataset pinpoints corruptions") {
    TempDir dir;
    PipelineConfig config;
    config.count = 3;
    config.seed = 55;
    config.out_dir = dir.file("out");
    GenerateResult result = generate_dataset(config);
    REQUIRE(validate_dataset(result.dataset, config.out_dir).empty());

    SUBCASE("caption drift") {
        Dataset corrupted = result.dataset;
        corrupted[1].caption += " Angle ABC measures 60 degrees.";
        auto violations = validate_dataset(corrupted, config.out_dir);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find(corrupted[1].id) != std::string::npos);
        CHECK(violations[0].find("caption") != std::string::npos);
    }

    SUBCASE("unparsable caption") {
        Dataset corrupted = result.dataset;
        corrupted[0].caption += " Gibberish that matches no template.";
        auto violations = validate_dataset(corrupted, config.out_dir);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("unparsable") != std::string::npos);
    }

    SUBCASE("missing image") {
        fs::remove(fs::path(config.out_dir) / result.dataset[2].image_path);
        auto violations = validate_dataset(result.dataset, config.out_dir);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("missing image") != std::string::npos);
    }

    SUBCASE("tampered SVG") {
        const fs::path image = fs::path(config.out_dir) / result.dataset[0].image_path;
        std::string svg = slurp(image);
        const std::string needle = "data-fact=\"";
        const std::size_t pos = svg.find(needle);
        REQUIRE(pos != std::string::npos);
        svg.insert(pos + needle.size(), "PointPresent@zz");  // corrupt the first tag
        std::ofstream out(image, std::ios::binary);
        out << svg;
        out.close();
        auto violations = validate_dataset(result.dataset, config.out_dir);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("SVG fact groups") != std::string::npos);
    }

    SUBCASE("duplicate ids") {
        Dataset corrupted = result.dataset;
        corrupted[2].id = corrupted[0].id;  // image/caption stay aligned
        auto violations = validate_dataset(corrupted, config.out_dir);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("duplicate id") != std::string::npos);
    }
}

TEST_CASE("stats_report summarizes the dataset") {
    TempDir dir;
    PipelineConfig config;
    config.count = 4;
    config.seed = 21;
    config.out_dir = dir.file("out");
    GenerateResult result = generate_dataset(config);

    const std::string report = stats_report(result.dataset);
    CHECK(report.find("records: 4") != std::string::npos);
    CHECK(report.find("difficulty: easy ") != std::string::npos);
    CHECK(report.find("with qa: 0") != std::string::npos);
    CHECK(report.find("fact kinds:") != std::string::npos);
    CHECK(report.find("PointPresent") != std::string::npos);

    CHECK(stats_report({}).find("records: 0") != std::string::npos);
}
