#include "doctest.h"
#include "geogen/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace geogen;
using nlohmann::ordered_json;

namespace {

DatasetRecord sample_record() {
    DatasetRecord r;
    r.id = "g000007";
    r.image_path = "images/g000007.svg";
    r.caption = "The diagram contains points A and B. Line segment AB is present.";
    r.question = "What is the length?";
    r.gold_answer_centi = 124;
    r.facts.push_back(PresentFact{{"a", "b"}});
    r.facts.push_back(SegmentLengthFact{Segment::canonical("a", "b"), 124});
    r.difficulty = Difficulty::Medium;
    r.seed = 0xDEADBEEFull;
    RewardSummary s;
    s.epoch = 2;
    s.total = 0.85;
    s.reasoning = 1.0;
    s.caption = 0.5;
    s.correct = true;
    s.formatted = true;
    s.answer_centi = 124;
    r.reward_history.push_back(s);
    return r;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("geogen-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("record JSON puts version first and keeps field order") {
    ordered_json j = record_to_json(sample_record());
    std::vector<std::string> keys;
    for (const auto& [key, value] : j.items()) {
        (void)value;
        keys.push_back(key);
    }
    const std::vector<std::string> want = {"version", "id",         "image_path",
                                           "caption", "question",   "gold_answer",
                                           "facts",   "difficulty", "seed",
                                           "reward_history"};
    CHECK(keys == want);
    CHECK(j["version"] == 1);
    CHECK(j["gold_answer"] == "1.24");
    CHECK(j["difficulty"] == "medium");
    CHECK(j["reward_history"][0]["answer"] == "1.24");
}

TEST_CASE("records round-trip through JSONL") {
    TempDir dir;
    Dataset dataset;
    dataset.push_back(sample_record());

    DatasetRecord bare;
    bare.id = "g000008";
    bare.image_path = "images/g000008.svg";
    bare.caption = "The diagram contains no labeled points.";
    bare.seed = 3;
    dataset.push_back(bare);  // question empty, gold null, no history

    const std::string path = dir.file("data.jsonl");
    write_records(path, dataset);
    Dataset loaded = read_records(path);
    REQUIRE(loaded.size() == 2);

    CHECK(loaded[0].id == dataset[0].id);
    CHECK(loaded[0].image_path == dataset[0].image_path);
    CHECK(loaded[0].caption == dataset[0].caption);
    CHECK(loaded[0].question == dataset[0].question);
    REQUIRE(loaded[0].gold_answer_centi.has_value());
    CHECK(*loaded[0].gold_answer_centi == 124);
    CHECK(fact_sets_equal(loaded[0].facts, dataset[0].facts));
    CHECK(loaded[0].difficulty == Difficulty::Medium);
    CHECK(loaded[0].seed == 0xDEADBEEFull);
    REQUIRE(loaded[0].reward_history.size() == 1);
    CHECK(loaded[0].reward_history[0].epoch == 2);
    CHECK(loaded[0].reward_history[0].total == 0.85);
    CHECK(loaded[0].reward_history[0].correct);
    REQUIRE(loaded[0].reward_history[0].answer_centi.has_value());
    CHECK(*loaded[0].reward_history[0].answer_centi == 124);

    CHECK(loaded[1].question.empty());
    CHECK_FALSE(loaded[1].gold_answer_centi.has_value());
    CHECK(loaded[1].reward_history.empty());

    // byte-stable rewrite
    const std::string again = dir.file("again.jsonl");
    write_records(again, loaded);
    std::ifstream a(path), b(again);
    std::string ta((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string tb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(ta == tb);
}

TEST_CASE("unknown fields ride along in extras") {
    TempDir dir;
    const std::string path = dir.file("extras.jsonl");
    {
        ordered_json j = record_to_json(sample_record());
        j["annotator"] = "alice";
        j["quality"] = 0.9;
        std::ofstream out(path);
        out << j.dump() << "\n";
    }
    Dataset loaded = read_records(path);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].extras["annotator"] == "alice");
    CHECK(loaded[0].extras["quality"] == 0.9);

    write_records(path, loaded);
    Dataset reread = read_records(path);
    CHECK(reread[0].extras["annotator"] == "alice");
}

TEST_CASE("schema violations carry line and field") {
    TempDir dir;
    auto write_line = [&](const std::string& text) {
        const std::string path = dir.file("bad.jsonl");
        std::ofstream out(path);
        out << text << "\n";
        return path;
    };
    auto expect_violation = [&](const std::string& line_text, std::size_t line,
                                const std::string& field) {
        const std::string path = write_line(line_text);
        try {
            read_records(path);
            FAIL("expected SchemaViolationError for field " << field);
        } catch (const SchemaViolationError& e) {
            CHECK(e.line == line);
            CHECK(e.field == field);
        }
    };

    ordered_json good = record_to_json(sample_record());

    ordered_json no_id = good;
    no_id.erase("id");
    expect_violation(no_id.dump(), 1, "id");

    ordered_json bad_gold = good;
    bad_gold["gold_answer"] = "1.2";
    expect_violation(bad_gold.dump(), 1, "gold_answer");

    ordered_json gold_number = good;
    gold_number["gold_answer"] = 1.24;
    expect_violation(gold_number.dump(), 1, "gold_answer");

    ordered_json bad_difficulty = good;
    bad_difficulty["difficulty"] = "impossible";
    expect_violation(bad_difficulty.dump(), 1, "difficulty");

    ordered_json bad_facts = good;
    bad_facts["facts"] = ordered_json::array({ordered_json{{"kind", "Mystery"}}});
    expect_violation(bad_facts.dump(), 1, "facts");

    ordered_json bad_seed = good;
    bad_seed["seed"] = "ten";
    expect_violation(bad_seed.dump(), 1, "seed");

    expect_violation("this is not json", 1, "-");

    // the reported line number is 1-based and skips blank lines correctly
    const std::string path = dir.file("multi.jsonl");
    {
        std::ofstream out(path);
        out << good.dump() << "\n\n" << "broken {" << "\n";
    }
    try {
        read_records(path);
        FAIL("expected SchemaViolationError");
    } catch (const SchemaViolationError& e) {
        CHECK(e.line == 3);
        CHECK(e.field == "-");
    }
}

TEST_CASE("empty and missing files") {
    TempDir dir;
    const std::string path = dir.file("empty.jsonl");
    {
        std::ofstream out(path);
    }
    CHECK(read_records(path).empty());
    CHECK_THROWS_AS(read_records(dir.file("nope.jsonl")), IoError);
}

TEST_CASE("difficulty names round-trip") {
    CHECK(difficulty_name(Difficulty::Easy) == std::string("easy"));
    CHECK(difficulty_name(Difficulty::Medium) == std::string("medium"));
    CHECK(difficulty_name(Difficulty::Hard) == std::string("hard"));
    CHECK(difficulty_from("easy") == Difficulty::Easy);
    CHECK(difficulty_from("medium") == Difficulty::Medium);
    CHECK(difficulty_from("hard") == Difficulty::Hard);
    CHECK_THROWS_AS(difficulty_from("brutal"), ConfigError);
}
