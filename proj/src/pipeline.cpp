#include "geogen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "geogen/caption.hpp"
#include "geogen/render.hpp"

namespace geogen {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string record_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "g%06d", index);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> sorted_tags(const FactSet& facts) {
    std::vector<std::string> tags;
    tags.reserve(facts.size());
    for (const auto& fact : facts) tags.push_back(fact_tag(fact));
    std::sort(tags.begin(), tags.end());
    return tags;
}

// thrown only through the per-record failure accounting below
struct AlignmentViolation : Error {
    using Error::Error;
};

}  // namespace

void DifficultyMix::validate() const {
    if (easy < 0 || medium < 0 || hard < 0)
        throw ConfigError("difficulty mix proportions must be non-negative");
    if (std::abs(easy + medium + hard - 1.0) > 1e-9)
        throw ConfigError("difficulty mix proportions must sum to 1");
}

Difficulty DifficultyMix::pick(Rng& rng) const {
    const double u = rng.uniform();
    if (u < easy) return Difficulty::Easy;
    if (u < easy + medium) return Difficulty::Medium;
    return Difficulty::Hard;
}

void PipelineConfig::validate() const {
    if (count < 1) throw ConfigError("count must be >= 1");
    if (failure_cap < 0.0 || failure_cap > 1.0)
        throw ConfigError("failure_cap must lie in [0, 1]");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (qa.stage2_budget < 1) throw ConfigError("qa stage2_budget must be >= 1");
    if (qa.stage1_temperature < 0 || qa.stage1_temperature > 2 ||
        qa.stage2_temperature < 0 || qa.stage2_temperature > 2)
        throw ConfigError("qa temperatures must lie in [0, 2]");
    mix.validate();
    style.validate();
    weights.validate();
    raft.validate();
}

namespace {

double number_field(const ordered_json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("config key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

int int_field(const ordered_json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError("config key '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

bool bool_field(const ordered_json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean())
        throw ConfigError("config key '" + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

std::string string_field(const ordered_json& j, const std::string& key,
                         const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string())
        throw ConfigError("config key '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

void reject_unknown(const ordered_json& j, const std::string& scope,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return key == k;
            }) == known.end())
            throw ConfigError("unknown config key '" + scope + key + "'");
    }
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    ordered_json j;
    try {
        j = ordered_json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

    reject_unknown(j, "", {"count", "seed", "out_dir", "difficulty_mix", "vary_style",
                           "shuffle_captions", "dump_scenes", "failure_cap", "threads",
                           "style", "weights", "qa", "raft"});

    PipelineConfig config;
    config.count = int_field(j, "count", config.count);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            throw ConfigError("config key 'seed' must be an integer");
        config.seed = j.at("seed").get<std::uint64_t>();
    }
    config.out_dir = string_field(j, "out_dir", config.out_dir);
    config.vary_style = bool_field(j, "vary_style", config.vary_style);
    config.shuffle_captions = bool_field(j, "shuffle_captions", config.shuffle_captions);
    config.dump_scenes = bool_field(j, "dump_scenes", config.dump_scenes);
    config.failure_cap = number_field(j, "failure_cap", config.failure_cap);
    config.threads = int_field(j, "threads", config.threads);

    if (j.contains("difficulty_mix")) {
        const auto& m = j.at("difficulty_mix");
        reject_unknown(m, "difficulty_mix.", {"easy", "medium", "hard"});
        config.mix.easy = number_field(m, "easy", 0.0);
        config.mix.medium = number_field(m, "medium", 0.0);
        config.mix.hard = number_field(m, "hard", 0.0);
    }
    if (j.contains("style")) {
        const auto& s = j.at("style");
        reject_unknown(s, "style.",
                       {"canvas_size", "margin", "segment_width", "annotation_width",
                        "point_radius", "font_size", "tick_len", "tick_spacing",
                        "arc_base", "arc_step", "square_size", "triangle_size",
                        "label_offset", "dash_pattern"});
        config.style.canvas_size = int_field(s, "canvas_size", config.style.canvas_size);
        config.style.margin = number_field(s, "margin", config.style.margin);
        config.style.segment_width =
            number_field(s, "segment_width", config.style.segment_width);
        config.style.annotation_width =
            number_field(s, "annotation_width", config.style.annotation_width);
        config.style.point_radius = number_field(s, "point_radius", config.style.point_radius);
        config.style.font_size = number_field(s, "font_size", config.style.font_size);
        config.style.tick_len = number_field(s, "tick_len", config.style.tick_len);
        config.style.tick_spacing = number_field(s, "tick_spacing", config.style.tick_spacing);
        config.style.arc_base = number_field(s, "arc_base", config.style.arc_base);
        config.style.arc_step = number_field(s, "arc_step", config.style.arc_step);
        config.style.square_size = number_field(s, "square_size", config.style.square_size);
        config.style.triangle_size =
            number_field(s, "triangle_size", config.style.triangle_size);
        config.style.label_offset = number_field(s, "label_offset", config.style.label_offset);
        config.style.dash_pattern = string_field(s, "dash_pattern", config.style.dash_pattern);
    }
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        reject_unknown(w, "weights.", {"lambda_r", "s_c", "w_r"});
        config.weights.lambda_r = number_field(w, "lambda_r", config.weights.lambda_r);
        config.weights.s_c = number_field(w, "s_c", config.weights.s_c);
        config.weights.w_r = number_field(w, "w_r", config.weights.w_r);
    }
    if (j.contains("qa")) {
        const auto& q = j.at("qa");
        reject_unknown(q, "qa.",
                       {"stage1_temperature", "stage2_temperature", "stage2_budget"});
        config.qa.stage1_temperature =
            number_field(q, "stage1_temperature", config.qa.stage1_temperature);
        config.qa.stage2_temperature =
            number_field(q, "stage2_temperature", config.qa.stage2_temperature);
        config.qa.stage2_budget = int_field(q, "stage2_budget", config.qa.stage2_budget);
    }
    if (j.contains("raft")) {
        const auto& r = j.at("raft");
        reject_unknown(r, "raft.",
                       {"n_candidates", "top_k", "epochs", "policy", "parallelism",
                        "trainer_hook"});
        config.raft.n_candidates = int_field(r, "n_candidates", config.raft.n_candidates);
        config.raft.top_k = int_field(r, "top_k", config.raft.top_k);
        config.raft.epochs = int_field(r, "epochs", config.raft.epochs);
        config.raft.parallelism = int_field(r, "parallelism", config.raft.parallelism);
        config.raft.trainer_hook = string_field(r, "trainer_hook", config.raft.trainer_hook);
        const std::string policy = string_field(r, "policy", "paper_faithful");
        if (policy == "paper_faithful")
            config.raft.policy = SelectionPolicy::PaperFaithful;
        else if (policy == "monotone_guard")
            config.raft.policy = SelectionPolicy::MonotoneGuard;
        else
            throw ConfigError("unknown raft policy '" + policy + "'");
    }
    config.raft.weights = config.weights;

    config.validate();
    return config;
}

namespace {

struct Built {
    bool ok = false;
    std::string error;
    DatasetRecord record;
    std::string svg;
    std::string scene_json;
};

Built build_record(const PipelineConfig& config, int index) {
    Built out;
    try {
        const std::uint64_t rec_seed = mix64(config.seed, static_cast<std::uint64_t>(index) + 1);
        Rng pick_rng(mix64(rec_seed, 0xD1FFull));
        const Difficulty difficulty = config.mix.pick(pick_rng);

        SampledScene sampled = generate_scene(difficulty, rec_seed);
        FactSet facts = extract_facts(sampled.scene);

        const StyleConfig style =
            config.vary_style ? sample_style(mix64(rec_seed, 0x5771ull)) : config.style;
        std::optional<std::uint64_t> shuffle;
        if (config.shuffle_captions) shuffle = mix64(rec_seed, 0xCAFull);
        const std::string caption = caption_facts(facts, shuffle).flat();

        SvgDocument svg = render_svg(sampled.scene, facts, style);

        // alignment invariant, enforced on every record before it is admitted
        auto rendered = svg_fact_tags(svg.text);
        std::sort(rendered.begin(), rendered.end());
        if (rendered != sorted_tags(facts))
            throw AlignmentViolation("SVG fact groups do not match extracted facts");
        if (!fact_sets_equal(parse_caption(caption), facts))
            throw AlignmentViolation("caption does not parse back to extracted facts");

        const std::string id = record_id(index);
        out.record.id = id;
        out.record.image_path = "images/" + id + ".svg";
        out.record.caption = caption;
        out.record.facts = std::move(facts);
        out.record.difficulty = difficulty;
        out.record.seed = rec_seed;
        out.svg = std::move(svg.text);
        if (config.dump_scenes) out.scene_json = serialize_scene(sampled.scene);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

GenerateResult generate_dataset(const PipelineConfig& config) {
    config.validate();

    const fs::path root = config.out_dir;
    fs::create_directories(root / "images");
    if (config.dump_scenes) fs::create_directories(root / "scenes");

    const int allowed =
        static_cast<int>(std::floor(config.failure_cap * config.count));
    int workers = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, config.count));

    std::vector<Built> built(static_cast<std::size_t>(config.count));
    if (workers == 1) {
        for (int i = 0; i < config.count; ++i)
            built[static_cast<std::size_t>(i)] = build_record(config, i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < config.count; i = next.fetch_add(1))
                    built[static_cast<std::size_t>(i)] = build_record(config, i);
            });
        for (auto& t : pool) t.join();
    }

    GenerateResult result;
    result.stats.requested = config.count;
    auto admit = [&](Built& b) {
        ++result.stats.per_difficulty[static_cast<int>(b.record.difficulty)];
        write_text_file(root / b.record.image_path, b.svg);
        if (config.dump_scenes)
            write_text_file(root / "scenes" / (b.record.id + ".scene.json"), b.scene_json);
        result.dataset.push_back(std::move(b.record));
    };
    auto reject = [&](const Built& b, int index) {
        ++result.stats.failures;
        result.stats.failure_log.push_back("record " + record_id(index) + ": " + b.error);
        if (result.stats.failures > allowed)
            throw FailureCapExceededError(result.stats.failures, allowed);
    };

    for (int i = 0; i < config.count; ++i) {
        result.stats.attempted++;
        if (built[static_cast<std::size_t>(i)].ok) admit(built[static_cast<std::size_t>(i)]);
        else reject(built[static_cast<std::size_t>(i)], i);
    }
    // replacement draws for the skipped slots, so the dataset still holds
    // `count` records unless the cap aborts first
    for (int cursor = config.count; static_cast<int>(result.dataset.size()) < config.count;
         ++cursor) {
        result.stats.attempted++;
        Built extra = build_record(config, cursor);
        if (extra.ok) admit(extra);
        else reject(extra, cursor);
    }

    write_records((root / "dataset.jsonl").string(), result.dataset);
    return result;
}

QaOutcome qa_dataset(const Dataset& dataset, LlmClient& client, const QaConfig& config,
                     int threads) {
    struct PerRecord {
        bool kept = false;
        bool transport = false;
        DatasetRecord record;
        std::string drop_line;
        std::string transport_error;
        std::vector<Transcript> transcripts;
    };
    std::vector<PerRecord> slots(dataset.size());

    auto process = [&](std::size_t i) {
        PerRecord& slot = slots[i];
        slot.record = dataset[i];
        try {
            QaPair qa = generate_qa(slot.record.caption, client, config);
            slot.record.question = qa.question;
            slot.record.gold_answer_centi = qa.answer_centi;
            slot.transcripts = std::move(qa.transcripts);
            slot.kept = true;
        } catch (const RetriesExhaustedError& e) {
            slot.drop_line = slot.record.id + ": " + e.what();
        } catch (const TransportError& e) {
            slot.transport = true;
            slot.transport_error = e.what();
        }
    };

    const int workers =
        std::max(1, std::min<int>(threads, static_cast<int>(dataset.size())));
    if (workers == 1) {
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

    QaOutcome outcome;
    for (auto& slot : slots) {
        if (slot.transport) throw TransportError(slot.transport_error);
        if (slot.kept) {
            outcome.dataset.push_back(std::move(slot.record));
            for (auto& t : slot.transcripts) outcome.transcripts.push_back(std::move(t));
        } else {
            outcome.drop_log.push_back(std::move(slot.drop_line));
        }
    }
    return outcome;
}

std::vector<std::string> validate_dataset(const Dataset& dataset,
                                          const std::string& dataset_root) {
    std::vector<std::string> violations;
    std::set<std::string> seen_ids;
    for (const auto& record : dataset) {
        if (!seen_ids.insert(record.id).second)
            violations.push_back("record " + record.id + ": duplicate id");

        const fs::path image = fs::path(dataset_root) / record.image_path;
        std::ifstream in(image, std::ios::binary);
        if (!in) {
            violations.push_back("record " + record.id + ": missing image " + image.string());
        } else {
            std::stringstream buffer;
            buffer << in.rdbuf();
            auto rendered = svg_fact_tags(buffer.str());
            std::sort(rendered.begin(), rendered.end());
            if (rendered != sorted_tags(record.facts))
                violations.push_back("record " + record.id +
                                     ": SVG fact groups do not match the fact list");
        }

        try {
            if (!fact_sets_equal(parse_caption(record.caption), record.facts))
                violations.push_back("record " + record.id +
                                     ": caption facts do not match the fact list");
        } catch (const Error& e) {
            violations.push_back("record " + record.id + ": caption unparsable: " + e.what());
        }
    }
    return violations;
}

std::string stats_report(const Dataset& dataset) {
    std::map<std::string, int> kind_counts;
    int per_difficulty[3] = {0, 0, 0};
    int with_qa = 0;
    std::size_t caption_chars = 0;
    int max_epoch = 0;
    for (const auto& record : dataset) {
        ++per_difficulty[static_cast<int>(record.difficulty)];
        if (!record.question.empty()) ++with_qa;
        caption_chars += record.caption.size();
        for (const auto& fact : record.facts) {
            std::string tag = fact_tag(fact);
            kind_counts[tag.substr(0, tag.find_first_of("#@"))]++;
        }
        for (const auto& summary : record.reward_history)
            max_epoch = std::max(max_epoch, summary.epoch);
    }

    std::ostringstream out;
    out << "records: " << dataset.size() << "\n";
    out << "difficulty: easy " << per_difficulty[0] << ", medium " << per_difficulty[1]
        << ", hard " << per_difficulty[2] << "\n";
    out << "with qa: " << with_qa << "\n";
    out << "raft epochs recorded: " << max_epoch << "\n";
    if (!dataset.empty())
        out << "mean caption length: "
            << static_cast<std::size_t>(caption_chars / dataset.size()) << " chars\n";
    out << "fact kinds:\n";
    for (const auto& [kind, count] : kind_counts)
        out << "  " << kind << ": " << count << "\n";
    return out.str();
}

}  // namespace geogen
