#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "geogen/caption.hpp"
#include "geogen/pipeline.hpp"
#include "geogen/render.hpp"

namespace fs = std::filesystem;
using namespace geogen;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value ? value : fallback;
}

DifficultyMix parse_mix(const std::string& text) {
    DifficultyMix mix{0.0, 0.0, 0.0};
    if (text.find(',') == std::string::npos) {
        switch (difficulty_from(text)) {
            case Difficulty::Easy: mix.easy = 1.0; break;
            case Difficulty::Medium: mix.medium = 1.0; break;
            case Difficulty::Hard: mix.hard = 1.0; break;
        }
        return mix;
    }
    std::istringstream in(text);
    std::string part;
    double values[3];
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, part, ',')) throw ConfigError("difficulty mix needs 3 values");
        try {
            values[i] = std::stod(part);
        } catch (const std::exception&) {
            throw ConfigError("bad difficulty mix value '" + part + "'");
        }
    }
    if (std::getline(in, part, ','))
        throw ConfigError("difficulty mix takes at most 3 values");
    mix.easy = values[0];
    mix.medium = values[1];
    mix.hard = values[2];
    mix.validate();
    return mix;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

// precedence: flag > config file > environment; the API key is env-only
HttpLlmConfig http_config(const std::string& flag_endpoint, const std::string& flag_model,
                          const PipelineConfig& config) {
    HttpLlmConfig http;
    http.endpoint = !flag_endpoint.empty() ? flag_endpoint
                                           : env_or("ENDPOINT_URL", "");
    http.model = !flag_model.empty() ? flag_model : env_or("MODEL_NAME", "");
    (void)config;
    http.api_key = env_or("API_KEY", "");
    if (http.endpoint.empty()) throw ConfigError("no endpoint configured (ENDPOINT_URL)");
    if (http.model.empty()) throw ConfigError("no model configured (MODEL_NAME)");
    return http;
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
};

PipelineConfig effective_config(const CommonFlags& common) {
    PipelineConfig config;
    if (!common.config_path.empty()) config = load_pipeline_config(common.config_path);
    if (!common.out_dir.empty()) config.out_dir = common.out_dir;
    return config;
}

void setup_cli(CLI::App& app) {
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------
    {
        auto* cmd = app.add_subcommand("generate", "synthesize scenes, images and captions");
        auto common = std::make_shared<CommonFlags>();
        auto seed = std::make_shared<std::uint64_t>(0);
        auto count = std::make_shared<int>(0);
        auto mix = std::make_shared<std::string>();
        auto threads = std::make_shared<int>(-1);
        auto vary_style = std::make_shared<bool>(false);
        auto shuffle = std::make_shared<bool>(false);
        auto dump_scenes = std::make_shared<bool>(false);
        cmd->add_option("--config", common->config_path, "pipeline config file (JSON)");
        cmd->add_option("--out", common->out_dir, "output directory");
        auto* seed_opt = cmd->add_option("--seed", *seed, "master seed");
        auto* count_opt = cmd->add_option("--count", *count, "number of records");
        cmd->add_option("--difficulty-mix", *mix,
                        "easy,medium,hard proportions or a single tier name");
        auto* threads_opt = cmd->add_option("--threads", *threads, "worker threads (0 = auto)");
        cmd->add_flag("--vary-style", *vary_style, "jitter style per record");
        cmd->add_flag("--shuffle-captions", *shuffle, "shuffle caption sentence order");
        cmd->add_flag("--dump-scenes", *dump_scenes, "write scenes/{id}.scene.json dumps");
        cmd->callback([=] {
            PipelineConfig config = effective_config(*common);
            if (seed_opt->count()) config.seed = *seed;
            if (count_opt->count()) config.count = *count;
            if (!mix->empty()) config.mix = parse_mix(*mix);
            if (threads_opt->count()) config.threads = *threads;
            if (*vary_style) config.vary_style = true;
            if (*shuffle) config.shuffle_captions = true;
            if (*dump_scenes) config.dump_scenes = true;

            GenerateResult result = generate_dataset(config);
            for (const auto& line : result.stats.failure_log) std::cerr << line << "\n";
            std::cout << "wrote " << result.dataset.size() << " records to "
                      << config.out_dir << "/dataset.jsonl (" << result.stats.failures
                      << " failed attempts)\n";
        });
    }

    // ---- render -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("render", "re-render SVGs from scene dumps");
        auto scenes_dir = std::make_shared<std::string>();
        auto files = std::make_shared<std::vector<std::string>>();
        auto out_dir = std::make_shared<std::string>("render_out");
        cmd->add_option("--scenes", *scenes_dir, "directory of *.scene.json dumps");
        cmd->add_option("--out", *out_dir, "output directory");
        cmd->add_option("files", *files, "individual scene dump files");
        cmd->callback([=] {
            std::vector<std::string> inputs = *files;
            if (!scenes_dir->empty())
                for (const auto& entry : fs::directory_iterator(*scenes_dir)) {
                    const std::string name = entry.path().filename().string();
                    if (name.size() > 11 && name.substr(name.size() - 11) == ".scene.json")
                        inputs.push_back(entry.path().string());
                }
            if (inputs.empty()) throw ConfigError("render: no scene dumps given");
            std::sort(inputs.begin(), inputs.end());
            fs::create_directories(*out_dir);
            for (const auto& path : inputs) {
                Scene scene = parse_scene(read_file(path));
                SvgDocument svg = render_svg(scene, extract_facts(scene));
                std::string stem = fs::path(path).filename().string();
                stem = stem.substr(0, stem.size() - 11);
                write_file(fs::path(*out_dir) / (stem + ".svg"), svg.text);
            }
            std::cout << "rendered " << inputs.size() << " scenes to " << *out_dir << "\n";
        });
    }

    // ---- qa -----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("qa", "attach question/answer pairs via an LLM");
        auto common = std::make_shared<CommonFlags>();
        auto dataset_path = std::make_shared<std::string>();
        auto endpoint = std::make_shared<std::string>();
        auto model = std::make_shared<std::string>();
        auto threads = std::make_shared<int>(1);
        cmd->add_option("--dataset", *dataset_path, "input dataset.jsonl")->required();
        cmd->add_option("--config", common->config_path, "pipeline config file (JSON)");
        cmd->add_option("--out", common->out_dir, "output directory")->required();
        cmd->add_option("--endpoint", *endpoint, "chat-completion endpoint URL");
        cmd->add_option("--model", *model, "model name");
        cmd->add_option("--threads", *threads, "concurrent records");
        cmd->callback([=] {
            PipelineConfig config = effective_config(*common);
            auto client = make_http_client(http_config(*endpoint, *model, config));
            Dataset dataset = read_records(*dataset_path);

            QaOutcome outcome = qa_dataset(dataset, *client, config.qa, *threads);

            fs::create_directories(config.out_dir);
            write_records((fs::path(config.out_dir) / "dataset.jsonl").string(),
                          outcome.dataset);
            std::ofstream audit(fs::path(config.out_dir) / "qa_transcripts.jsonl",
                                std::ios::binary);
            for (const auto& t : outcome.transcripts)
                audit << nlohmann::ordered_json{{"temperature", t.temperature},
                                                {"prompt", t.prompt},
                                                {"response", t.response}}
                             .dump()
                      << "\n";
            std::ofstream drops(fs::path(config.out_dir) / "qa_drops.log", std::ios::binary);
            for (const auto& line : outcome.drop_log) drops << line << "\n";
            std::cout << "kept " << outcome.dataset.size() << " of " << dataset.size()
                      << " records (" << outcome.drop_log.size() << " dropped)\n";
        });
    }

    // ---- score ----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("score", "reward one candidate caption (debugging)");
        auto dataset_path = std::make_shared<std::string>();
        auto record_id = std::make_shared<std::string>();
        auto candidate = std::make_shared<std::string>();
        auto candidate_file = std::make_shared<std::string>();
        auto endpoint = std::make_shared<std::string>();
        auto model = std::make_shared<std::string>();
        auto reveal_gold = std::make_shared<bool>(false);
        cmd->add_option("--dataset", *dataset_path, "dataset.jsonl")->required();
        cmd->add_option("--id", *record_id, "record id")->required();
        cmd->add_option("--candidate", *candidate, "candidate caption text");
        cmd->add_option("--candidate-file", *candidate_file, "file holding the candidate");
        cmd->add_option("--endpoint", *endpoint, "chat-completion endpoint URL");
        cmd->add_option("--model", *model, "model name");
        cmd->add_flag("--reveal-gold", *reveal_gold,
                      "show the reference answer to the solver");
        cmd->callback([=] {
            if (candidate->empty() == candidate_file->empty())
                throw ConfigError("score: give exactly one of --candidate/--candidate-file");
            const std::string text =
                candidate->empty() ? read_file(*candidate_file) : *candidate;

            Dataset dataset = read_records(*dataset_path);
            auto it = std::find_if(dataset.begin(), dataset.end(),
                                   [&](const DatasetRecord& r) { return r.id == *record_id; });
            if (it == dataset.end())
                throw ConfigError("score: no record with id '" + *record_id + "'");

            const std::string gold = caption_facts(it->facts).flat();
            nlohmann::ordered_json out;
            if (it->question.empty() || !it->gold_answer_centi) {
                out["rouge"] = rouge_l(text, gold);
                out["bleu"] = bleu4(text, gold);
                RewardWeights weights;
                out["caption"] = caption_reward(text, gold, weights.w_r);
                out["note"] = "record has no qa pair; caption metrics only";
            } else {
                auto client = make_http_client(http_config(*endpoint, *model, {}));
                SolverConfig solver_config;
                solver_config.reveal_gold = *reveal_gold;
                RewardBreakdown b =
                    composite_reward(text, gold, it->question, *it->gold_answer_centi,
                                     *client, RewardWeights{}, solver_config);
                out["total"] = b.total;
                out["reasoning"] = b.reasoning;
                out["caption"] = b.caption;
                out["rouge"] = b.rouge;
                out["bleu"] = b.bleu;
                out["correct"] = b.correct;
                out["formatted"] = b.formatted;
                out["solver_ok"] = b.solver_ok;
                if (b.answer_centi) out["solver_answer"] = centi_text(*b.answer_centi);
            }
            std::cout << out.dump(2) << "\n";
        });
    }

    // ---- raft -----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("raft", "reward-ranked caption refinement loop");
        auto common = std::make_shared<CommonFlags>();
        auto dataset_path = std::make_shared<std::string>();
        auto generator_kind = std::make_shared<std::string>("stub");
        auto replay_dir = std::make_shared<std::string>();
        auto stub_seed = std::make_shared<std::uint64_t>(7);
        auto endpoint = std::make_shared<std::string>();
        auto model = std::make_shared<std::string>();
        auto epochs = std::make_shared<int>(-1);
        auto candidates = std::make_shared<int>(-1);
        auto top_k = std::make_shared<int>(-1);
        auto policy = std::make_shared<std::string>();
        auto parallelism = std::make_shared<int>(-1);
        auto hook = std::make_shared<std::string>();
        auto image_root = std::make_shared<std::string>();
        cmd->add_option("--dataset", *dataset_path, "input dataset.jsonl")->required();
        cmd->add_option("--config", common->config_path, "pipeline config file (JSON)");
        cmd->add_option("--out", common->out_dir, "output directory")->required();
        cmd->add_option("--generator", *generator_kind, "stub | replay | remote");
        cmd->add_option("--replay-dir", *replay_dir, "directory of {id}.candidates.txt");
        cmd->add_option("--stub-seed", *stub_seed, "perturbing-stub seed");
        cmd->add_option("--endpoint", *endpoint, "chat-completion endpoint URL");
        cmd->add_option("--model", *model, "model name");
        cmd->add_option("--epochs", *epochs, "refinement epochs");
        cmd->add_option("--candidates", *candidates, "candidates per record");
        cmd->add_option("--top-k", *top_k, "selections per record");
        cmd->add_option("--policy", *policy, "paper_faithful | monotone_guard");
        cmd->add_option("--parallelism", *parallelism, "records scored concurrently");
        cmd->add_option("--trainer-hook", *hook, "command with {sft_file} and {epoch}");
        cmd->add_option("--image-root", *image_root, "check image files under this root");
        cmd->callback([=] {
            PipelineConfig config = effective_config(*common);
            RaftConfig raft = config.raft;
            if (*epochs > 0) raft.epochs = *epochs;
            if (*candidates > 0) raft.n_candidates = *candidates;
            if (*top_k > 0) raft.top_k = *top_k;
            if (*parallelism > 0) raft.parallelism = *parallelism;
            if (!hook->empty()) raft.trainer_hook = *hook;
            if (!policy->empty()) {
                if (*policy == "paper_faithful") raft.policy = SelectionPolicy::PaperFaithful;
                else if (*policy == "monotone_guard") raft.policy = SelectionPolicy::MonotoneGuard;
                else throw ConfigError("unknown raft policy '" + *policy + "'");
            }

            Dataset dataset = read_records(*dataset_path);

            std::unique_ptr<CaptionGenerator> generator;
            std::unique_ptr<LlmClient> remote_client;
            if (*generator_kind == "stub") {
                generator = std::make_unique<PerturbingStubGenerator>(*stub_seed);
            } else if (*generator_kind == "replay") {
                if (replay_dir->empty()) throw ConfigError("replay generator needs --replay-dir");
                generator = std::make_unique<ReplayGenerator>(*replay_dir);
            } else if (*generator_kind == "remote") {
                remote_client = make_http_client(http_config(*endpoint, *model, config));
                generator = std::make_unique<RemoteGenerator>(*remote_client);
            } else {
                throw ConfigError("unknown generator '" + *generator_kind + "'");
            }

            // records without qa pairs never consult the solver, so an
            // unconfigured endpoint only trips when a solver call is due
            std::unique_ptr<LlmClient> solver;
            try {
                solver = make_http_client(http_config(*endpoint, *model, config));
            } catch (const ConfigError&) {
                solver = std::make_unique<FunctionLlmClient>(
                    [](const std::string&, double) -> std::string {
                        throw TransportError("no solver endpoint configured");
                    });
            }

            std::optional<std::string> root;
            if (!image_root->empty()) root = *image_root;
            RaftResult result =
                run_raft(std::move(dataset), *generator, *solver, raft, config.out_dir, root);

            write_records((fs::path(config.out_dir) / "dataset.jsonl").string(),
                          result.dataset);
            nlohmann::ordered_json report;
            report["epochs"] = nlohmann::ordered_json::array();
            for (const auto& stats : result.report.epochs) {
                nlohmann::ordered_json e{{"epoch", stats.epoch},
                                         {"mean_total", stats.mean_total},
                                         {"max_total", stats.max_total},
                                         {"min_total", stats.min_total},
                                         {"replacements", stats.replacements},
                                         {"failures", stats.failures}};
                e["histogram"] = stats.histogram;
                report["epochs"].push_back(std::move(e));
            }
            report["trajectories"] = nlohmann::ordered_json::object();
            for (const auto& [id, totals] : result.report.trajectories)
                report["trajectories"][id] = totals;
            write_file(fs::path(config.out_dir) / "raft_report.json", report.dump(2) + "\n");

            std::cout << "refined " << result.dataset.size() << " records over "
                      << result.report.epochs.size() << " epochs; report at "
                      << config.out_dir << "/raft_report.json\n";
        });
    }

    // ---- validate ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("validate", "alignment checker over a dataset");
        auto dataset_path = std::make_shared<std::string>();
        auto root = std::make_shared<std::string>();
        cmd->add_option("--dataset", *dataset_path, "dataset.jsonl")->required();
        cmd->add_option("--root", *root, "dataset root (defaults to the dataset's directory)");
        cmd->callback([=] {
            Dataset dataset = read_records(*dataset_path);
            std::string base = root->empty()
                                   ? fs::path(*dataset_path).parent_path().string()
                                   : *root;
            if (base.empty()) base = ".";
            auto violations = validate_dataset(dataset, base);
            for (const auto& line : violations) std::cerr << line << "\n";
            if (!violations.empty())
                throw Error(std::to_string(violations.size()) + " alignment violations");
            std::cout << "ok: " << dataset.size() << " records aligned\n";
        });
    }

    // ---- stats ------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("stats", "difficulty and fact-kind histograms");
        auto dataset_path = std::make_shared<std::string>();
        cmd->add_option("--dataset", *dataset_path, "dataset.jsonl")->required();
        cmd->callback([=] { std::cout << stats_report(read_records(*dataset_path)); });
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic geometry dataset pipeline"};
    setup_cli(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const FailureCapExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
