// radnas: training-free architecture search for radar segmentation networks.
// Subcommands: search, compare, score, gen.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "radnas/graph.hpp"
#include "radnas/report.hpp"
#include "radnas/scorer.hpp"

namespace fs = std::filesystem;
using namespace radnas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSearch = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// Flags override config-file values; the config file is loaded first.
report::RunConfig load_base_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            return report::run_config_from_json(read_file(argv[i + 1]));
        }
    }
    return {};
}

struct CommonOpts {
    std::string algo;
    std::string out;
    std::string config_path;  // consumed by load_base_config; registered so CLI11 accepts it
};

void add_search_options(CLI::App* cmd, report::RunConfig& cfg, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (flags override)");
    cmd->add_option("--algo", opts.algo, "uct|rave|grave|nmcs|random");
    cmd->add_option("--budget", cfg.search.budget, "playout budget");
    cmd->add_option("--seed", cfg.search.seed, "root RNG seed");
    cmd->add_option("--alpha", cfg.search.alpha, "parameter bound");
    cmd->add_option("--k", cfg.search.k, "UCT exploration constant");
    cmd->add_option("--bias", cfg.search.rave_bias, "RAVE bias constant");
    cmd->add_option("--tref", cfg.search.tref, "GRAVE visit threshold");
    cmd->add_option("--level", cfg.search.nmcs_level, "NMCS nesting level");
    cmd->add_option("--playout-width", cfg.search.playout_width, "parallel playouts per leaf");
    cmd->add_option("--batch-size", cfg.scoring.batch_size, "scoring minibatch size");
    cmd->add_option("--input-size", cfg.scoring.input_hw, "square scoring input size");
    cmd->add_option("--macro-r", cfg.scoring.macro.reduction_stages, "encoder depth R");
    cmd->add_option("--normals-per-stage", cfg.scoring.macro.normals_per_stage,
                    "normal cells per stage");
    cmd->add_option("--base-channels", cfg.scoring.macro.base_channels, "input stage width");
    cmd->add_option("--threads", cfg.search.threads, "playout threads (0 = auto)");
    cmd->add_flag("--reuse-tree", cfg.search.reuse_tree, "keep subtree between moves");
    cmd->add_flag("--extended-space", cfg.search.extended_space,
                  "search base channels and cells per stage too");
    cmd->add_option("--seconds-per-move", cfg.search.seconds_per_move,
                    "wall-clock budget per move (enables seconds_per_move mode)");
    cmd->add_option("--out", opts.out, "output directory");
}

void finalize_config(report::RunConfig& cfg, const CommonOpts& opts) {
    if (!opts.algo.empty()) cfg.algorithm = search::algorithm_from_string(opts.algo);
    if (!opts.out.empty()) cfg.out_dir = opts.out;
    if (cfg.search.seconds_per_move > 0.0) {
        cfg.search.budget_mode = search::BudgetMode::seconds_per_move;
    }
    cfg.scoring.alpha = cfg.search.alpha;
    cfg.scoring.seed = cfg.search.seed;
    if (cfg.search.budget < 1 && cfg.search.budget_mode != search::BudgetMode::seconds_per_move) {
        throw CLI::ValidationError("--budget", "budget must be >= 1");
    }
    if (cfg.search.playout_width < 1) {
        throw CLI::ValidationError("--playout-width", "playout width must be >= 1");
    }
    if (cfg.scoring.batch_size < 2) {
        throw CLI::ValidationError("--batch-size", "scoring batch needs at least 2 inputs");
    }
}

search::SearchResult execute_search(const report::RunConfig& cfg, const std::string& out_dir) {
    auto scorer = std::make_shared<search::NaswotScorer>(cfg.scoring);
    std::ofstream log_stream;
    search::PlayoutLogFn log;
    if (!out_dir.empty()) {
        log_stream.open(fs::path(out_dir) / "playouts.ndjson", std::ios::binary);
        if (!log_stream) throw std::runtime_error("cannot write playout log");
        log = [&log_stream](const search::PlayoutRecord& rec) {
            log_stream << report::playout_record_to_json(rec) << "\n";
        };
    }
    return search::run_search(cfg.algorithm, cfg.search, search::make_naswot_scorer(scorer), log);
}

int cmd_search(report::RunConfig cfg) {
    const std::string out_dir = cfg.out_dir.empty() ? "radnas_out" : cfg.out_dir;
    cfg.out_dir = out_dir;
    fs::create_directories(out_dir);
    const search::SearchResult result = execute_search(cfg, out_dir);

    write_file((fs::path(out_dir) / "result.json").string(),
               report::search_result_to_json(result, cfg));
    arch::ArchState best;
    best.extended = cfg.search.extended_space;
    best.decisions = result.best_decisions;
    const arch::ArchitectureSpec spec = arch::build_spec(best, cfg.scoring.macro);
    // Architecture document plus a provenance block (ignored by the parser).
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(arch::serialize_spec(spec));
    doc["provenance"] = nlohmann::ordered_json::parse(report::run_config_to_json(cfg));
    write_file((fs::path(out_dir) / "best_arch.json").string(), doc.dump(2) + "\n");

    std::printf("algorithm: %s\n", search::to_string(result.algorithm));
    std::printf("params: %lld\n", result.best_params);
    if (std::isfinite(result.best_raw)) {
        std::printf("raw_score: %.6f\n", result.best_raw);
    } else {
        std::printf("raw_score: degenerate\n");
    }
    std::printf("reward: %.6f\n", result.best_reward);
    std::printf("violated: %s\n", result.violated ? "true" : "false");
    std::printf("playouts: %lld\n", result.playouts_done);
    std::printf("wrote %s\n", (fs::path(out_dir) / "result.json").string().c_str());
    return kExitOk;
}

int cmd_compare(report::RunConfig cfg, const std::string& algos_csv, int n_seeds) {
    if (n_seeds < 1) throw CLI::ValidationError("--seeds", "need at least one seed");
    std::vector<search::Algorithm> algos;
    std::stringstream ss(algos_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) algos.push_back(search::algorithm_from_string(tok));
    }
    if (algos.empty()) throw CLI::ValidationError("--algos", "no algorithms given");

    const std::string out_dir = cfg.out_dir.empty() ? "radnas_compare" : cfg.out_dir;
    fs::create_directories(out_dir);

    std::vector<report::CompareRow> rows;
    for (const auto algorithm : algos) {
        for (int i = 0; i < n_seeds; ++i) {
            report::RunConfig run = cfg;
            run.algorithm = algorithm;
            // Paired seeds: run i uses the same scoring batch for every
            // algorithm, so comparisons are on equal footing.
            run.search.seed = derive_seed(cfg.search.seed, static_cast<std::uint64_t>(i));
            run.scoring.seed = run.search.seed;
            const search::SearchResult result = execute_search(run, "");
            rows.push_back(report::CompareRow{search::to_string(algorithm), run.search.seed,
                                              result.best_params, result.best_raw,
                                              result.violated, result.playouts_done,
                                              result.wall_ms});
            std::printf("%-6s seed %d/%d params=%lld raw=%s%s\n", search::to_string(algorithm),
                        i + 1, n_seeds, result.best_params,
                        std::isfinite(result.best_raw)
                            ? std::to_string(result.best_raw).c_str()
                            : "degenerate",
                        result.violated ? " [violated]" : "");
        }
    }
    write_file((fs::path(out_dir) / "compare.csv").string(), report::compare_rows_to_csv(rows));
    const std::string summary = report::compare_summary_to_csv(rows);
    write_file((fs::path(out_dir) / "summary.csv").string(), summary);
    write_file((fs::path(out_dir) / "resolved_config.json").string(),
               report::run_config_to_json(cfg));
    std::printf("\n%s", summary.c_str());
    return kExitOk;
}

int cmd_score(report::RunConfig cfg, const std::string& arch_path) {
    const arch::ArchitectureSpec spec = arch::deserialize_spec(read_file(arch_path));
    cfg.scoring.macro = spec.macro;
    const search::NaswotScorer scorer(cfg.scoring);

    const long long params = arch::count_params(spec);
    const fwd::NetworkInstance net = fwd::init_network(spec, cfg.scoring.input_hw,
                                                       cfg.scoring.input_hw,
                                                       derive_seed(cfg.search.seed, 0x696e6974ull));
    const fwd::ForwardResult fr = fwd::forward(net, scorer.batch());
    const naswot::HammingKernel kernel = naswot::hamming_kernel(fr.codes);
    const double raw = naswot::naswot_score(kernel);

    std::printf("params: %lld\n", params);
    std::printf("n_a: %lld\n", net.n_a);
    std::printf("kernel (%dx%d):\n", kernel.n, kernel.n);
    for (int a = 0; a < kernel.n; ++a) {
        for (int b = 0; b < kernel.n; ++b) {
            std::printf("%s%.0f", b ? " " : "  ", kernel.at(a, b));
        }
        std::printf("\n");
    }
    if (std::isfinite(raw)) {
        std::printf("raw_score: %.6f\n", raw);
    } else {
        std::printf("raw_score: degenerate\n");
    }
    std::printf("alpha: %lld (%s)\n", cfg.scoring.alpha,
                params > cfg.scoring.alpha ? "violated" : "within bound");
    return kExitOk;
}

int cmd_gen(report::RunConfig cfg, const std::string& scenarios_csv, int count) {
    if (count < 1) throw CLI::ValidationError("--count", "need at least one sample");
    std::vector<int> ids;
    std::stringstream ss(scenarios_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) ids.push_back(std::stoi(tok));
    }
    if (ids.empty()) throw CLI::ValidationError("--scenarios", "no scenarios given");

    const std::string out_dir = cfg.out_dir.empty() ? "radnas_data" : cfg.out_dir;
    fs::create_directories(out_dir);

    sim::GenConfig gen;
    gen.height = cfg.scoring.input_hw;
    gen.width = cfg.scoring.input_hw;
    std::vector<sim::RangeDopplerSample> samples;
    nlohmann::ordered_json manifest;
    manifest["config"] = nlohmann::ordered_json::parse(report::run_config_to_json(cfg));
    manifest["samples"] = nlohmann::ordered_json::array();
    for (int i = 0; i < count; ++i) {
        const sim::Scenario& sc = sim::scenario_by_id(ids[i % ids.size()]);
        const std::uint64_t seed = derive_seed(cfg.search.seed, static_cast<std::uint64_t>(i));
        samples.push_back(sim::generate_sample(sc, seed, gen));
        manifest["samples"].push_back(nlohmann::ordered_json{
            {"scenario", sc.id}, {"seed", seed}, {"n_targets", samples.back().n_targets}});
    }
    sim::write_batch_file(samples, (fs::path(out_dir) / "samples.rdsb").string());
    write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    std::printf("wrote %d samples to %s\n", count, out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo architecture search with training-free scoring"};
    app.require_subcommand(1);

    report::RunConfig base;
    try {
        base = load_base_config(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    report::RunConfig cfg_search = base, cfg_compare = base, cfg_score = base, cfg_gen = base;
    CommonOpts o_search, o_compare, o_score, o_gen;

    auto* search_cmd = app.add_subcommand("search", "run one architecture search");
    add_search_options(search_cmd, cfg_search, o_search);

    auto* compare_cmd =
        app.add_subcommand("compare", "run several algorithms under equal budgets");
    add_search_options(compare_cmd, cfg_compare, o_compare);
    std::string algos_csv = "random,uct,rave,grave,nmcs";
    int n_seeds = 5;
    compare_cmd->add_option("--algos", algos_csv, "comma-separated algorithm list");
    compare_cmd->add_option("--seeds", n_seeds, "seeds per algorithm");

    auto* score_cmd = app.add_subcommand("score", "score one architecture document");
    add_search_options(score_cmd, cfg_score, o_score);
    std::string arch_path;
    score_cmd->add_option("--arch", arch_path, "architecture JSON document")->required();

    auto* gen_cmd = app.add_subcommand("gen", "generate synthetic range-Doppler samples");
    add_search_options(gen_cmd, cfg_gen, o_gen);
    std::string scenarios_csv = "1,2,3,4,5,6,7,8,9,10";
    int count = 16;
    gen_cmd->add_option("--scenarios", scenarios_csv, "comma-separated scenario ids");
    gen_cmd->add_option("--count", count, "number of samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (search_cmd->parsed()) {
            finalize_config(cfg_search, o_search);
            return cmd_search(cfg_search);
        }
        if (compare_cmd->parsed()) {
            finalize_config(cfg_compare, o_compare);
            return cmd_compare(cfg_compare, algos_csv, n_seeds);
        }
        if (score_cmd->parsed()) {
            finalize_config(cfg_score, o_score);
            return cmd_score(cfg_score, arch_path);
        }
        if (gen_cmd->parsed()) {
            finalize_config(cfg_gen, o_gen);
            return cmd_gen(cfg_gen, scenarios_csv, count);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitConfig;
    } catch (const arch::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        if (msg.find("cannot") == 0 || msg.find("write") != std::string::npos) {
            std::fprintf(stderr, "io error: %s\n", msg.c_str());
            return kExitIo;
        }
        std::fprintf(stderr, "search error: %s\n", msg.c_str());
        return kExitSearch;
    }
    return kExitConfig;
}
