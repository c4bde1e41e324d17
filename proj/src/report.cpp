#include "radnas/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <json.hpp>

namespace radnas::report {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* budget_mode_name(search::BudgetMode mode) {
    switch (mode) {
        case search::BudgetMode::total_playouts: return "total_playouts";
        case search::BudgetMode::playouts_per_move: return "playouts_per_move";
        case search::BudgetMode::seconds_per_move: return "seconds_per_move";
    }
    return "?";
}

search::BudgetMode budget_mode_from_name(const std::string& name) {
    if (name == "total_playouts") return search::BudgetMode::total_playouts;
    if (name == "playouts_per_move") return search::BudgetMode::playouts_per_move;
    if (name == "seconds_per_move") return search::BudgetMode::seconds_per_move;
    throw arch::ParseError("unknown budget mode: " + name);
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["algorithm"] = search::to_string(cfg.algorithm);
    j["seed"] = cfg.search.seed;
    j["budget"] = cfg.search.budget;
    j["budget_mode"] = budget_mode_name(cfg.search.budget_mode);
    j["seconds_per_move"] = cfg.search.seconds_per_move;
    j["k"] = cfg.search.k;
    j["bias"] = cfg.search.rave_bias;
    j["tref"] = cfg.search.tref;
    j["level"] = cfg.search.nmcs_level;
    j["playout_width"] = cfg.search.playout_width;
    j["alpha"] = cfg.search.alpha;
    j["reuse_tree"] = cfg.search.reuse_tree;
    j["threads"] = cfg.search.threads;
    j["extended_space"] = cfg.search.extended_space;
    j["batch_size"] = cfg.scoring.batch_size;
    j["input_size"] = cfg.scoring.input_hw;
    j["scenarios"] = cfg.scoring.scenario_ids;
    j["macro"] = ordered_json{{"R", cfg.scoring.macro.reduction_stages},
                              {"normals_per_stage", cfg.scoring.macro.normals_per_stage},
                              {"base_channels", cfg.scoring.macro.base_channels},
                              {"in_channels", cfg.scoring.macro.in_channels}};
    j["out"] = cfg.out_dir;
    return j;
}

// -inf (the degenerate-kernel sentinel) has no JSON representation; use null.
ordered_json raw_to_json(double raw) {
    if (!std::isfinite(raw)) return nullptr;
    return raw;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

RunConfig run_config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw arch::ParseError(std::string("run config: ") + e.what());
    }
    try {
        RunConfig cfg;
        if (j.contains("algorithm")) {
            cfg.algorithm = search::algorithm_from_string(j["algorithm"].get<std::string>());
        }
        auto& s = cfg.search;
        s.seed = j.value("seed", s.seed);
        s.budget = j.value("budget", s.budget);
        if (j.contains("budget_mode")) {
            s.budget_mode = budget_mode_from_name(j["budget_mode"].get<std::string>());
        }
        s.seconds_per_move = j.value("seconds_per_move", s.seconds_per_move);
        s.k = j.value("k", s.k);
        s.rave_bias = j.value("bias", s.rave_bias);
        s.tref = j.value("tref", s.tref);
        s.nmcs_level = j.value("level", s.nmcs_level);
        s.playout_width = j.value("playout_width", s.playout_width);
        s.alpha = j.value("alpha", s.alpha);
        s.reuse_tree = j.value("reuse_tree", s.reuse_tree);
        s.threads = j.value("threads", s.threads);
        s.extended_space = j.value("extended_space", s.extended_space);
        auto& sc = cfg.scoring;
        sc.batch_size = j.value("batch_size", sc.batch_size);
        sc.input_hw = j.value("input_size", sc.input_hw);
        if (j.contains("scenarios")) sc.scenario_ids = j["scenarios"].get<std::vector<int>>();
        if (j.contains("macro")) {
            const auto& m = j["macro"];
            sc.macro.reduction_stages = m.value("R", sc.macro.reduction_stages);
            sc.macro.normals_per_stage = m.value("normals_per_stage", sc.macro.normals_per_stage);
            sc.macro.base_channels = m.value("base_channels", sc.macro.base_channels);
            sc.macro.in_channels = m.value("in_channels", sc.macro.in_channels);
        }
        sc.alpha = s.alpha;
        sc.seed = s.seed;
        cfg.out_dir = j.value("out", cfg.out_dir);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw arch::ParseError(std::string("run config: ") + e.what());
    }
}

std::string search_result_to_json(const search::SearchResult& result, const RunConfig& cfg) {
    ordered_json j;
    j["algorithm"] = search::to_string(result.algorithm);
    j["seed"] = result.seed;
    j["config"] = config_json(cfg);
    ordered_json best;
    best["decisions"] = result.best_decisions;
    best["params"] = result.best_params;
    best["raw_score"] = raw_to_json(result.best_raw);
    best["reward"] = result.best_reward;
    best["violated"] = result.violated;
    j["best"] = best;
    j["playouts_done"] = result.playouts_done;
    ordered_json commits = ordered_json::array();
    for (const auto& c : result.commits) {
        commits.push_back(ordered_json{
            {"phase", c.phase}, {"move", c.move}, {"playouts_used", c.playouts_used}});
    }
    j["commits"] = commits;
    j["normalizer"] = ordered_json{{"min", raw_to_json(result.normalizer.lo)},
                                   {"max", raw_to_json(result.normalizer.hi)},
                                   {"observed", result.normalizer.observed}};
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["timing"] = ordered_json{
        {"wall_ms", result.wall_ms},
        {"written_unix_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    return j.dump(2) + "\n";
}

std::string playout_record_to_json(const search::PlayoutRecord& rec) {
    ordered_json j;
    j["playout_id"] = rec.playout_id;
    j["move_prefix"] = rec.move_prefix;
    j["params"] = rec.params;
    j["raw_score"] = raw_to_json(rec.raw);
    j["reward"] = rec.reward;
    j["violated"] = rec.violated;
    return j.dump();
}

std::string compare_rows_to_csv(const std::vector<CompareRow>& rows) {
    std::string csv = "algorithm,seed,best_params,best_raw_score,violated,playouts,wall_ms\n";
    for (const auto& r : rows) {
        csv += r.algorithm + "," + std::to_string(r.seed) + "," + std::to_string(r.best_params) +
               "," + (std::isfinite(r.best_raw) ? std::to_string(r.best_raw) : "") + "," +
               (r.violated ? "1" : "0") + "," + std::to_string(r.playouts) + "," +
               std::to_string(r.wall_ms) + "\n";
    }
    return csv;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::string compare_summary_to_csv(const std::vector<CompareRow>& rows) {
    std::map<std::string, std::vector<const CompareRow*>> grouped;
    for (const auto& r : rows) grouped[r.algorithm].push_back(&r);
    std::string csv = "algorithm,median_best_params,median_best_raw_score,runs,violations\n";
    // Fixed presentation order: random first, then the tree searches.
    const std::vector<std::string> order = {"random", "uct", "rave", "grave", "nmcs"};
    for (const auto& name : order) {
        auto it = grouped.find(name);
        if (it == grouped.end()) continue;
        std::vector<double> params, raws;
        long long violations = 0;
        for (const CompareRow* r : it->second) {
            params.push_back(static_cast<double>(r->best_params));
            if (std::isfinite(r->best_raw)) raws.push_back(r->best_raw);
            violations += r->violated ? 1 : 0;
        }
        csv += name + "," + std::to_string(static_cast<long long>(median(params))) + "," +
               std::to_string(median(raws)) + "," + std::to_string(it->second.size()) + "," +
               std::to_string(violations) + "\n";
    }
    return csv;
}

}  // namespace radnas::report
