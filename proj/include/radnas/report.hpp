#pragma once

#include <string>
#include <vector>

#include "radnas/scorer.hpp"
#include "radnas/search.hpp"

namespace radnas::report {

// Fully resolved run configuration; embedded into every output artifact.
struct RunConfig {
    search::Algorithm algorithm = search::Algorithm::uct;
    search::SearchConfig search;
    search::ScoringConfig scoring;
    std::string out_dir;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

// SearchResult as a stable-field-order JSON document. Volatile data
// (wall-clock, timestamps) lives under the top-level "timing" key so two
// runs of the same seed compare byte-identical after dropping that key.
std::string search_result_to_json(const search::SearchResult& result, const RunConfig& cfg);

// One NDJSON line per playout.
std::string playout_record_to_json(const search::PlayoutRecord& rec);

struct CompareRow {
    std::string algorithm;
    std::uint64_t seed = 0;
    long long best_params = 0;
    double best_raw = 0.0;
    bool violated = false;
    long long playouts = 0;
    double wall_ms = 0.0;
};

std::string compare_rows_to_csv(const std::vector<CompareRow>& rows);
// Per-algorithm medians of best_params and best_raw (layout mirrors the
// per-algorithm comparison table of the CLI's compare command).
std::string compare_summary_to_csv(const std::vector<CompareRow>& rows);

}  // namespace radnas::report
