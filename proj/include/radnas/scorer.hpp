#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "radnas/arch.hpp"
#include "radnas/network.hpp"
#include "radnas/radarsim.hpp"
#include "radnas/search.hpp"

namespace radnas::search {

// Everything needed to turn a terminal decision sequence into a raw score:
// the macro skeleton, the scoring minibatch and the parameter bound.
struct ScoringConfig {
    arch::MacroConfig macro;
    int input_hw = 128;           // square scoring input
    int batch_size = 16;
    long long alpha = 120441;
    std::vector<int> scenario_ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::uint64_t seed = 0;       // batch generation + weight init streams
};

// Deterministic, thread-safe leaf scorer: parameter check first (violations
// are never instantiated), then NASWOT on the expanded network at random
// initialization. Identical terminal states always produce identical scores
// within a run; a small memo keyed by the decision sequence avoids repeats.
class NaswotScorer {
public:
    explicit NaswotScorer(ScoringConfig cfg);

    RawScore operator()(const arch::ArchState& terminal) const;

    const fwd::Tensor4& batch() const { return batch_; }
    const ScoringConfig& config() const { return cfg_; }

    // Scores one already-built spec (used by the score command).
    RawScore score_spec(const arch::ArchitectureSpec& spec) const;

private:
    ScoringConfig cfg_;
    fwd::Tensor4 batch_;
    std::uint64_t init_seed_;
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<std::string, RawScore> memo_;
};

// Convenience adapter: a LeafScorer closure over a shared NaswotScorer.
LeafScorer make_naswot_scorer(std::shared_ptr<const NaswotScorer> scorer);

}  // namespace radnas::search
