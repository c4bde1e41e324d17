#include "radnas/scorer.hpp"

#include "radnas/graph.hpp"
#include "radnas/rng.hpp"

namespace radnas::search {

namespace {

std::string memo_key(const arch::ArchState& state) {
    std::string key;
    key.reserve(state.decisions.size() + 1);
    key.push_back(state.extended ? 'x' : 'd');
    for (int m : state.decisions) key.push_back(static_cast<char>('0' + m));
    return key;
}

}  // namespace

NaswotScorer::NaswotScorer(ScoringConfig cfg) : cfg_(std::move(cfg)) {
    sim::GenConfig gen;
    gen.height = cfg_.input_hw;
    gen.width = cfg_.input_hw;
    std::vector<sim::Scenario> scenarios;
    scenarios.reserve(cfg_.scenario_ids.size());
    for (int id : cfg_.scenario_ids) scenarios.push_back(sim::scenario_by_id(id));
    batch_ = sim::make_batch(scenarios, cfg_.batch_size, derive_seed(cfg_.seed, 0x62617463ull),
                             gen);
    init_seed_ = derive_seed(cfg_.seed, 0x696e6974ull);
}

RawScore NaswotScorer::score_spec(const arch::ArchitectureSpec& spec) const {
    RawScore result;
    result.params = arch::count_params(spec);
    if (result.params > cfg_.alpha) {
        result.violated = true;
        result.raw = naswot::kScoreSentinel;
        return result;
    }
    const fwd::NetworkInstance net =
        fwd::init_network(spec, cfg_.input_hw, cfg_.input_hw, init_seed_);
    const fwd::ForwardResult fr = fwd::forward(net, batch_);
    result.raw = naswot::naswot_score(naswot::hamming_kernel(fr.codes));
    return result;
}

RawScore NaswotScorer::operator()(const arch::ArchState& terminal) const {
    const std::string key = memo_key(terminal);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    const RawScore result = score_spec(arch::build_spec(terminal, cfg_.macro));
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo_.emplace(key, result);
    }
    return result;
}

LeafScorer make_naswot_scorer(std::shared_ptr<const NaswotScorer> scorer) {
    return [scorer](const arch::ArchState& terminal) { return (*scorer)(terminal); };
}

}  // namespace radnas::search
