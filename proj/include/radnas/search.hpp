#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "radnas/arch.hpp"
#include "radnas/naswot.hpp"
#include "radnas/rng.hpp"

namespace radnas::search {

enum class Algorithm : int { uct, rave, grave, nmcs, random };
enum class Variant : int { uct, rave, grave };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

enum class BudgetMode : int {
    total_playouts,     // default: budget = playouts for the whole search
    playouts_per_move,  // budget = playouts per committed move
    seconds_per_move,   // wall-clock parity mode; not deterministic
};

struct SearchConfig {
    double k = 0.4;            // UCT exploration constant
    double rave_bias = 1e-5;   // b~ in the RAVE beta
    int tref = 30;             // GRAVE ancestor-visit threshold
    int nmcs_level = 1;
    int playout_width = 8;     // leaf parallelization width
    long long budget = 300;
    BudgetMode budget_mode = BudgetMode::total_playouts;
    double seconds_per_move = 0.0;
    long long alpha = 120441;  // parameter bound (echoed into results; enforced by the scorer)
    std::uint64_t seed = 0;
    bool reuse_tree = false;   // keep the committed child subtree between moves
    int threads = 0;           // 0 = hardware concurrency
    bool extended_space = false;
};

// Raw outcome of scoring one terminal state. When the candidate exceeds the
// parameter bound the score is never computed and violated is set.
struct RawScore {
    double raw = 0.0;
    long long params = 0;
    bool violated = false;
};

// Pure and thread-safe; deterministic for a fixed construction seed.
using LeafScorer = std::function<RawScore(const arch::ArchState& terminal)>;

struct LeafEval {
    double reward = 0.0;  // in [0,1]; exactly 0 for violations and degenerate scores
    RawScore score;
};

// Applies the constraint rule and the running min-max normalization:
// violations get reward 0 without touching the normalizer; finite raw scores
// update it and map through it; sentinel scores map to 0.
LeafEval evaluate_leaf(const arch::ArchState& terminal, const LeafScorer& scorer,
                       naswot::RewardNormalizer& norm);

// ------------------------------------------------------------------
// Tree statistics
// ------------------------------------------------------------------

inline constexpr int kMaxBranching = 8;

struct ChildStat {
    int move = 0;
    long long n = 0;   // visits through this edge
    double r = 0.0;    // cumulative reward
};

struct AmafStat {
    long long n = 0;
    double r = 0.0;
};

struct Node {
    int parent = -1;
    int depth = 0;
    long long n_s = 0;
    bool expanded = false;
    arch::ArchState state;
    std::vector<ChildStat> children;               // one per legal move, ascending
    std::vector<int> child_ids;                    // node pool ids, -1 until visited
    std::array<AmafStat, kMaxBranching> amaf{};    // keyed by move index
};

class Tree {
public:
    explicit Tree(arch::ArchState root_state);

    int root() const { return root_; }
    Node& at(int id) { return nodes_[id]; }
    const Node& at(int id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    void expand(int id);
    int materialize_child(int id, int move);
    // Re-roots the search at an existing child (tree reuse between commits).
    void rebase(int child_id) { root_ = child_id; }

private:
    std::vector<Node> nodes_;
    int root_ = 0;
};

// ------------------------------------------------------------------
// Selection rules
// ------------------------------------------------------------------

// argmax over children of mu_i + k * sqrt(ln(n_s) / n_i); unvisited children
// take infinite priority, ties resolved by the lowest index.
int uct_select(const Node& node, double k);

// beta = n~ / (n + n~ + 4 n n~ b~^2); beta = 1 when both counts are zero.
double rave_beta(long long n, long long n_tilde, double bias);

// argmax of (1-beta) mu_i + beta mu~_i + k sqrt(ln(n_s)/n_i). An unvisited
// child with AMAF data is valued at its AMAF mean (beta = 1, no exploration
// term); a child with neither statistic keeps infinite priority.
int rave_select(const Node& node, const std::array<AmafStat, kMaxBranching>& amaf, double k,
                double bias);

// Closest ancestor (including the node itself) with n_s >= tref; the search
// root when none qualifies.
int grave_amaf_source(const Tree& tree, int node_id, int tref);

// rave_select with the AMAF table read from grave_amaf_source.
int grave_select(const Tree& tree, int node_id, double k, double bias, int tref);

// ------------------------------------------------------------------
// Playouts and backpropagation
// ------------------------------------------------------------------

// Uniform random completion; returns the moves taken and the terminal state.
std::pair<std::vector<int>, arch::ArchState> playout(const arch::ArchState& state, Rng& rng);

// path: node ids from the search root to the expanded node. moves: the full
// move sequence relative to the root (selection prefix + playout suffix).
// Every path node gains one visit; selection edges update the child stats;
// each node's AMAF gains one (deduplicated) update per legal move appearing
// at or after its depth.
void backpropagate(Tree& tree, const std::vector<int>& path, const std::vector<int>& moves,
                   double reward);

// ------------------------------------------------------------------
// Search drivers
// ------------------------------------------------------------------

struct PlayoutRecord {
    long long playout_id = 0;
    std::vector<int> move_prefix;  // full decision list of the evaluated terminal
    long long params = 0;
    double raw = 0.0;
    double reward = 0.0;
    bool violated = false;
};
using PlayoutLogFn = std::function<void(const PlayoutRecord&)>;
using BackpropHook = std::function<void(const std::vector<int>& path_node_ids)>;

struct CommitRecord {
    int phase = 0;
    int move = 0;
    long long playouts_used = 0;
};

struct SearchResult {
    Algorithm algorithm = Algorithm::uct;
    std::uint64_t seed = 0;
    std::vector<int> best_decisions;
    double best_reward = 0.0;
    double best_raw = -std::numeric_limits<double>::infinity();
    long long best_params = 0;
    bool violated = false;      // set when no candidate satisfied the bound
    long long playouts_done = 0;
    std::vector<CommitRecord> commits;
    naswot::RewardNormalizer normalizer;
    double wall_ms = 0.0;       // excluded from determinism comparisons
};

// Shared driver state for one search run.
struct SearchContext {
    SearchConfig cfg;
    LeafScorer scorer;
    naswot::RewardNormalizer normalizer;
    long long playouts_done = 0;
    long long playout_budget = 0;
    PlayoutLogFn log;
    BackpropHook on_backprop;

    bool has_valid = false;
    bool has_any = false;
    std::vector<int> best_decisions;
    double best_raw = -std::numeric_limits<double>::infinity();
    double best_reward = 0.0;
    long long best_params = 0;
    bool best_violated = true;

    long long budget_left() const { return playout_budget - playouts_done; }
    void offer_best(const arch::ArchState& terminal, const LeafEval& eval);
};

// One budgeted move decision (selection / expansion / leaf-parallel playouts /
// backpropagation); returns the most visited root move.
int mcts_move(Tree& tree, Variant variant, SearchContext& ctx, long long move_budget);

struct NmcsOutcome {
    bool valid = false;
    std::vector<int> decisions;  // full terminal decision list
    double raw = -std::numeric_limits<double>::infinity();
    double reward = 0.0;
    long long params = 0;
    bool violated = true;
};

// Nested Monte-Carlo search with best-sequence memoization. Level 0 is a
// single random playout + leaf evaluation.
NmcsOutcome nmcs(const arch::ArchState& state, int level, SearchContext& ctx);

SearchResult random_search(const SearchConfig& cfg, long long iterations,
                           const LeafScorer& scorer, const PlayoutLogFn& log = {});

SearchResult run_search(Algorithm algorithm, const SearchConfig& cfg, const LeafScorer& scorer,
                        const PlayoutLogFn& log = {}, const BackpropHook& hook = {});

}  // namespace radnas::search
