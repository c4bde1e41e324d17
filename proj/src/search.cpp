#include "radnas/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace radnas::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPlayoutStreamTag = 0x706c6179ull;

// Ordered parallel map: f(i) for i in [0, count), results land in slot i.
// Used for leaf-parallel playouts; determinism comes from per-index seeds
// and from consuming results in index order afterwards.
template <typename F>
void parallel_for_ordered(int count, int threads, F&& f) {
    if (count <= 0) return;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    int workers = threads > 0 ? threads : (hw > 0 ? hw : 1);
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += workers) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::uint64_t playout_stream_seed(const SearchContext& ctx, long long playout_index) {
    return derive_seed(derive_seed(ctx.cfg.seed, kPlayoutStreamTag),
                       static_cast<std::uint64_t>(playout_index));
}

struct PlayoutOutcome {
    std::vector<int> moves;        // relative to the state the playout started from
    arch::ArchState terminal;
    RawScore score;
};

// Runs the scorer for `count` playouts in parallel, then feeds the results
// through the (serialized) normalizer, log and best tracker in index order.
// Returns the per-playout rewards alongside the outcomes.
std::vector<std::pair<PlayoutOutcome, double>> run_playout_batch(
    SearchContext& ctx, const arch::ArchState& from, int count) {
    std::vector<PlayoutOutcome> outs(count);
    const long long base = ctx.playouts_done;
    parallel_for_ordered(count, ctx.cfg.threads, [&](int i) {
        Rng rng(playout_stream_seed(ctx, base + i));
        auto [moves, terminal] = playout(from, rng);
        outs[i].moves = std::move(moves);
        outs[i].terminal = std::move(terminal);
        outs[i].score = ctx.scorer(outs[i].terminal);
    });
    std::vector<std::pair<PlayoutOutcome, double>> results;
    results.reserve(count);
    for (int i = 0; i < count; ++i) {
        LeafEval eval;
        eval.score = outs[i].score;
        if (!eval.score.violated) {
            eval.reward = naswot::normalize_reward(eval.score.raw, ctx.normalizer);
        }
        ctx.offer_best(outs[i].terminal, eval);
        if (ctx.log) {
            PlayoutRecord rec;
            rec.playout_id = base + i;
            rec.move_prefix = outs[i].terminal.decisions;
            rec.params = eval.score.params;
            rec.raw = eval.score.raw;
            rec.reward = eval.reward;
            rec.violated = eval.score.violated;
            ctx.log(rec);
        }
        results.emplace_back(std::move(outs[i]), eval.reward);
    }
    ctx.playouts_done += count;
    return results;
}

}  // namespace

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::uct: return "uct";
        case Algorithm::rave: return "rave";
        case Algorithm::grave: return "grave";
        case Algorithm::nmcs: return "nmcs";
        case Algorithm::random: return "random";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(Algorithm::random); ++i) {
        if (name == to_string(static_cast<Algorithm>(i))) return static_cast<Algorithm>(i);
    }
    throw std::invalid_argument("unknown algorithm: " + name);
}

LeafEval evaluate_leaf(const arch::ArchState& terminal, const LeafScorer& scorer,
                       naswot::RewardNormalizer& norm) {
    if (!terminal.is_terminal()) {
        throw std::invalid_argument("evaluate_leaf: state is not terminal");
    }
    LeafEval eval;
    eval.score = scorer(terminal);
    if (eval.score.violated) {
        eval.reward = 0.0;  // constraint violations never touch the normalizer
        return eval;
    }
    eval.reward = naswot::normalize_reward(eval.score.raw, norm);
    return eval;
}

// ------------------------------------------------------------------
// Tree
// ------------------------------------------------------------------

Tree::Tree(arch::ArchState root_state) {
    Node root;
    root.state = std::move(root_state);
    root.depth = root.state.depth();
    nodes_.push_back(std::move(root));
}

void Tree::expand(int id) {
    Node& node = nodes_[id];
    if (node.expanded || node.state.is_terminal()) {
        node.expanded = true;
        return;
    }
    const auto moves = arch::legal_moves(node.state);
    node.children.reserve(moves.size());
    for (int m : moves) node.children.push_back(ChildStat{m, 0, 0.0});
    node.child_ids.assign(moves.size(), -1);
    node.expanded = true;
}

int Tree::materialize_child(int id, int move) {
    if (nodes_[id].child_ids[move] >= 0) return nodes_[id].child_ids[move];
    Node child;
    child.parent = id;
    child.state = arch::apply_move(nodes_[id].state, move);
    child.depth = child.state.depth();
    nodes_.push_back(std::move(child));
    const int child_id = static_cast<int>(nodes_.size()) - 1;
    nodes_[id].child_ids[move] = child_id;
    return child_id;
}

// ------------------------------------------------------------------
// Selection
// ------------------------------------------------------------------

int uct_select(const Node& node, double k) {
    if (node.children.empty()) throw std::invalid_argument("uct_select: node has no children");
    const double log_n = std::log(static_cast<double>(std::max<long long>(node.n_s, 1)));
    int best = -1;
    double best_value = -kInf;
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i) {
        const ChildStat& c = node.children[i];
        if (c.n == 0) return i;  // infinite priority, first by ascending index
        const double value =
            c.r / static_cast<double>(c.n) + k * std::sqrt(log_n / static_cast<double>(c.n));
        if (value > best_value) {
            best_value = value;
            best = i;
        }
    }
    return best;
}

double rave_beta(long long n, long long n_tilde, double bias) {
    if (n == 0 && n_tilde == 0) return 1.0;  // pure-AMAF fallback
    const double nd = static_cast<double>(n);
    const double td = static_cast<double>(n_tilde);
    return td / (nd + td + 4.0 * nd * td * bias * bias);
}

int rave_select(const Node& node, const std::array<AmafStat, kMaxBranching>& amaf, double k,
                double bias) {
    if (node.children.empty()) throw std::invalid_argument("rave_select: node has no children");
    const double log_n = std::log(static_cast<double>(std::max<long long>(node.n_s, 1)));
    int best = -1;
    double best_value = -kInf;
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i) {
        const ChildStat& c = node.children[i];
        const AmafStat& a = amaf[c.move];
        double value;
        if (c.n == 0 && a.n == 0) {
            return i;  // no statistics at all: infinite priority
        } else if (c.n == 0) {
            value = a.r / static_cast<double>(a.n);  // beta = 1, no exploration term
        } else {
            const double beta = rave_beta(c.n, a.n, bias);
            const double mu = c.r / static_cast<double>(c.n);
            const double mu_tilde = a.n > 0 ? a.r / static_cast<double>(a.n) : 0.0;
            value = (1.0 - beta) * mu + beta * mu_tilde +
                    k * std::sqrt(log_n / static_cast<double>(c.n));
        }
        if (value > best_value) {
            best_value = value;
            best = i;
        }
    }
    return best;
}

int grave_amaf_source(const Tree& tree, int node_id, int tref) {
    int id = node_id;
    while (tree.at(id).n_s < tref && id != tree.root() && tree.at(id).parent >= 0) {
        id = tree.at(id).parent;
    }
    return id;
}

int grave_select(const Tree& tree, int node_id, double k, double bias, int tref) {
    const int source = grave_amaf_source(tree, node_id, tref);
    return rave_select(tree.at(node_id), tree.at(source).amaf, k, bias);
}

// ------------------------------------------------------------------
// Playout and backpropagation
// ------------------------------------------------------------------

std::pair<std::vector<int>, arch::ArchState> playout(const arch::ArchState& state, Rng& rng) {
    arch::ArchState current = state;
    std::vector<int> moves;
    moves.reserve(current.total_decisions() - current.depth());
    while (!current.is_terminal()) {
        const int branching = arch::phase_branching(current.depth(), current.extended);
        const int move = rng.uniform_int(branching);
        moves.push_back(move);
        current.push_move_unchecked(move);
    }
    return {std::move(moves), std::move(current)};
}

void backpropagate(Tree& tree, const std::vector<int>& path, const std::vector<int>& moves,
                   double reward) {
    for (std::size_t d = 0; d < path.size(); ++d) {
        Node& node = tree.at(path[d]);
        node.n_s += 1;
        if (d + 1 < path.size()) {
            ChildStat& edge = node.children[moves[d]];
            edge.n += 1;
            edge.r += reward;
        }
        if (!node.children.empty()) {
            // AMAF: each legal move appearing at or after this depth counts
            // once per playout, regardless of when it was played.
            std::uint32_t seen = 0;
            const int branching = static_cast<int>(node.children.size());
            for (std::size_t p = d; p < moves.size(); ++p) {
                const int m = moves[p];
                if (m >= branching || (seen >> m) & 1u) continue;
                seen |= 1u << m;
                node.amaf[m].n += 1;
                node.amaf[m].r += reward;
            }
        }
    }
}

// ------------------------------------------------------------------
// Drivers
// ------------------------------------------------------------------

void SearchContext::offer_best(const arch::ArchState& terminal, const LeafEval& eval) {
    if (eval.score.violated) {
        if (!has_any) {
            has_any = true;
            best_decisions = terminal.decisions;
            best_raw = -kInf;
            best_reward = 0.0;
            best_params = eval.score.params;
            best_violated = true;
        }
        return;
    }
    const double key = std::isfinite(eval.score.raw) ? eval.score.raw : -kInf;
    if (!has_valid || key > best_raw) {
        has_valid = true;
        has_any = true;
        best_decisions = terminal.decisions;
        best_raw = key;
        best_reward = eval.reward;
        best_params = eval.score.params;
        best_violated = false;
    }
}

int mcts_move(Tree& tree, Variant variant, SearchContext& ctx, long long move_budget) {
    if (move_budget < 1) throw std::invalid_argument("mcts_move: zero budget");
    const int root = tree.root();
    tree.expand(root);
    if (tree.at(root).children.empty()) {
        throw std::invalid_argument("mcts_move: root is terminal");
    }

    long long used = 0;
    while (used < move_budget && ctx.budget_left() > 0) {
        // Selection: descend through expanded nodes.
        int node_id = root;
        std::vector<int> path{root};
        std::vector<int> moves;
        while (tree.at(node_id).expanded && !tree.at(node_id).state.is_terminal()) {
            int pick;
            switch (variant) {
                case Variant::uct: pick = uct_select(tree.at(node_id), ctx.cfg.k); break;
                case Variant::rave:
                    pick = rave_select(tree.at(node_id), tree.at(node_id).amaf, ctx.cfg.k,
                                       ctx.cfg.rave_bias);
                    break;
                case Variant::grave:
                    pick = grave_select(tree, node_id, ctx.cfg.k, ctx.cfg.rave_bias,
                                        ctx.cfg.tref);
                    break;
            }
            const int move = tree.at(node_id).children[pick].move;
            moves.push_back(move);
            node_id = tree.materialize_child(node_id, move);
            path.push_back(node_id);
        }
        tree.expand(node_id);  // expansion (no-op on terminal states)

        const long long width = std::min<long long>(
            ctx.cfg.playout_width, std::min(move_budget - used, ctx.budget_left()));
        auto batch = run_playout_batch(ctx, tree.at(node_id).state, static_cast<int>(width));
        for (auto& [outcome, reward] : batch) {
            std::vector<int> full_moves = moves;
            full_moves.insert(full_moves.end(), outcome.moves.begin(), outcome.moves.end());
            backpropagate(tree, path, full_moves, reward);
            if (ctx.on_backprop) ctx.on_backprop(path);
        }
        used += width;
    }

    // Most visited root child. Visit-count ties are common with small
    // per-move slices under leaf parallelization; break them by mean reward
    // (then lowest index) so the commit still reflects the evidence.
    const Node& root_node = tree.at(root);
    long long best_n = -1;
    double best_mean = -kInf;
    int best_move = -1;
    for (const ChildStat& c : root_node.children) {
        const double mean = c.n > 0 ? c.r / static_cast<double>(c.n) : -kInf;
        if (c.n > best_n || (c.n == best_n && mean > best_mean)) {
            best_n = c.n;
            best_mean = mean;
            best_move = c.move;
        }
    }
    if (best_n <= 0) {
        // Budget too small for any selection step: fall back to the best AMAF
        // mean gathered by the root playouts, then to the first move.
        double best_mean = -kInf;
        best_move = root_node.children.front().move;
        for (const ChildStat& c : root_node.children) {
            const AmafStat& a = root_node.amaf[c.move];
            if (a.n > 0 && a.r / static_cast<double>(a.n) > best_mean) {
                best_mean = a.r / static_cast<double>(a.n);
                best_move = c.move;
            }
        }
    }
    return best_move;
}

NmcsOutcome nmcs(const arch::ArchState& state, int level, SearchContext& ctx) {
    NmcsOutcome best;
    if (state.is_terminal()) {
        if (ctx.budget_left() <= 0) return best;
        auto batch = run_playout_batch(ctx, state, 1);
        const auto& [outcome, reward] = batch.front();
        best.valid = true;
        best.decisions = outcome.terminal.decisions;
        best.raw = outcome.score.violated
                       ? -kInf
                       : (std::isfinite(outcome.score.raw) ? outcome.score.raw : -kInf);
        best.reward = reward;
        best.params = outcome.score.params;
        best.violated = outcome.score.violated;
        return best;
    }
    if (level <= 0) {
        if (ctx.budget_left() <= 0) return best;
        auto batch = run_playout_batch(ctx, state, 1);
        const auto& [outcome, reward] = batch.front();
        best.valid = true;
        best.decisions = outcome.terminal.decisions;
        best.raw = outcome.score.violated
                       ? -kInf
                       : (std::isfinite(outcome.score.raw) ? outcome.score.raw : -kInf);
        best.reward = reward;
        best.params = outcome.score.params;
        best.violated = outcome.score.violated;
        return best;
    }

    arch::ArchState current = state;
    while (!current.is_terminal() && ctx.budget_left() > 0) {
        const int branching = arch::phase_branching(current.depth(), current.extended);
        if (level == 1) {
            // Level-1 sweep: one playout per child, run in parallel, consumed
            // in ascending move order.
            const int count = static_cast<int>(
                std::min<long long>(branching, ctx.budget_left()));
            std::vector<PlayoutOutcome> outs(count);
            const long long base = ctx.playouts_done;
            parallel_for_ordered(count, ctx.cfg.threads, [&](int m) {
                arch::ArchState child = current;
                child.push_move_unchecked(m);
                Rng rng(playout_stream_seed(ctx, base + m));
                auto [pmoves, terminal] = playout(child, rng);
                outs[m].moves = std::move(pmoves);
                outs[m].terminal = std::move(terminal);
                outs[m].score = ctx.scorer(outs[m].terminal);
            });
            for (int m = 0; m < count; ++m) {
                LeafEval eval;
                eval.score = outs[m].score;
                if (!eval.score.violated) {
                    eval.reward = naswot::normalize_reward(eval.score.raw, ctx.normalizer);
                }
                ctx.offer_best(outs[m].terminal, eval);
                if (ctx.log) {
                    PlayoutRecord rec;
                    rec.playout_id = base + m;
                    rec.move_prefix = outs[m].terminal.decisions;
                    rec.params = eval.score.params;
                    rec.raw = eval.score.raw;
                    rec.reward = eval.reward;
                    rec.violated = eval.score.violated;
                    ctx.log(rec);
                }
                const double key = eval.score.violated
                                       ? -kInf
                                       : (std::isfinite(eval.score.raw) ? eval.score.raw : -kInf);
                if (!best.valid || key > best.raw) {
                    best.valid = true;
                    best.decisions = outs[m].terminal.decisions;
                    best.raw = key;
                    best.reward = eval.reward;
                    best.params = eval.score.params;
                    best.violated = eval.score.violated;
                }
            }
            ctx.playouts_done += count;
        } else {
            for (int m = 0; m < branching && ctx.budget_left() > 0; ++m) {
                const NmcsOutcome sub = nmcs(arch::apply_move(current, m), level - 1, ctx);
                if (sub.valid && (!best.valid || sub.raw > best.raw)) best = sub;
            }
        }
        if (!best.valid) break;  // budget exhausted before any evaluation
        // Follow the memoized best sequence one step.
        current = arch::apply_move(current, best.decisions[current.depth()]);
    }
    return best;
}

namespace {

SearchResult make_result(Algorithm algorithm, const SearchContext& ctx) {
    SearchResult res;
    res.algorithm = algorithm;
    res.seed = ctx.cfg.seed;
    res.best_decisions = ctx.best_decisions;
    res.best_reward = ctx.best_reward;
    res.best_raw = ctx.best_raw;
    res.best_params = ctx.best_params;
    res.violated = ctx.best_violated;
    res.playouts_done = ctx.playouts_done;
    res.normalizer = ctx.normalizer;
    return res;
}

SearchResult run_mcts(Algorithm algorithm, const SearchConfig& cfg, const LeafScorer& scorer,
                      const PlayoutLogFn& log, const BackpropHook& hook) {
    Variant variant = Variant::uct;
    if (algorithm == Algorithm::rave) variant = Variant::rave;
    if (algorithm == Algorithm::grave) variant = Variant::grave;

    SearchContext ctx;
    ctx.cfg = cfg;
    ctx.scorer = scorer;
    ctx.log = log;
    ctx.on_backprop = hook;

    arch::ArchState root_state;
    root_state.extended = cfg.extended_space;
    const int total_moves = root_state.total_decisions();
    const bool per_move = cfg.budget_mode == BudgetMode::playouts_per_move;
    ctx.playout_budget = per_move ? cfg.budget * total_moves : cfg.budget;

    SearchResult res;
    Tree tree(root_state);
    arch::ArchState current = root_state;
    int moves_left = total_moves;
    const auto t0 = std::chrono::steady_clock::now();
    while (!current.is_terminal()) {
        int move;
        long long used_before = ctx.playouts_done;
        if (cfg.budget_mode == BudgetMode::seconds_per_move) {
            // Wall-clock parity mode: repeatedly run small slices until the
            // per-move time budget elapses. Not deterministic.
            ctx.playout_budget = std::numeric_limits<long long>::max();
            const auto deadline = std::chrono::steady_clock::now() +
                                  std::chrono::duration<double>(cfg.seconds_per_move);
            move = -1;
            while (std::chrono::steady_clock::now() < deadline) {
                move = mcts_move(tree, variant, ctx, cfg.playout_width);
            }
            if (move < 0) move = mcts_move(tree, variant, ctx, cfg.playout_width);
        } else if (ctx.budget_left() > 0) {
            // Total budgets are split across the remaining commits in
            // proportion to phase branching: an eight-way op decision earns
            // more playouts than a binary input pick.
            long long slice;
            if (per_move) {
                slice = cfg.budget;
            } else {
                long long branching_left = 0;
                for (int p = current.depth(); p < total_moves; ++p) {
                    branching_left += arch::phase_branching(p, current.extended);
                }
                const long long here =
                    arch::phase_branching(current.depth(), current.extended);
                slice = std::max<long long>(1, ctx.budget_left() * here / branching_left);
            }
            move = mcts_move(tree, variant, ctx, slice);
        } else {
            // Budget exhausted before the game ended: finish the commit line
            // with seeded uniform moves (no further evaluations).
            Rng rng(derive_seed(cfg.seed, 0x66696c6cull + current.depth()));
            move = rng.uniform_int(arch::phase_branching(current.depth(), current.extended));
        }
        res.commits.push_back(
            CommitRecord{current.depth(), move, ctx.playouts_done - used_before});
        current = arch::apply_move(current, move);
        --moves_left;
        if (cfg.reuse_tree && !current.is_terminal()) {
            Tree& t = tree;
            const int root = t.root();
            if (t.at(root).expanded && t.at(root).child_ids[move] >= 0) {
                t.rebase(t.at(root).child_ids[move]);
            } else {
                tree = Tree(current);
            }
        } else if (!current.is_terminal()) {
            tree = Tree(current);
        }
    }

    // The committed line is a candidate too (covers the all-violating case).
    if (ctx.budget_left() > 0 || !ctx.has_any) {
        LeafEval eval = evaluate_leaf(current, scorer, ctx.normalizer);
        if (ctx.log) {
            PlayoutRecord rec;
            rec.playout_id = ctx.playouts_done;
            rec.move_prefix = current.decisions;
            rec.params = eval.score.params;
            rec.raw = eval.score.raw;
            rec.reward = eval.reward;
            rec.violated = eval.score.violated;
            ctx.log(rec);
        }
        ctx.playouts_done += 1;
        ctx.offer_best(current, eval);
    }

    SearchResult out = make_result(algorithm, ctx);
    out.commits = std::move(res.commits);
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return out;
}

SearchResult run_nmcs(const SearchConfig& cfg, const LeafScorer& scorer, const PlayoutLogFn& log) {
    SearchContext ctx;
    ctx.cfg = cfg;
    ctx.scorer = scorer;
    ctx.log = log;
    arch::ArchState root;
    root.extended = cfg.extended_space;
    ctx.playout_budget = cfg.budget_mode == BudgetMode::playouts_per_move
                             ? cfg.budget * root.total_decisions()
                             : cfg.budget;
    const auto t0 = std::chrono::steady_clock::now();
    // Repeat full nested runs while budget remains; the tracker keeps the
    // best sequence over all passes.
    while (ctx.budget_left() > 0) {
        nmcs(root, cfg.nmcs_level, ctx);
    }
    SearchResult out = make_result(Algorithm::nmcs, ctx);
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return out;
}

}  // namespace

SearchResult random_search(const SearchConfig& cfg, long long iterations,
                           const LeafScorer& scorer, const PlayoutLogFn& log) {
    if (iterations < 1) throw std::invalid_argument("random_search: iterations must be >= 1");
    SearchContext ctx;
    ctx.cfg = cfg;
    ctx.scorer = scorer;
    ctx.log = log;
    ctx.playout_budget = iterations;
    arch::ArchState root;
    root.extended = cfg.extended_space;
    const auto t0 = std::chrono::steady_clock::now();
    while (ctx.budget_left() > 0) {
        const int count = static_cast<int>(std::min<long long>(
            std::max(1, cfg.playout_width), ctx.budget_left()));
        run_playout_batch(ctx, root, count);
    }
    SearchResult out = make_result(Algorithm::random, ctx);
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return out;
}

SearchResult run_search(Algorithm algorithm, const SearchConfig& cfg, const LeafScorer& scorer,
                        const PlayoutLogFn& log, const BackpropHook& hook) {
    if (cfg.budget < 1 && cfg.budget_mode != BudgetMode::seconds_per_move) {
        throw std::invalid_argument("run_search: budget must be >= 1");
    }
    if (cfg.playout_width < 1) throw std::invalid_argument("run_search: playout_width >= 1");
    SearchResult result;
    switch (algorithm) {
        case Algorithm::uct:
        case Algorithm::rave:
        case Algorithm::grave:
            result = run_mcts(algorithm, cfg, scorer, log, hook);
            break;
        case Algorithm::nmcs:
            result = run_nmcs(cfg, scorer, log);
            break;
        case Algorithm::random:
            result = random_search(cfg, cfg.budget, scorer, log);
            break;
        default:
            throw std::invalid_argument("run_search: unknown algorithm");
    }
    // Re-score the returned architecture once; the scorer is deterministic,
    // so this only confirms the tracked values (and fills best_params for
    // all-violating runs).
    if (!result.best_decisions.empty()) {
        arch::ArchState best;
        best.extended = cfg.extended_space;
        best.decisions = result.best_decisions;
        const RawScore rescored = scorer(best);
        result.best_params = rescored.params;
        if (!rescored.violated) {
            result.best_raw = std::isfinite(rescored.raw) ? rescored.raw : -kInf;
        }
    }
    return result;
}

}  // namespace radnas::search
