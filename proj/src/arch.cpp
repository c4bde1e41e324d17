#include "radnas/arch.hpp"

#include <numeric>

#include "radnas/graph.hpp"

namespace radnas::arch {

const char* to_string(OpKind op) {
    switch (op) {
        case OpKind::identity: return "identity";
        case OpKind::conv3x3: return "conv3x3";
        case OpKind::conv5x5: return "conv5x5";
        case OpKind::sepconv3x3: return "sepconv3x3";
        case OpKind::sepconv5x5: return "sepconv5x5";
        case OpKind::dilconv3x3: return "dilconv3x3";
        case OpKind::maxpool3x3: return "maxpool3x3";
        case OpKind::avgpool3x3: return "avgpool3x3";
    }
    return "?";
}

const char* to_string(CombineKind c) { return c == CombineKind::add ? "add" : "concat"; }

const char* to_string(CellKind k) {
    switch (k) {
        case CellKind::normal: return "normal";
        case CellKind::reduction: return "reduction";
        case CellKind::upsample: return "upsample";
    }
    return "?";
}

OpKind op_from_string(const std::string& name) {
    for (int i = 0; i < kNumOps; ++i) {
        if (name == to_string(static_cast<OpKind>(i))) return static_cast<OpKind>(i);
    }
    throw ParseError("unknown op kind: " + name);
}

CombineKind combine_from_string(const std::string& name) {
    if (name == "add") return CombineKind::add;
    if (name == "concat") return CombineKind::concat;
    throw ParseError("unknown combine kind: " + name);
}

int phase_branching(int phase, bool extended) {
    const int total = extended ? kExtendedDecisionCount : kDefaultDecisionCount;
    if (phase < 0 || phase >= total) return 0;
    if (phase >= kDefaultDecisionCount) {
        return phase == kDefaultDecisionCount ? static_cast<int>(kMacroChannelMenu.size())
                                              : static_cast<int>(kMacroDepthMenu.size());
    }
    switch (phase % kDecisionsPerCell) {
        case 0:
        case 1: return 2;        // two input sources
        case 2:
        case 3: return kNumOps;  // one move per OpKind
        default: return 2;       // add | concat
    }
}

PhaseInfo phase_info(const ArchState& state) {
    PhaseInfo info;
    info.index = state.depth();
    info.branching = phase_branching(info.index, state.extended);
    if (info.index >= kDefaultDecisionCount) {
        info.field = info.index == kDefaultDecisionCount ? PhaseField::macro_channels
                                                         : PhaseField::macro_depth;
        return info;
    }
    info.cell = static_cast<CellKind>(info.index / kDecisionsPerCell);
    info.field = static_cast<PhaseField>(info.index % kDecisionsPerCell);
    return info;
}

std::vector<int> legal_moves(const ArchState& state) {
    std::vector<int> moves(phase_branching(state.depth(), state.extended));
    std::iota(moves.begin(), moves.end(), 0);
    return moves;
}

ArchState apply_move(const ArchState& state, int move) {
    if (state.is_terminal()) {
        throw std::invalid_argument("apply_move: state is terminal");
    }
    const int branching = phase_branching(state.depth(), state.extended);
    if (move < 0 || move >= branching) {
        throw std::invalid_argument("apply_move: illegal move " + std::to_string(move) +
                                    " at phase " + std::to_string(state.depth()) +
                                    " (branching " + std::to_string(branching) + ")");
    }
    ArchState next = state;
    next.decisions.push_back(move);
    return next;
}

namespace {

BlockSpec block_from(const std::vector<int>& d, int offset) {
    BlockSpec b;
    b.input_a = d[offset + 0];
    b.input_b = d[offset + 1];
    b.op_a = static_cast<OpKind>(d[offset + 2]);
    b.op_b = static_cast<OpKind>(d[offset + 3]);
    b.combine = static_cast<CombineKind>(d[offset + 4]);
    return b;
}

}  // namespace

ArchitectureSpec build_spec(const ArchState& state, const MacroConfig& macro) {
    if (!state.is_terminal()) {
        throw std::invalid_argument("build_spec: state is not terminal (" +
                                    std::to_string(state.depth()) + "/" +
                                    std::to_string(state.total_decisions()) + " decisions)");
    }
    ArchitectureSpec spec;
    spec.normal = CellSpec{CellKind::normal, block_from(state.decisions, 0)};
    spec.reduction = CellSpec{CellKind::reduction, block_from(state.decisions, 5)};
    spec.upsample = CellSpec{CellKind::upsample, block_from(state.decisions, 10)};
    spec.macro = macro;
    if (state.extended) {
        spec.macro.base_channels = kMacroChannelMenu[state.decisions[15]];
        spec.macro.normals_per_stage = kMacroDepthMenu[state.decisions[16]];
    }
    return spec;
}

long long count_params(const ArchitectureSpec& spec) {
    // Parameter counts are independent of spatial dims; expand at a minimal
    // valid size (divisible by 2^R so the skip wiring shape-checks).
    const int dims = 4 << spec.macro.reduction_stages;
    return expand(spec, dims, dims).total_params;
}

}  // namespace radnas::arch
