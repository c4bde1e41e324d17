#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace radnas::arch {

// Searchable per-branch operations. The enumeration is closed and ordered;
// move indices at op phases map onto it one-to-one.
enum class OpKind : int {
    identity = 0,
    conv3x3 = 1,
    conv5x5 = 2,
    sepconv3x3 = 3,
    sepconv5x5 = 4,
    dilconv3x3 = 5,  // dense 3x3 with dilation 2
    maxpool3x3 = 6,
    avgpool3x3 = 7,
};
inline constexpr int kNumOps = 8;

enum class CombineKind : int { add = 0, concat = 1 };

enum class CellKind : int { normal = 0, reduction = 1, upsample = 2 };

const char* to_string(OpKind op);
const char* to_string(CombineKind c);
const char* to_string(CellKind k);
OpKind op_from_string(const std::string& name);
CombineKind combine_from_string(const std::string& name);

// One searched block: two inputs drawn from {previous cell output (0),
// previous-previous cell output (1)}, one op per branch, one combiner.
struct BlockSpec {
    int input_a = 0;
    int input_b = 0;
    OpKind op_a = OpKind::identity;
    OpKind op_b = OpKind::identity;
    CombineKind combine = CombineKind::add;

    bool operator==(const BlockSpec&) const = default;
};

struct CellSpec {
    CellKind kind = CellKind::normal;
    BlockSpec block;

    bool operator==(const CellSpec&) const = default;
};

// Macro skeleton around the three searched cells. Channel width doubles on
// every reduction stage and halves back on every upsample stage; encoder
// features are concatenated into the decoder at matching resolution.
struct MacroConfig {
    int reduction_stages = 2;   // encoder depth R; decoder mirrors it
    int normals_per_stage = 1;  // normal cells per stage (and at the bottleneck)
    int base_channels = 16;     // conv target width at the input stage
    int in_channels = 1;

    bool operator==(const MacroConfig&) const = default;
};

struct ArchitectureSpec {
    CellSpec normal{CellKind::normal, {}};
    CellSpec reduction{CellKind::reduction, {}};
    CellSpec upsample{CellKind::upsample, {}};
    MacroConfig macro;
    bool with_head = true;  // 1x1 conv to one channel, logistic output

    bool operator==(const ArchitectureSpec&) const = default;
};

// ------------------------------------------------------------------
// The search space as a finite sequential decision process.
//
// Default space: 15 decisions, five per cell in order (input_a, input_b,
// op_a, op_b, combine) for the normal, reduction and upsample cells.
// The extended space appends two macro decisions (base channel width and
// normal cells per stage); it is off by default.
// ------------------------------------------------------------------

enum class PhaseField : int {
    input_a = 0,
    input_b = 1,
    op_a = 2,
    op_b = 3,
    combine = 4,
    macro_channels = 5,
    macro_depth = 6,
};

struct PhaseInfo {
    int index = 0;          // position in the decision sequence
    CellKind cell = CellKind::normal;
    PhaseField field = PhaseField::input_a;
    int branching = 0;      // number of legal moves at this phase
};

inline constexpr int kDecisionsPerCell = 5;
inline constexpr int kDefaultDecisionCount = 15;
inline constexpr int kExtendedDecisionCount = 17;
inline constexpr std::array<int, 4> kMacroChannelMenu = {8, 16, 32, 64};
inline constexpr std::array<int, 3> kMacroDepthMenu = {1, 2, 3};

struct ArchState {
    std::vector<int> decisions;
    bool extended = false;

    int total_decisions() const { return extended ? kExtendedDecisionCount : kDefaultDecisionCount; }
    bool is_terminal() const { return static_cast<int>(decisions.size()) == total_decisions(); }
    int depth() const { return static_cast<int>(decisions.size()); }

    // Unchecked fast path for enumeration and playouts on local copies.
    // The value-semantic contract lives in apply_move().
    void push_move_unchecked(int move) { decisions.push_back(move); }
    void pop_move() { decisions.pop_back(); }

    bool operator==(const ArchState&) const = default;
};

PhaseInfo phase_info(const ArchState& state);
int phase_branching(int phase, bool extended);

// Legal moves for the phase the next decision fills. An empty list is the
// terminal signal; every non-terminal state has at least two moves.
std::vector<int> legal_moves(const ArchState& state);

// Returns a new state with the move appended; the input is not modified.
// Throws std::invalid_argument for a terminal state or an illegal index.
ArchState apply_move(const ArchState& state, int move);

// Expands a terminal decision sequence into a concrete architecture.
// Extended-space decisions override the corresponding macro fields.
ArchitectureSpec build_spec(const ArchState& state, const MacroConfig& macro);

// Exact number of learnable scalars in the expanded network:
// dense conv kH*kW*Cin*Cout + Cout, separable conv kH*kW*Cin + Cin*Cout + Cout,
// pooling / identity / resize 0, head Cin + 1.
long long count_params(const ArchitectureSpec& spec);

// UTF-8 JSON architecture document, schema documented in the README.
// deserialize(serialize(s)) == s; malformed input throws ParseError.
std::string serialize_spec(const ArchitectureSpec& spec);
ArchitectureSpec deserialize_spec(const std::string& text);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace radnas::arch
