#pragma once

#include <cstdint>
#include <vector>

#include "radnas/graph.hpp"
#include "radnas/tensor.hpp"

namespace radnas::fwd {

// Per-input binary ReLU codes, bit-packed into 64-bit words per row.
// Bit i of row r is 1 iff the i-th ReLU site (fixed topological layer
// order) had a strictly positive pre-activation for input r.
struct ActivationCodes {
    int rows = 0;
    long long bits = 0;  // = N_A of the producing network
    int words_per_row = 0;
    std::vector<std::uint64_t> words;

    ActivationCodes() = default;
    ActivationCodes(int rows_, long long bits_)
        : rows(rows_), bits(bits_), words_per_row(static_cast<int>((bits_ + 63) / 64)),
          words(static_cast<std::size_t>(rows_) * ((bits_ + 63) / 64), 0) {}

    bool bit(int row, long long i) const {
        const std::uint64_t word =
            words[static_cast<std::size_t>(row) * words_per_row + i / 64];
        return (word >> (i % 64)) & 1u;
    }
    void set_bit(int row, long long i) {
        words[static_cast<std::size_t>(row) * words_per_row + i / 64] |= std::uint64_t{1}
                                                                         << (i % 64);
    }
    const std::uint64_t* row(int r) const {
        return words.data() + static_cast<std::size_t>(r) * words_per_row;
    }
};

// A spec expanded at fixed input dims with materialized weights. Immutable
// after init; forward() may run concurrently on the same instance.
struct NetworkInstance {
    arch::LayerGraph graph;
    std::vector<std::vector<float>> weights;  // per node; empty for parameter-free nodes
    int in_ch = 0, in_h = 0, in_w = 0;
    std::uint64_t seed = 0;
    long long n_a = 0;  // total ReLU units for these input dims
};

// Weights from a zero-mean Gaussian with std sqrt(2 / fan_in), biases zero;
// bitwise deterministic per (spec, dims, seed).
NetworkInstance init_network(const arch::ArchitectureSpec& spec, int in_h, int in_w,
                             std::uint64_t seed);

struct ForwardResult {
    Tensor4 output;  // segmentation logit map (pre-logistic)
    ActivationCodes codes;
    std::vector<double> node_output_std;  // per graph node, post-activation
};

ForwardResult forward(const NetworkInstance& net, const Tensor4& batch);

// Row-major byte dump of the unpacked code matrix, for debugging.
// Header: magic "RNAC", u32 version, u64 rows, u64 bits; then rows*bits bytes.
void dump_codes(const ActivationCodes& codes, const std::string& path);

}  // namespace radnas::fwd
