#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "radnas/arch.hpp"

namespace radnas::arch {

// Primitive nodes of the expanded network graph, in topological order.
enum class PrimKind : int {
    input,
    conv,        // dense conv, odd kernel, zero padding
    sepconv,     // depthwise k x k then pointwise 1x1 (bias on pointwise)
    pool_max,
    pool_avg,
    subsample2,  // stride-2 pick, parameter-free
    upsample2x,  // nearest-neighbor doubling
    add,
    concat,
    project1x1,  // implicit projection for add with mismatched channels
    head1x1,     // 1x1 conv to one channel, no ReLU (logistic applied downstream)
};

const char* to_string(PrimKind k);

struct LayerNode {
    PrimKind kind = PrimKind::input;
    int in_a = -1;  // producer node index
    int in_b = -1;  // second producer for add/concat
    int kernel = 0;
    int stride = 1;
    int dilation = 1;
    int padding = 0;
    int in_ch = 0, in_h = 0, in_w = 0;
    int out_ch = 0, out_h = 0, out_w = 0;
    bool relu = false;       // ReLU follows every parameterized conv except the head
    long long params = 0;
    std::string label;
};

struct LayerGraph {
    std::vector<LayerNode> nodes;
    int output = -1;
    long long total_params = 0;
    long long relu_units = 0;  // N_A for the dims the graph was expanded at
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symbolic shape propagation of the full macro skeleton. Throws ShapeError
// when any tensor shape is inconsistent (e.g. input dims not divisible by
// 2^R at the skip concatenations).
LayerGraph expand(const ArchitectureSpec& spec, int in_h, int in_w);

// Output spatial size of a windowed op under zero padding.
inline int conv_out_dim(int in, int kernel, int stride, int dilation, int padding) {
    return (in + 2 * padding - dilation * (kernel - 1) - 1) / stride + 1;
}

}  // namespace radnas::arch
