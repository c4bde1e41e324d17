#include "radnas/network.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "radnas/rng.hpp"

namespace radnas::fwd {

namespace {

std::vector<float> gaussian_block(Rng& rng, std::size_t count, double stddev) {
    std::vector<float> out(count);
    for (float& v : out) v = static_cast<float>(stddev * rng.normal());
    return out;
}

// Weight layout per node kind:
//   conv / project1x1 / head1x1: [out][in][k][k] kernel, then out biases
//   sepconv: [in][k][k] depthwise kernel, then [out][in] pointwise, then out biases
std::vector<float> init_node(const arch::LayerNode& node, Rng& rng) {
    using arch::PrimKind;
    switch (node.kind) {
        case PrimKind::conv:
        case PrimKind::project1x1:
        case PrimKind::head1x1: {
            const std::size_t kernel_count = static_cast<std::size_t>(node.out_ch) *
                                             node.in_ch * node.kernel * node.kernel;
            const double fan_in = static_cast<double>(node.in_ch) * node.kernel * node.kernel;
            auto w = gaussian_block(rng, kernel_count, std::sqrt(2.0 / fan_in));
            w.resize(kernel_count + node.out_ch, 0.0f);  // zero biases
            return w;
        }
        case PrimKind::sepconv: {
            const std::size_t dw = static_cast<std::size_t>(node.in_ch) * node.kernel *
                                   node.kernel;
            const std::size_t pw = static_cast<std::size_t>(node.out_ch) * node.in_ch;
            auto w = gaussian_block(rng, dw, std::sqrt(2.0 / (node.kernel * node.kernel)));
            auto p = gaussian_block(rng, pw, std::sqrt(2.0 / node.in_ch));
            w.insert(w.end(), p.begin(), p.end());
            w.resize(dw + pw + node.out_ch, 0.0f);
            return w;
        }
        default:
            return {};
    }
}

}  // namespace

NetworkInstance init_network(const arch::ArchitectureSpec& spec, int in_h, int in_w,
                             std::uint64_t seed) {
    NetworkInstance net;
    net.graph = arch::expand(spec, in_h, in_w);
    net.in_ch = spec.macro.in_channels;
    net.in_h = in_h;
    net.in_w = in_w;
    net.seed = seed;
    net.n_a = net.graph.relu_units;
    net.weights.reserve(net.graph.nodes.size());
    Rng rng(derive_seed(seed, 0x77696768u));  // one stream, nodes drawn in graph order
    for (const auto& node : net.graph.nodes) net.weights.push_back(init_node(node, rng));
    return net;
}

ForwardResult forward(const NetworkInstance& net, const Tensor4& batch) {
    using arch::PrimKind;
    const auto& nodes = net.graph.nodes;
    if (batch.c != net.in_ch || batch.h != net.in_h || batch.w != net.in_w) {
        throw std::invalid_argument("forward: batch dims do not match network input dims");
    }

    // Free intermediates after their last consumer to bound peak memory.
    std::vector<int> last_use(nodes.size(), -1);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        if (nodes[i].in_a >= 0) last_use[nodes[i].in_a] = i;
        if (nodes[i].in_b >= 0) last_use[nodes[i].in_b] = i;
    }
    last_use[net.graph.output] = static_cast<int>(nodes.size());

    ForwardResult result;
    result.codes = ActivationCodes(batch.n, net.n_a);
    long long code_offset = 0;

    std::vector<Tensor4> values(nodes.size());
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        const auto& node = nodes[i];
        const std::vector<float>& w = net.weights[i];
        Tensor4 out;
        switch (node.kind) {
            case PrimKind::input:
                out = batch;
                break;
            case PrimKind::conv:
            case PrimKind::project1x1:
            case PrimKind::head1x1: {
                const std::size_t kernel_count = static_cast<std::size_t>(node.out_ch) *
                                                 node.in_ch * node.kernel * node.kernel;
                out = conv_forward(values[node.in_a],
                                   {w.data(), kernel_count},
                                   {w.data() + kernel_count, static_cast<std::size_t>(node.out_ch)},
                                   node.out_ch, node.kernel, node.stride, node.dilation,
                                   node.padding);
                break;
            }
            case PrimKind::sepconv: {
                const std::size_t dw = static_cast<std::size_t>(node.in_ch) * node.kernel *
                                       node.kernel;
                const std::size_t pw = static_cast<std::size_t>(node.out_ch) * node.in_ch;
                Tensor4 mid = depthwise_forward(values[node.in_a], {w.data(), dw}, node.kernel,
                                                node.stride, node.padding);
                out = conv_forward(mid, {w.data() + dw, pw},
                                   {w.data() + dw + pw, static_cast<std::size_t>(node.out_ch)},
                                   node.out_ch, 1, 1, 1, 0);
                break;
            }
            case PrimKind::pool_max:
                out = pool_forward(values[node.in_a], PoolKind::max, node.kernel, node.stride,
                                   node.padding);
                break;
            case PrimKind::pool_avg:
                out = pool_forward(values[node.in_a], PoolKind::avg, node.kernel, node.stride,
                                   node.padding);
                break;
            case PrimKind::subsample2:
                out = subsample2(values[node.in_a]);
                break;
            case PrimKind::upsample2x:
                out = upsample2x(values[node.in_a]);
                break;
            case PrimKind::add:
                out = combine_mean(values[node.in_a], values[node.in_b]);
                break;
            case PrimKind::concat:
                out = combine_concat(values[node.in_a], values[node.in_b]);
                break;
        }

        if (node.relu) {
            // Record 1[pre-activation > 0], then clamp. Exact zeros code as 0.
            const std::size_t plane = out.data.size() / out.n;
            for (int b = 0; b < out.n; ++b) {
                const float* src = out.data.data() + static_cast<std::size_t>(b) * plane;
                for (std::size_t u = 0; u < plane; ++u) {
                    if (src[u] > 0.0f) result.codes.set_bit(b, code_offset + u);
                }
            }
            code_offset += static_cast<long long>(plane);
            for (float& v : out.data) v = v > 0.0f ? v : 0.0f;
        }

        double mean = 0.0, sq = 0.0;
        for (float v : out.data) {
            mean += v;
            sq += static_cast<double>(v) * v;
        }
        mean /= static_cast<double>(out.data.size());
        result.node_output_std.push_back(
            std::sqrt(std::max(0.0, sq / static_cast<double>(out.data.size()) - mean * mean)));

        values[i] = std::move(out);
        // Release inputs that are no longer needed.
        if (node.in_a >= 0 && last_use[node.in_a] == i) values[node.in_a] = Tensor4{};
        if (node.in_b >= 0 && last_use[node.in_b] == i) values[node.in_b] = Tensor4{};
    }

    result.output = std::move(values[net.graph.output]);
    return result;
}

void dump_codes(const ActivationCodes& codes, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("dump_codes: cannot open " + path);
    const char magic[4] = {'R', 'N', 'A', 'C'};
    const std::uint32_t version = 1;
    const std::uint64_t rows = codes.rows;
    const std::uint64_t bits = codes.bits;
    std::fwrite(magic, 1, 4, f);
    std::fwrite(&version, sizeof version, 1, f);
    std::fwrite(&rows, sizeof rows, 1, f);
    std::fwrite(&bits, sizeof bits, 1, f);
    std::vector<std::uint8_t> row_bytes(codes.bits);
    for (int r = 0; r < codes.rows; ++r) {
        for (long long i = 0; i < codes.bits; ++i) row_bytes[i] = codes.bit(r, i) ? 1 : 0;
        std::fwrite(row_bytes.data(), 1, row_bytes.size(), f);
    }
    std::fclose(f);
}

}  // namespace radnas::fwd
