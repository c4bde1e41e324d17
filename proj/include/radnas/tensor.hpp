#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace radnas::fwd {

// Dense NCHW tensor, 32-bit floats.
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0f) {
        if (n_ < 1 || c_ < 1 || h_ < 1 || w_ < 1) {
            throw std::invalid_argument("Tensor4: all dims must be >= 1");
        }
    }

    std::size_t size() const { return data.size(); }

    float& at(int i, int j, int y, int x) {
        return data[((static_cast<std::size_t>(i) * c + j) * h + y) * w + x];
    }
    float at(int i, int j, int y, int x) const {
        return data[((static_cast<std::size_t>(i) * c + j) * h + y) * w + x];
    }

    // Contiguous H*W plane of one (sample, channel) pair.
    float* plane(int i, int j) {
        return data.data() + (static_cast<std::size_t>(i) * c + j) * h * w;
    }
    const float* plane(int i, int j) const {
        return data.data() + (static_cast<std::size_t>(i) * c + j) * h * w;
    }
};

enum class PoolKind { max, avg };

// Dense 2D cross-correlation with zero padding. weights layout is
// [out_ch][in_ch][k][k], bias one per output channel (may be empty).
Tensor4 conv_forward(const Tensor4& input, std::span<const float> weights,
                     std::span<const float> bias, int out_ch, int kernel, int stride,
                     int dilation, int padding);

// Depthwise k x k stage of a separable conv; weights [c][k][k], no bias.
Tensor4 depthwise_forward(const Tensor4& input, std::span<const float> weights, int kernel,
                          int stride, int padding);

// 3x3 pooling with zero padding. Average divides by the full window area
// (padded cells count as zeros); max ignores padded cells.
Tensor4 pool_forward(const Tensor4& input, PoolKind kind, int kernel, int stride, int padding);

Tensor4 upsample2x(const Tensor4& input);   // nearest-neighbor doubling
Tensor4 subsample2(const Tensor4& input);   // stride-2 pick

Tensor4 combine_add(const Tensor4& a, const Tensor4& b);
// Branch mean: what the expanded graph uses for combine=add. Without
// normalization layers a plain sum doubles the activation scale whenever the
// two branches coincide; the mean keeps per-layer scale stable at random
// initialization.
Tensor4 combine_mean(const Tensor4& a, const Tensor4& b);
Tensor4 combine_concat(const Tensor4& a, const Tensor4& b);  // along channels

}  // namespace radnas::fwd
