#include "radnas/tensor.hpp"

#include <algorithm>
#include <limits>

#include "radnas/graph.hpp"

namespace radnas::fwd {

namespace {

void check(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Tensor4 conv_forward(const Tensor4& input, std::span<const float> weights,
                     std::span<const float> bias, int out_ch, int kernel, int stride,
                     int dilation, int padding) {
    check(kernel % 2 == 1, "conv_forward: kernel must be odd");
    check(weights.size() == static_cast<std::size_t>(out_ch) * input.c * kernel * kernel,
          "conv_forward: weight size mismatch");
    check(bias.empty() || bias.size() == static_cast<std::size_t>(out_ch),
          "conv_forward: bias size mismatch");
    const int oh = arch::conv_out_dim(input.h, kernel, stride, dilation, padding);
    const int ow = arch::conv_out_dim(input.w, kernel, stride, dilation, padding);
    Tensor4 out(input.n, out_ch, oh, ow);

    for (int b = 0; b < input.n; ++b) {
        for (int oc = 0; oc < out_ch; ++oc) {
            float* dst = out.plane(b, oc);
            const float bias_v = bias.empty() ? 0.0f : bias[oc];
            std::fill(dst, dst + static_cast<std::size_t>(oh) * ow, bias_v);
            for (int ic = 0; ic < input.c; ++ic) {
                const float* src = input.plane(b, ic);
                const float* wk = weights.data() +
                                  (static_cast<std::size_t>(oc) * input.c + ic) * kernel * kernel;
                for (int ky = 0; ky < kernel; ++ky) {
                    for (int kx = 0; kx < kernel; ++kx) {
                        const float wv = wk[ky * kernel + kx];
                        if (wv == 0.0f) continue;
                        for (int y = 0; y < oh; ++y) {
                            const int iy = y * stride + ky * dilation - padding;
                            if (iy < 0 || iy >= input.h) continue;
                            const float* srow = src + static_cast<std::size_t>(iy) * input.w;
                            float* drow = dst + static_cast<std::size_t>(y) * ow;
                            // x * stride + kx * dilation - padding in [0, w)
                            const int off = kx * dilation - padding;
                            int x0 = 0;
                            while (x0 < ow && x0 * stride + off < 0) ++x0;
                            int x1 = ow;
                            while (x1 > x0 && (x1 - 1) * stride + off >= input.w) --x1;
                            if (stride == 1) {
                                const float* s = srow + off + x0;
                                for (int x = x0; x < x1; ++x) drow[x] += wv * s[x - x0];
                            } else {
                                for (int x = x0; x < x1; ++x) {
                                    drow[x] += wv * srow[x * stride + off];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor4 depthwise_forward(const Tensor4& input, std::span<const float> weights, int kernel,
                          int stride, int padding) {
    check(kernel % 2 == 1, "depthwise_forward: kernel must be odd");
    check(weights.size() == static_cast<std::size_t>(input.c) * kernel * kernel,
          "depthwise_forward: weight size mismatch");
    const int oh = arch::conv_out_dim(input.h, kernel, stride, 1, padding);
    const int ow = arch::conv_out_dim(input.w, kernel, stride, 1, padding);
    Tensor4 out(input.n, input.c, oh, ow);

    for (int b = 0; b < input.n; ++b) {
        for (int ch = 0; ch < input.c; ++ch) {
            const float* src = input.plane(b, ch);
            float* dst = out.plane(b, ch);
            const float* wk = weights.data() + static_cast<std::size_t>(ch) * kernel * kernel;
            for (int ky = 0; ky < kernel; ++ky) {
                for (int kx = 0; kx < kernel; ++kx) {
                    const float wv = wk[ky * kernel + kx];
                    for (int y = 0; y < oh; ++y) {
                        const int iy = y * stride + ky - padding;
                        if (iy < 0 || iy >= input.h) continue;
                        const float* srow = src + static_cast<std::size_t>(iy) * input.w;
                        float* drow = dst + static_cast<std::size_t>(y) * ow;
                        for (int x = 0; x < ow; ++x) {
                            const int ix = x * stride + kx - padding;
                            if (ix < 0 || ix >= input.w) continue;
                            drow[x] += wv * srow[ix];
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor4 pool_forward(const Tensor4& input, PoolKind kind, int kernel, int stride, int padding) {
    const int oh = arch::conv_out_dim(input.h, kernel, stride, 1, padding);
    const int ow = arch::conv_out_dim(input.w, kernel, stride, 1, padding);
    Tensor4 out(input.n, input.c, oh, ow);
    const float area = static_cast<float>(kernel) * kernel;

    for (int b = 0; b < input.n; ++b) {
        for (int ch = 0; ch < input.c; ++ch) {
            const float* src = input.plane(b, ch);
            float* dst = out.plane(b, ch);
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    float best = -std::numeric_limits<float>::infinity();
                    float sum = 0.0f;
                    for (int ky = 0; ky < kernel; ++ky) {
                        const int iy = y * stride + ky - padding;
                        if (iy < 0 || iy >= input.h) continue;
                        for (int kx = 0; kx < kernel; ++kx) {
                            const int ix = x * stride + kx - padding;
                            if (ix < 0 || ix >= input.w) continue;
                            const float v = src[static_cast<std::size_t>(iy) * input.w + ix];
                            best = std::max(best, v);
                            sum += v;
                        }
                    }
                    dst[static_cast<std::size_t>(y) * ow + x] =
                        kind == PoolKind::max ? best : sum / area;
                }
            }
        }
    }
    return out;
}

Tensor4 upsample2x(const Tensor4& input) {
    Tensor4 out(input.n, input.c, input.h * 2, input.w * 2);
    for (int b = 0; b < input.n; ++b) {
        for (int ch = 0; ch < input.c; ++ch) {
            const float* src = input.plane(b, ch);
            float* dst = out.plane(b, ch);
            for (int y = 0; y < out.h; ++y) {
                const float* srow = src + static_cast<std::size_t>(y / 2) * input.w;
                float* drow = dst + static_cast<std::size_t>(y) * out.w;
                for (int x = 0; x < out.w; ++x) drow[x] = srow[x / 2];
            }
        }
    }
    return out;
}

Tensor4 subsample2(const Tensor4& input) {
    Tensor4 out(input.n, input.c, (input.h + 1) / 2, (input.w + 1) / 2);
    for (int b = 0; b < input.n; ++b) {
        for (int ch = 0; ch < input.c; ++ch) {
            const float* src = input.plane(b, ch);
            float* dst = out.plane(b, ch);
            for (int y = 0; y < out.h; ++y) {
                const float* srow = src + static_cast<std::size_t>(y) * 2 * input.w;
                float* drow = dst + static_cast<std::size_t>(y) * out.w;
                for (int x = 0; x < out.w; ++x) drow[x] = srow[x * 2];
            }
        }
    }
    return out;
}

Tensor4 combine_add(const Tensor4& a, const Tensor4& b) {
    check(a.n == b.n && a.c == b.c && a.h == b.h && a.w == b.w,
          "combine_add: dimension mismatch");
    Tensor4 out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

Tensor4 combine_mean(const Tensor4& a, const Tensor4& b) {
    check(a.n == b.n && a.c == b.c && a.h == b.h && a.w == b.w,
          "combine_mean: dimension mismatch");
    Tensor4 out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = 0.5f * (out.data[i] + b.data[i]);
    }
    return out;
}

Tensor4 combine_concat(const Tensor4& a, const Tensor4& b) {
    check(a.n == b.n && a.h == b.h && a.w == b.w, "combine_concat: dimension mismatch");
    Tensor4 out(a.n, a.c + b.c, a.h, a.w);
    const std::size_t plane = static_cast<std::size_t>(a.h) * a.w;
    for (int i = 0; i < a.n; ++i) {
        std::copy_n(a.plane(i, 0), plane * a.c, out.plane(i, 0));
        std::copy_n(b.plane(i, 0), plane * b.c, out.plane(i, a.c));
    }
    return out;
}

}  // namespace radnas::fwd
