#include "radnas/naswot.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace radnas::naswot {

HammingKernel hamming_kernel(const fwd::ActivationCodes& codes) {
    if (codes.rows < 1) throw std::invalid_argument("hamming_kernel: empty batch");
    HammingKernel k;
    k.n = codes.rows;
    k.n_a = codes.bits;
    k.values.assign(static_cast<std::size_t>(k.n) * k.n, 0.0);
    for (int a = 0; a < k.n; ++a) {
        k.values[static_cast<std::size_t>(a) * k.n + a] = static_cast<double>(codes.bits);
        const std::uint64_t* ra = codes.row(a);
        for (int b = a + 1; b < k.n; ++b) {
            const std::uint64_t* rb = codes.row(b);
            long long dist = 0;
            for (int w = 0; w < codes.words_per_row; ++w) {
                dist += std::popcount(ra[w] ^ rb[w]);
            }
            const double v = static_cast<double>(codes.bits - dist);
            k.values[static_cast<std::size_t>(a) * k.n + b] = v;
            k.values[static_cast<std::size_t>(b) * k.n + a] = v;
        }
    }
    return k;
}

double naswot_score(const HammingKernel& kernel) {
    const int n = kernel.n;
    std::vector<double> a = kernel.values;  // working copy, row-major
    double log_abs_det = 0.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::fabs(a[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) return kScoreSentinel;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a[static_cast<std::size_t>(pivot) * n + c],
                          a[static_cast<std::size_t>(col) * n + c]);
            }
        }
        const double p = a[static_cast<std::size_t>(col) * n + col];
        log_abs_det += std::log(std::fabs(p));
        for (int r = col + 1; r < n; ++r) {
            const double factor = a[static_cast<std::size_t>(r) * n + col] / p;
            if (factor == 0.0) continue;
            for (int c = col + 1; c < n; ++c) {
                a[static_cast<std::size_t>(r) * n + c] -=
                    factor * a[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    // |det| < 1e-300 counts as numerically zero. No jitter: a degenerate
    // kernel means the network cannot separate the batch and earns reward 0.
    if (!std::isfinite(log_abs_det) || log_abs_det < std::log(1e-300)) return kScoreSentinel;
    return log_abs_det;
}

}  // namespace radnas::naswot
