#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "radnas/network.hpp"

namespace radnas::naswot {

// K[a][b] = N_A - d_H(c_a, c_b): the number of ReLU sites on which inputs
// a and b produced the same binary code. Symmetric, diagonal = N_A.
struct HammingKernel {
    int n = 0;
    long long n_a = 0;
    std::vector<double> values;  // row-major n x n

    double at(int a, int b) const { return values[static_cast<std::size_t>(a) * n + b]; }
};

// Sentinel for degenerate kernels (singular or numerically zero determinant).
inline constexpr double kScoreSentinel = -std::numeric_limits<double>::infinity();

HammingKernel hamming_kernel(const fwd::ActivationCodes& codes);

// log |K_H| via LU with partial pivoting in 64-bit. Returns kScoreSentinel
// when |det| < 1e-300 or the factorization hits a zero pivot.
double naswot_score(const HammingKernel& kernel);

// Running min-max over the finite raw scores seen by one search run; maps
// raw scores onto the [0, 1] rewards the tree search consumes.
struct RewardNormalizer {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    long long observed = 0;

    void update(double raw) {
        if (!std::isfinite(raw)) return;
        lo = raw < lo ? raw : lo;
        hi = raw > hi ? raw : hi;
        ++observed;
    }

    double map(double raw) const {
        if (!std::isfinite(raw)) return 0.0;  // sentinel
        if (observed == 0) return 0.5;
        if (hi <= lo) return 0.5;  // single observation or all scores equal
        const double r = (raw - lo) / (hi - lo);
        return r < 0.0 ? 0.0 : (r > 1.0 ? 1.0 : r);
    }
};

// Updates the normalizer with raw, then maps it.
inline double normalize_reward(double raw, RewardNormalizer& norm) {
    norm.update(raw);
    return norm.map(raw);
}

}  // namespace radnas::naswot
