#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "radnas/naswot.hpp"
#include "radnas/rng.hpp"

using namespace radnas;
using namespace radnas::naswot;
using radnas::fwd::ActivationCodes;

namespace {

ActivationCodes random_codes(int rows, long long bits, std::uint64_t seed) {
    ActivationCodes c(rows, bits);
    Rng rng(seed);
    for (int r = 0; r < rows; ++r) {
        for (long long i = 0; i < bits; ++i) {
            if (rng.uniform01() < 0.5) c.set_bit(r, i);
        }
    }
    return c;
}

// Independent oracle: per-pair nested loop over individual bits.
double brute_force_entry(const ActivationCodes& c, int a, int b) {
    long long dist = 0;
    for (long long i = 0; i < c.bits; ++i) {
        if (c.bit(a, i) != c.bit(b, i)) ++dist;
    }
    return static_cast<double>(c.bits - dist);
}

HammingKernel diag_kernel(std::initializer_list<double> diag) {
    HammingKernel k;
    k.n = static_cast<int>(diag.size());
    k.values.assign(static_cast<std::size_t>(k.n) * k.n, 0.0);
    int i = 0;
    for (double v : diag) {
        k.values[static_cast<std::size_t>(i) * k.n + i] = v;
        ++i;
    }
    return k;
}

}  // namespace

TEST_CASE("kernel of a single row is [N_A]") {
    ActivationCodes c(1, 100);
    for (long long i = 0; i < 40; ++i) c.set_bit(0, i);
    const HammingKernel k = hamming_kernel(c);
    CHECK(k.n == 1);
    CHECK(k.at(0, 0) == 100.0);
}

TEST_CASE("rows differing in every bit produce a diagonal kernel") {
    ActivationCodes c(2, 70);
    for (long long i = 0; i < 70; ++i) c.set_bit(0, i);  // row 1 stays all zero
    const HammingKernel k = hamming_kernel(c);
    CHECK(k.at(0, 0) == 70.0);
    CHECK(k.at(1, 1) == 70.0);
    CHECK(k.at(0, 1) == 0.0);
    CHECK(k.at(1, 0) == 0.0);
}

TEST_CASE("kernel matches the brute-force pairwise bit count") {
    const ActivationCodes c = random_codes(4, 6, 99);
    const HammingKernel k = hamming_kernel(c);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            CHECK(k.at(a, b) == brute_force_entry(c, a, b));
        }
    }
}

TEST_CASE("kernel fuzz: symmetry, diagonal, range, brute-force equality") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int rows = 2 + static_cast<int>(seed % 7);
        const long long bits = 1 + static_cast<long long>((seed * 37) % 200);
        const ActivationCodes c = random_codes(rows, bits, derive_seed(5, seed));
        const HammingKernel k = hamming_kernel(c);
        for (int a = 0; a < rows; ++a) {
            CHECK(k.at(a, a) == static_cast<double>(bits));
            for (int b = 0; b < rows; ++b) {
                CHECK(k.at(a, b) == k.at(b, a));
                CHECK(k.at(a, b) >= 0.0);
                CHECK(k.at(a, b) <= static_cast<double>(bits));
                CHECK(k.at(a, b) == brute_force_entry(c, a, b));
            }
        }
    }
}

TEST_CASE("empty batch is rejected") {
    ActivationCodes empty;
    CHECK_THROWS_AS(hamming_kernel(empty), std::invalid_argument);
}

TEST_CASE("score of [100] is log 100") {
    CHECK(naswot_score(diag_kernel({100.0})) ==
          doctest::Approx(4.605170185988092).epsilon(1e-12));
}

TEST_CASE("score of diag(64, 64) is 2 log 64") {
    CHECK(naswot_score(diag_kernel({64.0, 64.0})) ==
          doctest::Approx(8.317766166719343).epsilon(1e-12));
}

TEST_CASE("duplicate code rows force the sentinel") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int rows = 2 + static_cast<int>(seed % 5);
        const long long bits = 16 + static_cast<long long>(seed % 64);
        ActivationCodes c = random_codes(rows, bits, derive_seed(6, seed));
        // duplicate an existing row into the next slot
        ActivationCodes dup(rows + 1, bits);
        for (int r = 0; r < rows; ++r) {
            for (long long i = 0; i < bits; ++i) {
                if (c.bit(r, i)) dup.set_bit(r, i);
            }
        }
        const int src = static_cast<int>(seed % rows);
        for (long long i = 0; i < bits; ++i) {
            if (c.bit(src, i)) dup.set_bit(rows, i);
        }
        CHECK(naswot_score(hamming_kernel(dup)) == kScoreSentinel);
    }
}

TEST_CASE("batch permutation leaves the score unchanged") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int rows = 5;
        const long long bits = 120;
        const ActivationCodes c = random_codes(rows, bits, derive_seed(7, seed));
        const double base = naswot_score(hamming_kernel(c));
        if (base == kScoreSentinel) continue;

        std::vector<int> perm = {0, 1, 2, 3, 4};
        Rng rng(seed);
        for (int i = rows - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
        ActivationCodes shuffled(rows, bits);
        for (int r = 0; r < rows; ++r) {
            for (long long i = 0; i < bits; ++i) {
                if (c.bit(perm[r], i)) shuffled.set_bit(r, i);
            }
        }
        const double permuted = naswot_score(hamming_kernel(shuffled));
        CHECK(std::fabs(permuted - base) <= 1e-9 * std::fabs(base));
    }
}

TEST_CASE("normalizer: sentinel maps to zero") {
    RewardNormalizer norm;
    CHECK(normalize_reward(kScoreSentinel, norm) == 0.0);
    CHECK(norm.observed == 0);  // sentinels are not observations
}

TEST_CASE("normalizer: single observation maps to one half") {
    RewardNormalizer norm;
    CHECK(normalize_reward(42.0, norm) == 0.5);
}

TEST_CASE("normalizer: current max maps to one, min to zero, midpoints linear") {
    RewardNormalizer norm;
    normalize_reward(10.0, norm);
    CHECK(normalize_reward(30.0, norm) == 1.0);  // raw equals the running max
    CHECK(norm.map(10.0) == 0.0);
    CHECK(norm.map(15.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(norm.map(25.0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("normalizer output always lies in [0,1]") {
    RewardNormalizer norm;
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double raw = (rng.uniform01() - 0.5) * 1e6;
        const double reward = normalize_reward(raw, norm);
        CHECK(reward >= 0.0);
        CHECK(reward <= 1.0);
    }
}

TEST_CASE("normalization preserves the argmax over a fixed score set") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> raws;
        for (int i = 0; i < 10; ++i) raws.push_back(rng.normal() * 50.0);
        RewardNormalizer norm;
        for (double r : raws) norm.update(r);
        int argmax_raw = 0, argmax_reward = 0;
        for (int i = 1; i < 10; ++i) {
            if (raws[i] > raws[argmax_raw]) argmax_raw = i;
            if (norm.map(raws[i]) > norm.map(raws[argmax_reward])) argmax_reward = i;
        }
        CHECK(argmax_raw == argmax_reward);
    }
}
