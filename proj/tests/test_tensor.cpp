#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radnas/tensor.hpp"

using namespace radnas::fwd;

namespace {

Tensor4 filled(int n, int c, int h, int w, std::initializer_list<float> vals) {
    Tensor4 t(n, c, h, w);
    REQUIRE(vals.size() == t.data.size());
    std::copy(vals.begin(), vals.end(), t.data.begin());
    return t;
}

}  // namespace

TEST_CASE("conv: 3x3 ones kernel over a 3x3 ones image, same padding") {
    Tensor4 in(1, 1, 3, 3);
    std::fill(in.data.begin(), in.data.end(), 1.0f);
    const std::vector<float> w(9, 1.0f);
    const std::vector<float> b{0.0f};
    const Tensor4 out = conv_forward(in, w, b, 1, 3, 1, 1, 1);
    // center sees all nine cells, corners see four, edges six
    CHECK(out.at(0, 0, 1, 1) == 9.0f);
    CHECK(out.at(0, 0, 0, 0) == 4.0f);
    CHECK(out.at(0, 0, 2, 2) == 4.0f);
    CHECK(out.at(0, 0, 0, 1) == 6.0f);
}

TEST_CASE("conv: delta kernel is the identity") {
    Tensor4 in = filled(1, 1, 2, 3, {1, -2, 3, 4, 5, -6});
    std::vector<float> w(9, 0.0f);
    w[4] = 1.0f;  // center tap
    const Tensor4 out = conv_forward(in, w, std::vector<float>{0.0f}, 1, 3, 1, 1, 1);
    CHECK(out.data == in.data);
}

TEST_CASE("conv: stride 2 on a 4x4 input gives 2x2") {
    Tensor4 in(1, 1, 4, 4);
    const std::vector<float> w(9, 1.0f);
    const Tensor4 out = conv_forward(in, w, std::vector<float>{0.0f}, 1, 3, 2, 1, 1);
    CHECK(out.h == 2);
    CHECK(out.w == 2);
}

TEST_CASE("conv: dilation 2 taps cells two apart") {
    Tensor4 in(1, 1, 5, 5);
    in.at(0, 0, 2, 2) = 1.0f;  // delta at center
    const std::vector<float> w(9, 1.0f);
    const Tensor4 out = conv_forward(in, w, std::vector<float>{0.0f}, 1, 3, 1, 2, 2);
    CHECK(out.h == 5);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) {
            const bool tapped = (y == 0 || y == 2 || y == 4) && (x == 0 || x == 2 || x == 4);
            CHECK(out.at(0, 0, y, x) == (tapped ? 1.0f : 0.0f));
        }
    }
}

TEST_CASE("conv: bias fills the output") {
    Tensor4 in(2, 1, 2, 2);
    const std::vector<float> w(9, 0.0f);
    const Tensor4 out = conv_forward(in, w, std::vector<float>{2.5f}, 1, 3, 1, 1, 1);
    for (float v : out.data) CHECK(v == 2.5f);
}

TEST_CASE("depthwise: channels stay independent") {
    Tensor4 in(1, 2, 2, 2);
    in.at(0, 0, 0, 0) = 1.0f;
    in.at(0, 1, 1, 1) = 2.0f;
    std::vector<float> w(2 * 9, 0.0f);
    w[4] = 1.0f;       // channel 0: identity
    w[9 + 4] = 10.0f;  // channel 1: x10
    const Tensor4 out = depthwise_forward(in, w, 3, 1, 1);
    CHECK(out.at(0, 0, 0, 0) == 1.0f);
    CHECK(out.at(0, 0, 1, 1) == 0.0f);
    CHECK(out.at(0, 1, 1, 1) == 20.0f);
}

TEST_CASE("max pool on constant input is constant") {
    Tensor4 in(1, 2, 4, 4);
    std::fill(in.data.begin(), in.data.end(), 3.5f);
    const Tensor4 out = pool_forward(in, PoolKind::max, 3, 1, 1);
    for (float v : out.data) CHECK(v == 3.5f);
}

TEST_CASE("avg pool: window means, zero padding counted in the area") {
    Tensor4 in = filled(1, 1, 3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    const Tensor4 out = pool_forward(in, PoolKind::avg, 3, 1, 1);
    CHECK(out.at(0, 0, 1, 1) == doctest::Approx(45.0f / 9.0f));
    // corner window covers cells 1,2,4,5; padded cells contribute zero
    CHECK(out.at(0, 0, 0, 0) == doctest::Approx(12.0f / 9.0f));
}

TEST_CASE("max pool with stride 2 halves dims") {
    Tensor4 in(1, 1, 8, 8);
    const Tensor4 out = pool_forward(in, PoolKind::max, 3, 2, 1);
    CHECK(out.h == 4);
    CHECK(out.w == 4);
}

TEST_CASE("upsample2x replicates each pixel into a 2x2 block") {
    Tensor4 in = filled(1, 1, 2, 2, {1, 2, 3, 4});
    const Tensor4 out = upsample2x(in);
    CHECK(out.h == 4);
    CHECK(out.at(0, 0, 0, 0) == 1.0f);
    CHECK(out.at(0, 0, 0, 1) == 1.0f);
    CHECK(out.at(0, 0, 1, 1) == 1.0f);
    CHECK(out.at(0, 0, 0, 2) == 2.0f);
    CHECK(out.at(0, 0, 3, 3) == 4.0f);
    CHECK(out.at(0, 0, 2, 0) == 3.0f);
}

TEST_CASE("subsample2 picks every other cell") {
    Tensor4 in = filled(1, 1, 4, 4,
                        {0, 1, 2, 3, 10, 11, 12, 13, 20, 21, 22, 23, 30, 31, 32, 33});
    const Tensor4 out = subsample2(in);
    CHECK(out.h == 2);
    CHECK(out.at(0, 0, 0, 0) == 0.0f);
    CHECK(out.at(0, 0, 0, 1) == 2.0f);
    CHECK(out.at(0, 0, 1, 0) == 20.0f);
    CHECK(out.at(0, 0, 1, 1) == 22.0f);
}

TEST_CASE("combine add and concat") {
    Tensor4 a = filled(1, 1, 1, 2, {1, 2});
    Tensor4 b = filled(1, 1, 1, 2, {10, 20});
    const Tensor4 sum = combine_add(a, b);
    CHECK(sum.at(0, 0, 0, 0) == 11.0f);
    CHECK(sum.at(0, 0, 0, 1) == 22.0f);

    const Tensor4 mean = combine_mean(a, b);
    CHECK(mean.at(0, 0, 0, 0) == 5.5f);
    CHECK(mean.at(0, 0, 0, 1) == 11.0f);
    // the mean of identical branches is the branch itself
    const Tensor4 same = combine_mean(a, a);
    CHECK(same.data == a.data);

    const Tensor4 cat = combine_concat(a, b);
    CHECK(cat.c == 2);
    CHECK(cat.at(0, 0, 0, 0) == 1.0f);
    CHECK(cat.at(0, 1, 0, 1) == 20.0f);

    Tensor4 c(1, 1, 2, 2);
    CHECK_THROWS_AS(combine_add(a, c), std::invalid_argument);
    CHECK_THROWS_AS(combine_concat(a, c), std::invalid_argument);
}

TEST_CASE("tensor dims must be positive") {
    CHECK_THROWS_AS(Tensor4(0, 1, 1, 1), std::invalid_argument);
}
