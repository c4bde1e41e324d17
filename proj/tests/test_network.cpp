#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radnas/network.hpp"
#include "radnas/rng.hpp"

using namespace radnas;
using namespace radnas::fwd;
using namespace radnas::arch;

namespace {

BlockSpec block(int ia, int ib, OpKind a, OpKind b, CombineKind c) {
    return BlockSpec{ia, ib, a, b, c};
}

ArchitectureSpec conv_pool_fixture() {
    // same spec as the 893-parameter hand enumeration in test_arch
    ArchitectureSpec s;
    s.normal = {CellKind::normal, block(0, 0, OpKind::conv3x3, OpKind::identity,
                                        CombineKind::add)};
    s.reduction = {CellKind::reduction,
                   block(0, 0, OpKind::maxpool3x3, OpKind::maxpool3x3, CombineKind::add)};
    s.upsample = {CellKind::upsample,
                  block(0, 0, OpKind::identity, OpKind::identity, CombineKind::add)};
    s.macro.reduction_stages = 1;
    s.macro.base_channels = 4;
    return s;
}

ArchitectureSpec sep_concat_fixture() {
    ArchitectureSpec s;
    s.normal = {CellKind::normal,
                block(0, 1, OpKind::sepconv3x3, OpKind::avgpool3x3, CombineKind::concat)};
    s.reduction = {CellKind::reduction,
                   block(0, 0, OpKind::conv5x5, OpKind::dilconv3x3, CombineKind::add)};
    s.upsample = {CellKind::upsample,
                  block(0, 1, OpKind::sepconv5x5, OpKind::identity, CombineKind::concat)};
    s.macro.reduction_stages = 1;
    s.macro.base_channels = 4;
    return s;
}

ArchState random_terminal(std::uint64_t seed) {
    ArchState s;
    Rng rng(seed);
    while (!s.is_terminal()) {
        s = apply_move(s, rng.uniform_int(phase_branching(s.depth(), false)));
    }
    return s;
}

// Two-layer network with hand-set weights: conv3x3 1->2 (ReLU) then a 1x1
// head. Built directly on the layer graph, bypassing cell expansion.
NetworkInstance hand_network() {
    NetworkInstance net;
    net.in_ch = 1;
    net.in_h = 2;
    net.in_w = 2;

    LayerNode input;
    input.kind = PrimKind::input;
    input.out_ch = 1;
    input.out_h = 2;
    input.out_w = 2;

    LayerNode conv;
    conv.kind = PrimKind::conv;
    conv.in_a = 0;
    conv.kernel = 3;
    conv.stride = 1;
    conv.dilation = 1;
    conv.padding = 1;
    conv.relu = true;
    conv.in_ch = 1;
    conv.in_h = 2;
    conv.in_w = 2;
    conv.out_ch = 2;
    conv.out_h = 2;
    conv.out_w = 2;
    conv.params = 2 * 9 + 2;

    LayerNode head;
    head.kind = PrimKind::head1x1;
    head.in_a = 1;
    head.kernel = 1;
    head.in_ch = 2;
    head.in_h = 2;
    head.in_w = 2;
    head.out_ch = 1;
    head.out_h = 2;
    head.out_w = 2;
    head.params = 3;

    net.graph.nodes = {input, conv, head};
    net.graph.output = 2;
    net.graph.relu_units = 2 * 2 * 2;
    net.n_a = 8;

    // filter 0: delta at center (identity); filter 1: all 0.25, bias -1.
    std::vector<float> conv_w(2 * 9, 0.0f);
    conv_w[4] = 1.0f;
    for (int i = 9; i < 18; ++i) conv_w[i] = 0.25f;
    conv_w.push_back(0.0f);   // bias filter 0
    conv_w.push_back(-1.0f);  // bias filter 1
    // head: w = [1, 2], bias 0.5
    std::vector<float> head_w = {1.0f, 2.0f, 0.5f};
    net.weights = {{}, conv_w, head_w};
    return net;
}

}  // namespace

TEST_CASE("init_network is bitwise deterministic per seed") {
    const ArchitectureSpec spec = conv_pool_fixture();
    const NetworkInstance a = init_network(spec, 16, 16, 42);
    const NetworkInstance b = init_network(spec, 16, 16, 42);
    REQUIRE(a.weights.size() == b.weights.size());
    for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == b.weights[i]);

    const NetworkInstance c = init_network(spec, 16, 16, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.weights.size() && !any_diff; ++i) {
        any_diff = a.weights[i] != c.weights[i];
    }
    CHECK(any_diff);
}

TEST_CASE("biases start at zero") {
    const ArchitectureSpec spec = conv_pool_fixture();
    const NetworkInstance net = init_network(spec, 16, 16, 7);
    for (std::size_t i = 0; i < net.graph.nodes.size(); ++i) {
        const auto& node = net.graph.nodes[i];
        if (node.kind == PrimKind::conv || node.kind == PrimKind::project1x1 ||
            node.kind == PrimKind::head1x1) {
            const auto& w = net.weights[i];
            for (int b = 0; b < node.out_ch; ++b) {
                CHECK(w[w.size() - node.out_ch + b] == 0.0f);
            }
        }
    }
}

TEST_CASE("N_A matches hand-computed shape propagation on the fixture at 16x16") {
    // ReLU sites of the 893-parameter fixture at 16x16 (searched convs only;
    // alignment projections and the head are linear):
    //   enc0 conv3x3     4ch * 16*16 = 1024
    //   bottleneck conv  8ch * 8*8   =  512
    //   dec0 conv3x3     4ch * 16*16 = 1024
    //   total                        = 2560
    const NetworkInstance net = init_network(conv_pool_fixture(), 16, 16, 1);
    CHECK(net.n_a == 2560);
}

TEST_CASE("N_A is zero for a network with no parameterized ops") {
    ArchitectureSpec s;
    s.normal = {CellKind::normal, block(0, 0, OpKind::identity, OpKind::identity,
                                        CombineKind::add)};
    s.reduction = {CellKind::reduction,
                   block(0, 0, OpKind::maxpool3x3, OpKind::avgpool3x3, CombineKind::add)};
    s.upsample = {CellKind::upsample,
                  block(0, 0, OpKind::identity, OpKind::identity, CombineKind::add)};
    s.macro.reduction_stages = 1;
    s.macro.base_channels = 4;
    s.with_head = false;
    const NetworkInstance net = init_network(s, 16, 16, 1);
    CHECK(net.n_a == 0);  // pools, identity and resizes carry no ReLU
}

TEST_CASE("forward matches the manual two-layer oracle exactly") {
    const NetworkInstance net = hand_network();
    Tensor4 batch(2, 1, 2, 2);
    // input 0: [[1,-2],[3,4]]; input 1: zeros
    batch.at(0, 0, 0, 0) = 1.0f;
    batch.at(0, 0, 0, 1) = -2.0f;
    batch.at(0, 0, 1, 0) = 3.0f;
    batch.at(0, 0, 1, 1) = 4.0f;

    const ForwardResult fr = forward(net, batch);

    // Filter 0 pre-activations equal the input; filter 1 sees the full image
    // at every position (3x3 window on a 2x2 map): 6*0.25 - 1 = 0.5.
    // Head output = relu0 * 1 + relu1 * 2 + 0.5.
    CHECK(fr.output.at(0, 0, 0, 0) == 2.5f);   // 1 + 1 + 0.5
    CHECK(fr.output.at(0, 0, 0, 1) == 1.5f);   // 0 + 1 + 0.5
    CHECK(fr.output.at(0, 0, 1, 0) == 4.5f);   // 3 + 1 + 0.5
    CHECK(fr.output.at(0, 0, 1, 1) == 5.5f);   // 4 + 1 + 0.5
    // zero input: filter 0 gives 0, filter 1 gives -1 -> relu 0
    CHECK(fr.output.at(1, 0, 0, 0) == 0.5f);

    // codes, in layer order: filter-0 plane then filter-1 plane
    REQUIRE(fr.codes.bits == 8);
    const bool expected_row0[8] = {true, false, true, true, true, true, true, true};
    for (int i = 0; i < 8; ++i) CHECK(fr.codes.bit(0, i) == expected_row0[i]);
    for (int i = 0; i < 8; ++i) CHECK_FALSE(fr.codes.bit(1, i));  // all-zero input, 0 is inactive
}

TEST_CASE("identical inputs give identical code rows") {
    const NetworkInstance net = init_network(conv_pool_fixture(), 16, 16, 5);
    Tensor4 batch(2, 1, 16, 16);
    Rng rng(11);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            const float v = static_cast<float>(rng.normal());
            batch.at(0, 0, y, x) = v;
            batch.at(1, 0, y, x) = v;
        }
    }
    const ForwardResult fr = forward(net, batch);
    for (long long i = 0; i < fr.codes.bits; ++i) CHECK(fr.codes.bit(0, i) == fr.codes.bit(1, i));
}

TEST_CASE("all-zero input through a bias-free net codes to all zeros") {
    NetworkInstance net = hand_network();
    net.weights[1][18] = 0.0f;  // zero both conv biases
    net.weights[1][19] = 0.0f;
    Tensor4 batch(1, 1, 2, 2);
    const ForwardResult fr = forward(net, batch);
    for (long long i = 0; i < fr.codes.bits; ++i) CHECK_FALSE(fr.codes.bit(0, i));
}

TEST_CASE("forward is deterministic and pure") {
    const NetworkInstance net = init_network(sep_concat_fixture(), 16, 16, 9);
    Tensor4 batch(3, 1, 16, 16);
    Rng rng(21);
    for (float& v : batch.data) v = static_cast<float>(rng.normal());
    const ForwardResult a = forward(net, batch);
    const ForwardResult b = forward(net, batch);
    CHECK(a.output.data == b.output.data);
    CHECK(a.codes.words == b.codes.words);
}

TEST_CASE("forward rejects mismatched batch dims") {
    const NetworkInstance net = init_network(conv_pool_fixture(), 16, 16, 3);
    Tensor4 batch(1, 1, 8, 8);
    CHECK_THROWS_AS(forward(net, batch), std::invalid_argument);
}

TEST_CASE("shape soundness fuzz: 500 random architectures at 16x16") {
    MacroConfig macro;
    macro.reduction_stages = 2;
    macro.base_channels = 8;
    Tensor4 batch(2, 1, 16, 16);
    Rng rng(77);
    for (float& v : batch.data) v = static_cast<float>(rng.normal());

    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const ArchState t = random_terminal(derive_seed(500, seed));
        const NetworkInstance net = init_network(build_spec(t, macro), 16, 16, seed);
        const ForwardResult fr = forward(net, batch);
        CHECK(fr.output.c == 1);
        CHECK(fr.output.h == 16);
        CHECK(fr.output.w == 16);
        CHECK(fr.codes.bits == net.n_a);
    }
}

TEST_CASE("per-layer output std stays in a sane range on the fixtures") {
    Tensor4 batch(4, 1, 16, 16);
    Rng rng(31);
    for (float& v : batch.data) v = static_cast<float>(rng.normal());  // unit variance input
    for (const ArchitectureSpec& spec : {conv_pool_fixture(), sep_concat_fixture()}) {
        const NetworkInstance net = init_network(spec, 16, 16, 13);
        const ForwardResult fr = forward(net, batch);
        for (std::size_t i = 1; i < net.graph.nodes.size(); ++i) {
            CHECK(fr.node_output_std[i] > 0.1);
            CHECK(fr.node_output_std[i] < 10.0);
        }
    }
}

TEST_CASE("code dump writes the documented header") {
    const NetworkInstance net = hand_network();
    Tensor4 batch(1, 1, 2, 2);
    batch.at(0, 0, 0, 0) = 1.0f;
    const ForwardResult fr = forward(net, batch);
    const std::string path = "codes_dump_test.bin";
    dump_codes(fr.codes, path);
    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f);
    char magic[4];
    std::uint32_t version;
    std::uint64_t rows, bits;
    REQUIRE(std::fread(magic, 1, 4, f) == 4);
    REQUIRE(std::fread(&version, 4, 1, f) == 1);
    REQUIRE(std::fread(&rows, 8, 1, f) == 1);
    REQUIRE(std::fread(&bits, 8, 1, f) == 1);
    CHECK(std::string(magic, 4) == "RNAC");
    CHECK(version == 1);
    CHECK(rows == 1);
    CHECK(bits == 8);
    std::vector<std::uint8_t> bytes(8);
    REQUIRE(std::fread(bytes.data(), 1, 8, f) == 8);
    for (int i = 0; i < 8; ++i) CHECK(bytes[i] == (fr.codes.bit(0, i) ? 1 : 0));
    std::fclose(f);
    std::remove(path.c_str());
}
