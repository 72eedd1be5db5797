#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "speechcare/checkpoint.hpp"
#include "speechcare/layers.hpp"

using namespace speechcare;
using namespace speechcare::nn;

namespace {

Mat<double> random_mat(int r, int c, Rng& rng, double scale = 1.0) {
    Mat<double> m(r, c);
    for (auto& v : m.v) v = rng.normal(0.0, scale);
    return m;
}

// Small CSE-style stack used by the gradient tests.
struct TinyStack {
    DenseLayer<double> proj;
    Parameter<double> cls;
    AttentionBlock<double> b0, b1;
    DenseLayer<double> head;

    TinyStack(std::uint64_t seed)
        : proj("proj", 17, 8, Activation::tanh, ParamGroup::acoustic, seed),
          cls("cls", 1, 8, ParamGroup::acoustic),
          b0("cse.0", 8, 4, 0.0, ParamGroup::acoustic, seed),
          b1("cse.1", 8, 4, 0.0, ParamGroup::acoustic, seed),
          head("head", 8, 3, Activation::none, ParamGroup::head, seed) {
        init_embedding(cls, seed);
    }

    double loss(const Mat<double>& x, int label, bool backward = false) {
        Tape<double> t;
        auto h = proj.forward(t, t.input(x));
        auto seq = t.concat_rows({t.param(cls), h});
        seq = b0.forward(t, seq);
        seq = b1.forward(t, seq);
        auto logits = head.forward(t, t.slice_rows(seq, 0, 1));
        auto l = t.cross_entropy_with_logits(logits, label);
        if (backward) t.backward(l);
        return t.value(l).v[0];
    }

    std::vector<Parameter<double>*> params() {
        std::vector<Parameter<double>*> out;
        proj.collect(out);
        out.push_back(&cls);
        b0.collect(out);
        b1.collect(out);
        head.collect(out);
        return out;
    }
};

}  // namespace

TEST_SUITE("nn-core") {

TEST_CASE("dense forward: identity weight, zero bias, no activation") {
    DenseLayer<double> layer("d", 3, 3, Activation::none, ParamGroup::head, 1);
    layer.weight.value.fill(0.0);
    for (int i = 0; i < 3; ++i) layer.weight.value.at(i, i) = 1.0;
    layer.bias.value.fill(0.0);
    Rng rng(2);
    const Mat<double> x = random_mat(4, 3, rng);
    const Mat<double> y = dense_forward(layer, x);
    for (std::size_t i = 0; i < x.v.size(); ++i) CHECK(y.v[i] == doctest::Approx(x.v[i]));
}

TEST_CASE("dense forward: zero weight and bias with tanh gives zeros") {
    DenseLayer<double> layer("d", 4, 2, Activation::tanh, ParamGroup::head, 1);
    layer.weight.value.fill(0.0);
    layer.bias.value.fill(0.0);
    Rng rng(3);
    const Mat<double> y = dense_forward(layer, random_mat(3, 4, rng));
    for (const double v : y.v) CHECK(v == 0.0);
}

TEST_CASE("dense forward matches the naive matmul oracle") {
    Rng rng(4);
    DenseLayer<double> layer("d", 4, 2, Activation::none, ParamGroup::head, 4);
    const Mat<double> x = random_mat(3, 4, rng);
    const Mat<double> y = dense_forward(layer, x);
    const Mat<double> expect = oracle::matmul_naive(x, transposed(layer.weight.value));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(y.at(i, j) - (expect.at(i, j) + layer.bias.value.v[j])) < 1e-12);
}

TEST_CASE("dense forward rejects a width mismatch") {
    DenseLayer<double> layer("d", 4, 2, Activation::none, ParamGroup::head, 1);
    CHECK_THROWS_AS(dense_forward(layer, Mat<double>(3, 5)), ShapeError);
}

TEST_CASE("softmax of zeros is uniform") {
    const Mat<double> y = softmax(Mat<double>::row_vector({0.0, 0.0, 0.0}));
    for (const double v : y.v) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("softmax is shift invariant") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Mat<double> v(1, 5);
        for (auto& x : v.v) x = rng.normal(0.0, 3.0);
        Mat<double> shifted = v;
        const double c = rng.uniform(-10.0, 10.0);
        for (auto& x : shifted.v) x += c;
        const Mat<double> a = softmax(v), b = softmax(shifted);
        for (std::size_t i = 0; i < a.v.size(); ++i) CHECK(std::abs(a.v[i] - b.v[i]) < 1e-12);
    }
}

TEST_CASE("softmax [1,2,3] matches the direct exp/sum oracle") {
    const Mat<double> y = softmax(Mat<double>::row_vector({1.0, 2.0, 3.0}));
    const auto expect = oracle::softmax_direct({1.0, 2.0, 3.0});
    for (int i = 0; i < 3; ++i) CHECK(std::abs(y.v[i] - expect[i]) < 1e-15);
}

TEST_CASE("softmax outputs are positive and sum to one") {
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        Mat<double> v(1, 1 + static_cast<int>(rng.below(8)));
        for (auto& x : v.v) x = rng.normal(0.0, 20.0);
        const Mat<double> y = softmax(v);
        double sum = 0.0;
        for (const double p : y.v) {
            CHECK(p > 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("softmax of an empty vector is a domain error") {
    CHECK_THROWS_AS(softmax(Mat<double>(1, 0)), DomainError);
}

TEST_CASE("layer norm maps a constant vector to the shift") {
    const std::vector<double> ones(3, 1.0), zeros(3, 0.0);
    const auto y = layer_norm<double>({5.0, 5.0, 5.0}, ones, zeros);
    for (const double v : y) CHECK(v == 0.0);

    const std::vector<double> zero_scale(3, 0.0), shift(3, 2.5);
    const auto c = layer_norm<double>({1.0, 7.0, -2.0}, zero_scale, shift);
    for (const double v : c) CHECK(v == 2.5);
}

TEST_CASE("layer norm of [1,3] is about [-1,1]") {
    const auto y = layer_norm<double>({1.0, 3.0}, {1.0, 1.0}, {0.0, 0.0});
    CHECK(std::abs(y[0] + 0.999995) < 1e-6);
    CHECK(std::abs(y[1] - 0.999995) < 1e-6);
    CHECK(std::abs(y[0] + 1.0) < 1e-4);
    CHECK(std::abs(y[1] - 1.0) < 1e-4);
}

TEST_CASE("layer norm needs length two") {
    CHECK_THROWS_AS(layer_norm<double>({1.0}, {1.0}, {0.0}), DomainError);
}

TEST_CASE("attention: single-position sequence") {
    // With one token the attention weight is 1, so the block reduces to
    // layer_norm(x + Wo(Wv x + bv) + bo).
    AttentionBlock<double> block("b", 8, 4, 0.0, ParamGroup::head, 9);
    Rng rng(10);
    const Mat<double> x = random_mat(1, 8, rng);
    const Mat<double> y = multi_head_attention(block, x);
    REQUIRE(y.rows == 1);
    REQUIRE(y.cols == 8);

    const Mat<double> v = block.wv.apply(x);
    const Mat<double> proj = block.wo.apply(v);
    std::vector<double> pre(8), scale(8), shift(8);
    for (int j = 0; j < 8; ++j) {
        pre[j] = x.v[j] + proj.v[j];
        scale[j] = block.norm_scale.value.v[j];
        shift[j] = block.norm_shift.value.v[j];
    }
    const auto expect = layer_norm<double>(pre, scale, shift);
    for (int j = 0; j < 8; ++j) CHECK(std::abs(y.v[j] - expect[j]) < 1e-12);
}

TEST_CASE("attention: 3 tokens, 1 head, identity projections matches hand computation") {
    const int d = 4;
    AttentionBlock<double> block("b", d, 1, 0.0, ParamGroup::head, 3);
    for (auto* layer : {&block.wq, &block.wk, &block.wv, &block.wo}) {
        layer->weight.value.fill(0.0);
        for (int i = 0; i < d; ++i) layer->weight.value.at(i, i) = 1.0;
        layer->bias.value.fill(0.0);
    }
    Rng rng(11);
    const Mat<double> x = random_mat(3, d, rng);
    const Mat<double> y = multi_head_attention(block, x);

    // Hand computation: scores = x x^T / sqrt(d), row softmax, times x,
    // residual, layer norm.
    for (int i = 0; i < 3; ++i) {
        std::vector<double> scores(3);
        for (int j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (int k = 0; k < d; ++k) dot += x.at(i, k) * x.at(j, k);
            scores[j] = dot / std::sqrt(static_cast<double>(d));
        }
        const auto weights = oracle::softmax_direct(scores);
        std::vector<double> pre(d);
        for (int k = 0; k < d; ++k) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j) acc += weights[j] * x.at(j, k);
            pre[k] = x.at(i, k) + acc;
        }
        const auto expect =
            layer_norm<double>(pre, std::vector<double>(d, 1.0), std::vector<double>(d, 0.0));
        for (int k = 0; k < d; ++k) CHECK(std::abs(y.at(i, k) - expect[k]) < 1e-10);
    }
}

TEST_CASE("attention is permutation equivariant") {
    AttentionBlock<double> block("b", 8, 2, 0.0, ParamGroup::head, 12);
    Rng rng(13);
    const Mat<double> x = random_mat(5, 8, rng);
    const std::vector<int> perm{3, 0, 4, 1, 2};
    Mat<double> xp(5, 8);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 8; ++j) xp.at(i, j) = x.at(perm[i], j);
    const Mat<double> y = multi_head_attention(block, x);
    const Mat<double> yp = multi_head_attention(block, xp);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 8; ++j)
            CHECK(std::abs(yp.at(i, j) - y.at(perm[i], j)) < 1e-12);
}

TEST_CASE("attention keeps the input shape and is deterministic without dropout") {
    AttentionBlock<float> block("b", 16, 4, 0.1f, ParamGroup::head, 14);
    Rng rng(15);
    Mat<float> x(9, 16);
    for (auto& v : x.v) v = static_cast<float>(rng.normal());
    const Mat<float> a = multi_head_attention(block, x, false);
    const Mat<float> b = multi_head_attention(block, x, false);
    REQUIRE(a.rows == 9);
    REQUIRE(a.cols == 16);
    CHECK(a.v == b.v);  // bitwise
}

TEST_CASE("attention dropout draws differ between training passes") {
    AttentionBlock<float> block("b", 16, 4, 0.5f, ParamGroup::head, 16);
    Rng rng(17);
    Mat<float> x(6, 16);
    for (auto& v : x.v) v = static_cast<float>(rng.normal());
    Rng d1(100), d2(200);
    const Mat<float> a = multi_head_attention(block, x, true, &d1);
    const Mat<float> b = multi_head_attention(block, x, true, &d2);
    CHECK(a.v != b.v);
}

TEST_CASE("attention rejects indivisible head counts") {
    CHECK_THROWS_AS(AttentionBlock<double>("b", 10, 4, 0.0, ParamGroup::head, 1), ShapeError);
    CHECK_THROWS_AS(AttentionBlock<double>("b", 8, 4, 1.0, ParamGroup::head, 1), DomainError);
}

TEST_CASE("backward: loss = sum of parameters gives unit gradients") {
    Parameter<double> p("p", 1, 4, ParamGroup::head);
    p.value = Mat<double>::row_vector({0.3, -1.2, 2.0, 0.7});
    Tape<double> t;
    Mat<double> ones(4, 1);
    ones.fill(1.0);
    auto l = t.matmul(t.param(p), t.input(ones));
    t.backward(l);
    for (const double g : p.grad.v) CHECK(g == 1.0);
}

TEST_CASE("backward: half theta squared gives gradient theta") {
    Parameter<double> p("theta", 1, 1, ParamGroup::head);
    p.value.v[0] = 1.7;
    Tape<double> t;
    auto node = t.param(p);
    auto l = t.scale(t.matmul(node, t.transpose(node)), 0.5);
    t.backward(l);
    CHECK(p.grad.v[0] == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("backward without a recorded forward is a state error") {
    Tape<double> t;
    CHECK_THROWS_AS(t.backward(0), StateError);
}

TEST_CASE("backward root must be scalar") {
    Tape<double> t;
    auto x = t.input(Mat<double>(2, 3));
    CHECK_THROWS_AS(t.backward(x), ShapeError);
}

TEST_CASE("gradients of a tiny attention stack match finite differences") {
    TinyStack m(7);
    Rng rng(99);
    const Mat<double> x = random_mat(6, 17, rng);
    for (auto* p : m.params()) p->zero_grad();
    m.loss(x, 1, true);
    const double worst =
        oracle::fd_worst_rel_err(m.params(), [&]() { return m.loss(x, 1); });
    CHECK(worst < 1e-4);
}

TEST_CASE("dropout scales kept activations and zeroes the rest") {
    Rng rng(21);
    Tape<double> t(true, &rng);
    Mat<double> x(20, 10);
    x.fill(1.0);
    auto y = t.dropout(t.input(x), 0.25);
    int kept = 0, dropped = 0;
    for (const double v : t.value(y).v) {
        if (v == 0.0) ++dropped;
        else {
            CHECK(v == doctest::Approx(1.0 / 0.75).epsilon(1e-12));
            ++kept;
        }
    }
    CHECK(kept + dropped == 200);
    CHECK(dropped > 20);
    CHECK(dropped < 90);
}

TEST_CASE("checkpoint round trip is bit exact") {
    Rng rng(22);
    Parameter<float> a("layer.weight", 3, 4, ParamGroup::head);
    Parameter<float> b("layer.bias", 1, 4, ParamGroup::head);
    for (auto& v : a.value.v) v = static_cast<float>(rng.normal());
    for (auto& v : b.value.v) v = static_cast<float>(rng.normal());
    const std::string path = "test_ckpt.bin";
    save_checkpoint(path, std::vector<Parameter<float>*>{&a, &b});

    Parameter<float> a2("layer.weight", 3, 4, ParamGroup::head);
    Parameter<float> b2("layer.bias", 1, 4, ParamGroup::head);
    load_checkpoint(path, std::vector<Parameter<float>*>{&a2, &b2});
    CHECK(a.value.v == a2.value.v);
    CHECK(b.value.v == b2.value.v);
    std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects corruption") {
    const std::string path = "test_ckpt_bad.bin";
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOTAMAGIC";
    }
    Parameter<float> p("x", 1, 1, ParamGroup::head);
    std::vector<Parameter<float>*> params{&p};
    CHECK_THROWS_AS(load_checkpoint(path, params), FormatError);

    save_checkpoint(path, params);
    Parameter<float> wrong("x", 2, 2, ParamGroup::head);
    std::vector<Parameter<float>*> wrong_params{&wrong};
    CHECK_THROWS_AS(load_checkpoint(path, wrong_params), ShapeError);

    Parameter<float> missing("y", 1, 1, ParamGroup::head);
    std::vector<Parameter<float>*> missing_params{&missing};
    CHECK_THROWS_AS(load_checkpoint(path, missing_params), FormatError);

    // Truncate mid-payload.
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os.write("SCNN1", 6);
        const std::uint32_t len = 1;
        os.write(reinterpret_cast<const char*>(&len), 4);
        os << "x";
    }
    CHECK_THROWS_AS(load_checkpoint(path, params), FormatError);
    std::remove(path.c_str());
}

}  // TEST_SUITE
