#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "speechcare/rng.hpp"
#include "speechcare/tape.hpp"

namespace speechcare::nn {

enum class Activation { none, tanh };

// Glorot-uniform weights in ±sqrt(6/(fan_in+fan_out)); the rng stream is
// derived from (seed, parameter name) so initialization is independent of
// construction order.
template <class T>
inline void init_glorot(Parameter<T>& p, std::uint64_t seed, int fan_in, int fan_out) {
    Rng rng = Rng::stream(seed, p.name);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (T& x : p.value.v) x = static_cast<T>(rng.uniform(-bound, bound));
}

// Unit-norm-ish rows for embedding tables and CLS vectors: ±sqrt(3/d) keeps
// the expected squared row norm at 1.
template <class T>
inline void init_embedding(Parameter<T>& p, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, p.name);
    const double bound = std::sqrt(3.0 / p.value.cols);
    for (T& x : p.value.v) x = static_cast<T>(rng.uniform(-bound, bound));
}

// Fully connected layer, y = x·W^T + b. Weight is out×in, matching the
// checkpoint layout.
template <class T>
struct DenseLayer {
    Parameter<T> weight;
    Parameter<T> bias;
    Activation act = Activation::none;

    DenseLayer() = default;
    DenseLayer(const std::string& prefix, int in, int out, Activation a,
               ParamGroup group, std::uint64_t seed)
        : weight(prefix + ".weight", out, in, group),
          bias(prefix + ".bias", 1, out, group),
          act(a) {
        init_glorot(weight, seed, in, out);
    }

    int in_dim() const { return weight.value.cols; }
    int out_dim() const { return weight.value.rows; }

    typename Tape<T>::Ix forward(Tape<T>& t, typename Tape<T>::Ix x) {
        if (t.cols(x) != in_dim())
            throw ShapeError("dense input width " + std::to_string(t.cols(x)) +
                             " != " + std::to_string(in_dim()));
        auto wt = t.transpose(t.param(weight));
        auto y = t.add_row(t.matmul(x, wt), t.param(bias));
        return act == Activation::tanh ? t.tanh_of(y) : y;
    }

    // Tape-free forward for inference-style evaluation.
    Mat<T> apply(const Mat<T>& x) const {
        if (x.cols != in_dim())
            throw ShapeError("dense input width " + std::to_string(x.cols) +
                             " != " + std::to_string(in_dim()));
        Mat<T> wt = transposed(weight.value);
        Mat<T> y(x.rows, out_dim());
        matmul_acc(x, wt, y);
        for (int i = 0; i < y.rows; ++i) {
            T* row = y.row(i);
            for (int j = 0; j < y.cols; ++j) {
                row[j] += bias.value.v[j];
                if (act == Activation::tanh) row[j] = std::tanh(row[j]);
            }
        }
        return y;
    }

    void collect(std::vector<Parameter<T>*>& out) {
        out.push_back(&weight);
        out.push_back(&bias);
    }
};

template <class T>
inline Mat<T> dense_forward(const DenseLayer<T>& layer, const Mat<T>& input) {
    return layer.apply(input);
}

// Softmax of a 1×n vector with max-subtraction stabilization.
template <class T>
inline Mat<T> softmax(const Mat<T>& logits) {
    if (logits.size() == 0) throw DomainError("softmax of empty vector");
    for (const T x : logits.v)
        if (!std::isfinite(static_cast<double>(x))) throw DomainError("softmax of non-finite logits");
    Mat<T> out(logits.rows, logits.cols);
    T mx = logits.v[0];
    for (const T x : logits.v) mx = std::max(mx, x);
    T sum = T(0);
    for (std::size_t i = 0; i < logits.v.size(); ++i) {
        out.v[i] = std::exp(logits.v[i] - mx);
        sum += out.v[i];
    }
    for (T& x : out.v) x /= sum;
    return out;
}

// Zero-mean unit-variance normalization of a vector followed by an affine
// transform; epsilon floors the variance.
template <class T>
inline std::vector<T> layer_norm(const std::vector<T>& x, const std::vector<T>& scale,
                                 const std::vector<T>& shift, T eps = T(1e-5)) {
    const std::size_t d = x.size();
    if (d < 2) throw DomainError("layer norm needs length >= 2");
    if (scale.size() != d || shift.size() != d) throw ShapeError("layer norm affine shape");
    T mean = T(0);
    for (const T v : x) mean += v;
    mean /= T(d);
    T var = T(0);
    for (const T v : x) var += (v - mean) * (v - mean);
    var /= T(d);
    const T inv = T(1) / std::sqrt(var + eps);
    std::vector<T> out(d);
    for (std::size_t j = 0; j < d; ++j) out[j] = scale[j] * ((x[j] - mean) * inv) + shift[j];
    return out;
}

// Self-attention block: multi-head scaled dot-product attention, output
// projection, dropout, residual, layer norm. No feed-forward sublayer.
template <class T>
struct AttentionBlock {
    int heads = 4;
    int model_dim = 32;
    T dropout_rate = T(0.1);
    T norm_eps = T(1e-5);
    DenseLayer<T> wq, wk, wv, wo;
    Parameter<T> norm_scale, norm_shift;

    AttentionBlock() = default;
    AttentionBlock(const std::string& prefix, int dim, int n_heads, T dropout,
                   ParamGroup group, std::uint64_t seed)
        : heads(n_heads),
          model_dim(dim),
          dropout_rate(dropout),
          wq(prefix + ".wq", dim, dim, Activation::none, group, seed),
          wk(prefix + ".wk", dim, dim, Activation::none, group, seed),
          wv(prefix + ".wv", dim, dim, Activation::none, group, seed),
          wo(prefix + ".wo", dim, dim, Activation::none, group, seed),
          norm_scale(prefix + ".norm_scale", 1, dim, group),
          norm_shift(prefix + ".norm_shift", 1, dim, group) {
        if (n_heads <= 0 || dim % n_heads != 0)
            throw ShapeError("model_dim must be divisible by heads");
        if (dropout < T(0) || dropout >= T(1))
            throw DomainError("dropout rate must be in [0,1)");
        norm_scale.value.fill(T(1));
    }

    typename Tape<T>::Ix forward(Tape<T>& t, typename Tape<T>::Ix x) {
        using Ix = typename Tape<T>::Ix;
        if (t.cols(x) != model_dim)
            throw ShapeError("attention input width " + std::to_string(t.cols(x)) +
                             " != model_dim " + std::to_string(model_dim));
        Ix q = wq.forward(t, x);
        Ix k = wk.forward(t, x);
        Ix v = wv.forward(t, x);
        Ix merged = t.mha(q, k, v, heads);
        Ix proj = t.dropout(wo.forward(t, merged), dropout_rate);
        return t.layer_norm_rows(t.add(x, proj), t.param(norm_scale),
                                 t.param(norm_shift), norm_eps);
    }

    void collect(std::vector<Parameter<T>*>& out) {
        wq.collect(out);
        wk.collect(out);
        wv.collect(out);
        wo.collect(out);
        out.push_back(&norm_scale);
        out.push_back(&norm_shift);
    }
};

// Whole-block forward on a standalone sequence. Dropout draws from rng when
// training; inference is deterministic.
template <class T>
inline Mat<T> multi_head_attention(AttentionBlock<T>& block, const Mat<T>& sequence,
                                   bool training = false, Rng* rng = nullptr) {
    Tape<T> t(training, rng);
    auto x = t.input(sequence);
    auto y = block.forward(t, x);
    return t.value(y);
}

}  // namespace speechcare::nn
