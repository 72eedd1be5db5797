#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "speechcare/layers.hpp"
#include "speechcare/tape.hpp"

namespace speechcare::fusion {

enum class FusionKind { agf, intermediate, scaled_late, cross_modal };

inline std::string to_string(FusionKind k) {
    switch (k) {
        case FusionKind::agf: return "agf";
        case FusionKind::intermediate: return "intermediate";
        case FusionKind::scaled_late: return "scaled_late";
        case FusionKind::cross_modal: return "cross_modal";
    }
    return "";
}

inline FusionKind fusion_from_string(const std::string& s) {
    if (s == "agf") return FusionKind::agf;
    if (s == "intermediate") return FusionKind::intermediate;
    if (s == "scaled_late") return FusionKind::scaled_late;
    if (s == "cross_modal") return FusionKind::cross_modal;
    throw DataError("unknown fusion strategy: " + s);
}

// Additive gate mask for absent modalities. Finite so the float exp path
// stays in-domain; exp(-1e5) underflows to zero weight either way.
inline constexpr double kAbsentLogit = -1e5;

// Per-record fusion trace for interpretability dumps.
struct FusionOutput {
    std::vector<double> gate_weights;
    Mat<double> modality_scores;  // M×classes
    std::vector<double> fused_logits;
    std::vector<double> probabilities;
};

template <class T>
struct AgfNodes {
    typename nn::Tape<T>::Ix weights;  // 1×M
    typename nn::Tape<T>::Ix scores;   // M×classes
    typename nn::Tape<T>::Ix fused;    // 1×classes
};

// Adaptive gating fusion: tanh modality encoders, a single-layer gating
// network over the concatenated encodings, and a softmax-weighted sum of
// per-modality classifier scores. The gate layer starts at zero so initial
// weights are uniform.
template <class T>
class AgfHead {
public:
    AgfHead(const std::vector<int>& input_dims, int hidden, int classes, std::uint64_t seed)
        : hidden_(hidden) {
        const int m = static_cast<int>(input_dims.size());
        if (m < 2 || m > 3) throw ShapeError("adaptive gating fusion expects 2 or 3 modalities");
        for (int i = 0; i < m; ++i) {
            encoders_.emplace_back("agf.enc." + std::to_string(i), input_dims[i], hidden,
                                   nn::Activation::tanh, nn::ParamGroup::head, seed);
            classifiers_.emplace_back("agf.cls." + std::to_string(i), hidden, classes,
                                      nn::Activation::none, nn::ParamGroup::head, seed);
        }
        gate_ = nn::DenseLayer<T>("agf.gate", m * hidden, m, nn::Activation::none,
                                  nn::ParamGroup::head, seed);
        gate_.weight.value.fill(T(0));
        gate_.bias.value.fill(T(0));
    }

    int modalities() const { return static_cast<int>(encoders_.size()); }

    AgfNodes<T> forward(nn::Tape<T>& t, const std::vector<typename nn::Tape<T>::Ix>& h) {
        return forward_masked(t, h, std::vector<bool>(encoders_.size(), true));
    }

    // Absent modalities contribute zero encodings to the gate input and get
    // their gate logits pushed to the floor, so weights renormalize over the
    // present ones. With everything present the graph is identical to the
    // unmasked forward.
    AgfNodes<T> forward_masked(nn::Tape<T>& t, const std::vector<typename nn::Tape<T>::Ix>& h,
                               const std::vector<bool>& present) {
        using Ix = typename nn::Tape<T>::Ix;
        const int m = modalities();
        if (static_cast<int>(h.size()) != m || static_cast<int>(present.size()) != m)
            throw ShapeError("fusion expects one embedding per configured modality");
        int n_present = 0;
        for (const bool p : present) n_present += p ? 1 : 0;
        if (n_present == 0) throw DomainError("fusion needs at least one present modality");

        std::vector<Ix> z(m);
        for (int i = 0; i < m; ++i) {
            if (present[i]) {
                if (t.cols(h[i]) != encoders_[i].in_dim())
                    throw ShapeError("modality " + std::to_string(i) + " embedding width " +
                                     std::to_string(t.cols(h[i])));
                z[i] = encoders_[i].forward(t, h[i]);
            } else {
                z[i] = t.input(Mat<T>(1, hidden_));
            }
        }
        Ix gate_logits = gate_.forward(t, t.concat_cols(z));
        if (n_present < m) {
            Mat<T> mask(1, m);
            for (int i = 0; i < m; ++i) mask.v[i] = present[i] ? T(0) : static_cast<T>(kAbsentLogit);
            gate_logits = t.add(gate_logits, t.input(std::move(mask)));
        }
        Ix weights = t.softmax_rows(gate_logits);
        std::vector<Ix> scores(m);
        for (int i = 0; i < m; ++i) scores[i] = classifiers_[i].forward(t, z[i]);
        Ix stacked = t.concat_rows(scores);
        Ix fused = t.matmul(weights, stacked);
        return {weights, stacked, fused};
    }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        for (auto& e : encoders_) e.collect(out);
        gate_.collect(out);
        for (auto& c : classifiers_) c.collect(out);
    }

private:
    int hidden_;
    std::vector<nn::DenseLayer<T>> encoders_;
    nn::DenseLayer<T> gate_;
    std::vector<nn::DenseLayer<T>> classifiers_;
};

template <class T>
inline FusionOutput extract_fusion_output(const nn::Tape<T>& t, const AgfNodes<T>& nodes) {
    FusionOutput out;
    const Mat<T>& w = t.value(nodes.weights);
    for (const T x : w.v) out.gate_weights.push_back(static_cast<double>(x));
    const Mat<T>& s = t.value(nodes.scores);
    out.modality_scores = Mat<double>(s.rows, s.cols);
    for (std::size_t i = 0; i < s.v.size(); ++i)
        out.modality_scores.v[i] = static_cast<double>(s.v[i]);
    Mat<double> logits(1, t.value(nodes.fused).cols);
    for (int j = 0; j < logits.cols; ++j)
        logits.v[j] = static_cast<double>(t.value(nodes.fused).v[j]);
    out.fused_logits = logits.v;
    out.probabilities = nn::softmax(logits).v;
    return out;
}

// Baseline: concatenate the modality embeddings and classify through one
// hidden tanh layer. Reconstruction; named strategy only.
template <class T>
class IntermediateFusion {
public:
    IntermediateFusion(const std::vector<int>& input_dims, int hidden, int classes,
                       std::uint64_t seed, const std::string& prefix = "inter")
        : expected_(input_dims) {
        int total = 0;
        for (const int d : input_dims) total += d;
        hidden_ = nn::DenseLayer<T>(prefix + ".hidden", total, hidden, nn::Activation::tanh,
                                    nn::ParamGroup::head, seed);
        out_ = nn::DenseLayer<T>(prefix + ".out", hidden, classes, nn::Activation::none,
                                 nn::ParamGroup::head, seed);
    }

    typename nn::Tape<T>::Ix forward(nn::Tape<T>& t,
                                     const std::vector<typename nn::Tape<T>::Ix>& h) {
        if (h.size() != expected_.size())
            throw ShapeError("fusion expects one embedding per configured modality");
        return out_.forward(t, hidden_.forward(t, t.concat_cols(h)));
    }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        hidden_.collect(out);
        out_.collect(out);
    }

private:
    std::vector<int> expected_;
    nn::DenseLayer<T> hidden_;
    nn::DenseLayer<T> out_;
};

// Baseline: per-modality classifiers on the raw embeddings combined with
// input-independent softmax(learned scalars) weights — the contrast to AGF's
// input-dependent gates.
template <class T>
class ScaledLateFusion {
public:
    ScaledLateFusion(const std::vector<int>& input_dims, int classes, std::uint64_t seed)
        : alpha_("late.alpha", 1, static_cast<int>(input_dims.size()), nn::ParamGroup::head) {
        for (std::size_t i = 0; i < input_dims.size(); ++i)
            classifiers_.emplace_back("late.cls." + std::to_string(i), input_dims[i], classes,
                                      nn::Activation::none, nn::ParamGroup::head, seed);
    }

    struct Out {
        typename nn::Tape<T>::Ix alpha;  // 1×M
        typename nn::Tape<T>::Ix fused;  // 1×classes
    };

    Out forward(nn::Tape<T>& t, const std::vector<typename nn::Tape<T>::Ix>& h) {
        using Ix = typename nn::Tape<T>::Ix;
        if (h.size() != classifiers_.size())
            throw ShapeError("fusion expects one embedding per configured modality");
        std::vector<Ix> scores(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) scores[i] = classifiers_[i].forward(t, h[i]);
        Ix alpha = t.softmax_rows(t.param(alpha_));
        Ix fused = t.matmul(alpha, t.concat_rows(scores));
        return {alpha, fused};
    }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        for (auto& c : classifiers_) c.collect(out);
        out.push_back(&alpha_);
    }

private:
    std::vector<nn::DenseLayer<T>> classifiers_;
    nn::Parameter<T> alpha_;  // zero start: uniform scalars
};

// Baseline: one single-head cross-attention block applied in both directions
// (acoustic CLS over text states, text CLS over acoustic states), then
// intermediate fusion of the two attended vectors plus the demographic
// latent. Reconstruction; the strategy is named without a formula.
template <class T>
class CrossModalFusion {
public:
    CrossModalFusion(int model_dim, int demo_dim, int hidden, int classes, std::uint64_t seed)
        : model_dim_(model_dim),
          has_demo_(demo_dim > 0),
          wq_("cross.wq", model_dim, model_dim, nn::Activation::none, nn::ParamGroup::head, seed),
          wk_("cross.wk", model_dim, model_dim, nn::Activation::none, nn::ParamGroup::head, seed),
          wv_("cross.wv", model_dim, model_dim, nn::Activation::none, nn::ParamGroup::head, seed),
          wo_("cross.wo", model_dim, model_dim, nn::Activation::none, nn::ParamGroup::head, seed),
          norm_scale_("cross.norm_scale", 1, model_dim, nn::ParamGroup::head),
          norm_shift_("cross.norm_shift", 1, model_dim, nn::ParamGroup::head),
          inter_(demo_dim > 0 ? std::vector<int>{model_dim, model_dim, demo_dim}
                              : std::vector<int>{model_dim, model_dim},
                 hidden, classes, seed, "cross.inter") {
        norm_scale_.value.fill(T(1));
    }

    // One attended vector: `query` (1×d) attends over `kv` (n×d).
    typename nn::Tape<T>::Ix attend(nn::Tape<T>& t, typename nn::Tape<T>::Ix query,
                                    typename nn::Tape<T>::Ix kv) {
        using Ix = typename nn::Tape<T>::Ix;
        Ix q = wq_.forward(t, query);
        Ix k = wk_.forward(t, kv);
        Ix v = wv_.forward(t, kv);
        const T scale = T(1) / std::sqrt(static_cast<T>(model_dim_));
        Ix scores = t.scale(t.matmul(q, t.transpose(k)), scale);
        Ix attn = t.softmax_rows(scores);
        Ix ctx = wo_.forward(t, t.matmul(attn, v));
        return t.layer_norm_rows(t.add(query, ctx), t.param(norm_scale_), t.param(norm_shift_),
                                 T(1e-5));
    }

    typename nn::Tape<T>::Ix forward(nn::Tape<T>& t, typename nn::Tape<T>::Ix acoustic_seq,
                                     typename nn::Tape<T>::Ix text_seq,
                                     std::optional<typename nn::Tape<T>::Ix> h_demo) {
        using Ix = typename nn::Tape<T>::Ix;
        Ix a_cls = t.slice_rows(acoustic_seq, 0, 1);
        Ix t_cls = t.slice_rows(text_seq, 0, 1);
        Ix a_att = attend(t, a_cls, text_seq);
        Ix t_att = attend(t, t_cls, acoustic_seq);
        std::vector<Ix> parts{a_att, t_att};
        if (has_demo_) {
            if (!h_demo) throw ShapeError("cross-modal head was built with a demographic input");
            parts.push_back(*h_demo);
        }
        return inter_.forward(t, parts);
    }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        wq_.collect(out);
        wk_.collect(out);
        wv_.collect(out);
        wo_.collect(out);
        out.push_back(&norm_scale_);
        out.push_back(&norm_shift_);
        inter_.collect(out);
    }

private:
    int model_dim_;
    bool has_demo_;
    nn::DenseLayer<T> wq_, wk_, wv_, wo_;
    nn::Parameter<T> norm_scale_, norm_shift_;
    IntermediateFusion<T> inter_;
};

}  // namespace speechcare::fusion
