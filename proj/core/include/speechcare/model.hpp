#pragma once

#include <optional>
#include <string>
#include <vector>

#include "speechcare/encoders.hpp"
#include "speechcare/fusion.hpp"
#include "speechcare/pipeline.hpp"

namespace speechcare::model {

struct ModelConfig {
    enc::EncoderConfig encoder;
    std::vector<enc::Modality> modalities{enc::Modality::acoustic, enc::Modality::linguistic,
                                          enc::Modality::demographic};
    fusion::FusionKind fusion = fusion::FusionKind::agf;
    int fusion_hidden = 128;
    std::uint64_t seed = 0;

    bool has(enc::Modality m) const {
        for (const auto x : modalities)
            if (x == m) return true;
        return false;
    }
};

template <class T>
inline Mat<T> to_mat(const Mat<float>& m) {
    Mat<T> out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.v.size(); ++i) out.v[i] = static_cast<T>(m.v[i]);
    return out;
}

// The full classifier: one pathway per configured modality plus the chosen
// fusion strategy. A single-modality configuration classifies through that
// pathway's own head, which is how the unimodal baselines train.
template <class T>
class Model {
public:
    explicit Model(const ModelConfig& cfg) : cfg_(cfg) {
        if (cfg.modalities.empty()) throw DataError("model needs at least one modality");
        std::vector<int> dims;
        if (cfg.has(enc::Modality::acoustic)) {
            acoustic_.emplace(cfg.encoder, cfg.seed);
            dims.push_back(acoustic_->out_dim());
        }
        if (cfg.has(enc::Modality::linguistic)) {
            text_.emplace(cfg.encoder, cfg.seed);
            dims.push_back(text_->out_dim());
        }
        if (cfg.has(enc::Modality::demographic)) {
            demo_.emplace(cfg.encoder, cfg.seed);
            dims.push_back(demo_->out_dim());
        }
        if (dims.size() < 2) return;  // single modality: no fusion head
        switch (cfg.fusion) {
            case fusion::FusionKind::agf:
                agf_.emplace(dims, cfg.fusion_hidden, cfg.encoder.classes, cfg.seed);
                break;
            case fusion::FusionKind::intermediate:
                inter_.emplace(dims, cfg.fusion_hidden, cfg.encoder.classes, cfg.seed);
                break;
            case fusion::FusionKind::scaled_late:
                late_.emplace(dims, cfg.encoder.classes, cfg.seed);
                break;
            case fusion::FusionKind::cross_modal:
                if (!acoustic_ || !text_)
                    throw DataError("cross-modal fusion needs acoustic and linguistic pathways");
                cross_.emplace(cfg.encoder.model_dim, demo_ ? cfg.encoder.demo_dim : 0,
                               cfg.fusion_hidden, cfg.encoder.classes, cfg.seed);
                break;
        }
    }

    struct Forward {
        typename nn::Tape<T>::Ix logits;  // training/eval target
        std::optional<fusion::AgfNodes<T>> agf;
    };

    Forward forward(nn::Tape<T>& t, const pipeline::RecordFeatures& f) {
        using Ix = typename nn::Tape<T>::Ix;
        std::vector<Ix> h;
        std::vector<bool> present;
        std::optional<enc::PathwayOut<T>> ao, to, dos;
        if (acoustic_) {
            const bool have = f.acoustic_kind != pipeline::RecordFeatures::AcousticKind::none;
            present.push_back(have);
            if (have) {
                const Mat<T> m = to_mat<T>(f.acoustic);
                switch (f.acoustic_kind) {
                    case pipeline::RecordFeatures::AcousticKind::raw_frames:
                        ao = acoustic_->encode(t, m, false);
                        break;
                    case pipeline::RecordFeatures::AcousticKind::projected_frames:
                        ao = acoustic_->encode(t, m, true);
                        break;
                    default:
                        ao = acoustic_->from_embedding(t, m);
                        break;
                }
                h.push_back(ao->h);
            } else {
                h.push_back(t.input(Mat<T>(1, acoustic_->out_dim())));
            }
        }
        if (text_) {
            present.push_back(f.has_text);
            if (f.has_text) {
                to = text_->encode(t, f.token_ids);
                h.push_back(to->h);
            } else {
                h.push_back(t.input(Mat<T>(1, text_->out_dim())));
            }
        }
        if (demo_) {
            present.push_back(f.has_demo);
            if (f.has_demo) {
                dos = demo_->encode(t, to_mat<T>(f.demo));
                h.push_back(dos->h);
            } else {
                h.push_back(t.input(Mat<T>(1, demo_->out_dim())));
            }
        }
        for (std::size_t i = 0; i < present.size(); ++i)
            if (!present[i] && !agf_ && h.size() > 1)
                throw DataError("record " + f.uid +
                                " is missing a modality; only adaptive gating handles that");

        if (h.size() == 1) {
            if (!present[0]) throw DataError("record " + f.uid + " is missing its only modality");
            const Ix logits = ao ? ao->logits : (to ? to->logits : dos->logits);
            return {logits, std::nullopt};
        }
        if (agf_) {
            auto nodes = agf_->forward_masked(t, h, present);
            return {nodes.fused, nodes};
        }
        if (inter_) return {inter_->forward(t, h), std::nullopt};
        if (late_) return {late_->forward(t, h).fused, std::nullopt};
        return {cross_->forward(t, ao->seq, to->seq,
                                dos ? std::optional<Ix>(dos->h) : std::nullopt),
                std::nullopt};
    }

    // Class probabilities for one record (inference mode).
    std::vector<double> predict(const pipeline::RecordFeatures& f) {
        nn::Tape<T> t;
        const Forward fw = forward(t, f);
        Mat<double> logits(1, t.value(fw.logits).cols);
        for (int j = 0; j < logits.cols; ++j)
            logits.v[j] = static_cast<double>(t.value(fw.logits).v[j]);
        return nn::softmax(logits).v;
    }

    std::vector<nn::Parameter<T>*> parameters() {
        std::vector<nn::Parameter<T>*> out;
        if (acoustic_) acoustic_->collect(out);
        if (text_) text_->collect(out);
        if (demo_) demo_->collect(out);
        if (agf_) agf_->collect(out);
        if (inter_) inter_->collect(out);
        if (late_) late_->collect(out);
        if (cross_) cross_->collect(out);
        return out;
    }

    const ModelConfig& config() const { return cfg_; }
    fusion::AgfHead<T>* agf_head() { return agf_ ? &*agf_ : nullptr; }

private:
    ModelConfig cfg_;
    std::optional<enc::AcousticPathway<T>> acoustic_;
    std::optional<enc::TextPathway<T>> text_;
    std::optional<enc::DemographicPathway<T>> demo_;
    std::optional<fusion::AgfHead<T>> agf_;
    std::optional<fusion::IntermediateFusion<T>> inter_;
    std::optional<fusion::ScaledLateFusion<T>> late_;
    std::optional<fusion::CrossModalFusion<T>> cross_;
};

}  // namespace speechcare::model
