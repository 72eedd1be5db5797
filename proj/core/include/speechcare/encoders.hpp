#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "speechcare/layers.hpp"
#include "speechcare/segment.hpp"
#include "speechcare/tape.hpp"

namespace speechcare::enc {

enum class Modality { acoustic, linguistic, demographic };

inline std::string to_string(Modality m) {
    switch (m) {
        case Modality::acoustic: return "acoustic";
        case Modality::linguistic: return "linguistic";
        case Modality::demographic: return "demographic";
    }
    return "";
}

struct EncoderConfig {
    int model_dim = 32;
    int heads = 4;
    int blocks = 2;
    float dropout = 0.1f;
    int vocab_buckets = 4096;
    int context_cap = 512;
    int demo_dim = 128;
    int classes = 3;
};

inline constexpr int kMaxAcousticFrames = audio::kMaxWindows * audio::kFramesPerSegment;  // 1750

// Lowercases ASCII and splits on anything that is not alphanumeric; bytes
// above 0x7f (UTF-8 continuation) stay inside tokens so multilingual text
// survives hashing.
std::vector<std::string> tokenize(const std::string& text);

std::vector<int> hash_tokens(const std::vector<std::string>& tokens, int vocab_buckets);

// Per-record mean/variance normalization of each feature column; keeps the
// frame featurizer's raw scale out of the tanh projection.
template <class T>
inline Mat<T> normalize_frames(const Mat<double>& frames) {
    Mat<T> out(frames.rows, frames.cols);
    for (int j = 0; j < frames.cols; ++j) {
        double mean = 0.0;
        for (int i = 0; i < frames.rows; ++i) mean += frames.at(i, j);
        mean /= std::max(1, frames.rows);
        double var = 0.0;
        for (int i = 0; i < frames.rows; ++i) {
            const double d = frames.at(i, j) - mean;
            var += d * d;
        }
        var /= std::max(1, frames.rows);
        const double inv = 1.0 / std::max(std::sqrt(var), 1e-6);
        for (int i = 0; i < frames.rows; ++i)
            out.at(i, j) = static_cast<T>((frames.at(i, j) - mean) * inv);
    }
    return out;
}

template <class T>
inline Mat<T> sinusoidal_positions(int n, int dim) {
    Mat<T> out(n, dim);
    for (int pos = 0; pos < n; ++pos) {
        for (int i = 0; i < dim; ++i) {
            const double angle =
                pos / std::pow(10000.0, 2.0 * (i / 2) / static_cast<double>(dim));
            out.at(pos, i) = static_cast<T>((i % 2 == 0) ? std::sin(angle) : std::cos(angle));
        }
    }
    return out;
}

template <class T>
struct PathwayOut {
    typename nn::Tape<T>::Ix seq;     // post-encoder sequence states (CLS first)
    typename nn::Tape<T>::Ix h;       // 1×dim modality embedding node
    typename nn::Tape<T>::Ix logits;  // 1×classes auxiliary classifier node
};

// Acoustic pathway: frame features → dense projection → learnable CLS →
// stacked self-attention blocks → CLS state. The auxiliary head doubles as
// the voice-only baseline classifier.
template <class T>
class AcousticPathway {
public:
    AcousticPathway(const EncoderConfig& cfg, std::uint64_t seed)
        : cfg_(cfg),
          frame_proj_("acoustic.frame_proj", audio::kFrameFeatures, cfg.model_dim,
                      nn::Activation::tanh, nn::ParamGroup::acoustic, seed),
          cls_("acoustic.cls", 1, cfg.model_dim, nn::ParamGroup::acoustic),
          head_("acoustic.head", cfg.model_dim, cfg.classes, nn::Activation::none,
                nn::ParamGroup::head, seed) {
        nn::init_embedding(cls_, seed);
        for (int b = 0; b < cfg.blocks; ++b)
            cse_.emplace_back("acoustic.cse." + std::to_string(b), cfg.model_dim, cfg.heads,
                              static_cast<T>(cfg.dropout), nn::ParamGroup::acoustic, seed);
    }

    // frames: n×17 raw features, or n×model_dim when already projected
    // (precomputed upstream embeddings).
    PathwayOut<T> encode(nn::Tape<T>& t, const Mat<T>& frames, bool projected = false) {
        if (frames.rows > kMaxAcousticFrames)
            throw ShapeError("acoustic sequence of " + std::to_string(frames.rows) +
                             " frames exceeds " + std::to_string(kMaxAcousticFrames));
        auto x = t.input(frames);
        auto h = projected ? x : frame_proj_.forward(t, x);
        auto seq = t.concat_rows({t.param(cls_), h});
        for (auto& block : cse_) seq = block.forward(t, seq);
        auto pooled = t.slice_rows(seq, 0, 1);
        return {seq, pooled, head_.forward(t, pooled)};
    }

    // Precomputed 1×model_dim embedding standing in for the whole encoder.
    PathwayOut<T> from_embedding(nn::Tape<T>& t, const Mat<T>& h) {
        if (h.rows != 1 || h.cols != cfg_.model_dim)
            throw ShapeError("acoustic embedding must be 1×" + std::to_string(cfg_.model_dim));
        auto node = t.input(h);
        return {node, node, head_.forward(t, node)};
    }

    int out_dim() const { return cfg_.model_dim; }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        frame_proj_.collect(out);
        out.push_back(&cls_);
        for (auto& b : cse_) b.collect(out);
        head_.collect(out);
    }

private:
    EncoderConfig cfg_;
    nn::DenseLayer<T> frame_proj_;
    nn::Parameter<T> cls_;
    std::vector<nn::AttentionBlock<T>> cse_;
    nn::DenseLayer<T> head_;
};

// Linguistic pathway: hashed token embeddings + sinusoidal positions →
// attention blocks → tanh summary projection of the CLS state.
template <class T>
class TextPathway {
public:
    TextPathway(const EncoderConfig& cfg, std::uint64_t seed)
        : cfg_(cfg),
          embed_("text.embed", cfg.vocab_buckets, cfg.model_dim, nn::ParamGroup::text),
          cls_("text.cls", 1, cfg.model_dim, nn::ParamGroup::text),
          summary_("text.summary", cfg.model_dim, cfg.model_dim, nn::Activation::tanh,
                   nn::ParamGroup::head, seed),
          head_("text.head", cfg.model_dim, cfg.classes, nn::Activation::none,
                nn::ParamGroup::head, seed),
          positions_(sinusoidal_positions<T>(cfg.context_cap, cfg.model_dim)) {
        nn::init_embedding(embed_, seed);
        nn::init_embedding(cls_, seed);
        for (int b = 0; b < cfg.blocks; ++b)
            blocks_.emplace_back("text.block." + std::to_string(b), cfg.model_dim, cfg.heads,
                                 static_cast<T>(cfg.dropout), nn::ParamGroup::text, seed);
    }

    PathwayOut<T> encode(nn::Tape<T>& t, const std::vector<int>& token_ids) {
        std::vector<int> ids = token_ids;
        if (static_cast<int>(ids.size()) > cfg_.context_cap)
            ids.resize(cfg_.context_cap);
        typename nn::Tape<T>::Ix seq;
        if (ids.empty()) {
            seq = t.param(cls_);
        } else {
            auto tok = t.rows_lookup(embed_, ids);
            Mat<T> pos(static_cast<int>(ids.size()), cfg_.model_dim);
            for (int i = 0; i < pos.rows; ++i)
                for (int j = 0; j < pos.cols; ++j) pos.at(i, j) = positions_.at(i, j);
            tok = t.add(tok, t.input(std::move(pos)));
            seq = t.concat_rows({t.param(cls_), tok});
        }
        for (auto& block : blocks_) seq = block.forward(t, seq);
        auto pooled = t.slice_rows(seq, 0, 1);
        auto h = summary_.forward(t, pooled);
        return {seq, h, head_.forward(t, h)};
    }

    PathwayOut<T> encode_text(nn::Tape<T>& t, const std::string& transcript) {
        return encode(t, hash_tokens(tokenize(transcript), cfg_.vocab_buckets));
    }

    PathwayOut<T> from_embedding(nn::Tape<T>& t, const Mat<T>& h) {
        if (h.rows != 1 || h.cols != cfg_.model_dim)
            throw ShapeError("text embedding must be 1×" + std::to_string(cfg_.model_dim));
        auto node = t.input(h);
        return {node, node, head_.forward(t, node)};
    }

    int out_dim() const { return cfg_.model_dim; }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        out.push_back(&embed_);
        out.push_back(&cls_);
        for (auto& b : blocks_) b.collect(out);
        summary_.collect(out);
        head_.collect(out);
    }

private:
    EncoderConfig cfg_;
    nn::Parameter<T> embed_;
    nn::Parameter<T> cls_;
    std::vector<nn::AttentionBlock<T>> blocks_;
    nn::DenseLayer<T> summary_;
    nn::DenseLayer<T> head_;
    Mat<T> positions_;
};

// Demographic pathway: one-hot triple → tanh dense → compact latent vector.
template <class T>
class DemographicPathway {
public:
    DemographicPathway(const EncoderConfig& cfg, std::uint64_t seed)
        : cfg_(cfg),
          proj_("demo.proj", 9, cfg.demo_dim, nn::Activation::tanh, nn::ParamGroup::head, seed),
          head_("demo.head", cfg.demo_dim, cfg.classes, nn::Activation::none,
                nn::ParamGroup::head, seed) {}

    PathwayOut<T> encode(nn::Tape<T>& t, const Mat<T>& onehot) {
        if (onehot.rows != 1 || onehot.cols != 9)
            throw ShapeError("demographic input must be 1×9");
        auto h = proj_.forward(t, t.input(onehot));
        return {h, h, head_.forward(t, h)};
    }

    int out_dim() const { return cfg_.demo_dim; }

    void collect(std::vector<nn::Parameter<T>*>& out) {
        proj_.collect(out);
        head_.collect(out);
    }

private:
    EncoderConfig cfg_;
    nn::DenseLayer<T> proj_;
    nn::DenseLayer<T> head_;
};

}  // namespace speechcare::enc
