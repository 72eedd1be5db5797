#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "speechcare/checkpoint.hpp"
#include "speechcare/loss.hpp"
#include "speechcare/metrics.hpp"
#include "speechcare/model.hpp"

namespace speechcare::train {

struct TrainConfig {
    double lr_acoustic = 1e-5;  // acoustic encoder parameters
    double lr_text = 1e-6;      // text encoder parameters
    double lr_other = 1e-4;     // fusion, demographic, and classifier heads
    double weight_decay = 1e-3;
    int batch_size = 4;
    int epochs = 20;
    int early_stop_patience = 5;
    LossKind loss = LossKind::cross_entropy;
    double focal_gamma = 2.0;
    std::vector<double> focal_alpha{1.0, 1.0, 1.0};
    std::vector<double> class_weights{1.0, 1.0, 1.0};
    std::uint64_t seed = 0;

    void validate() const {
        if (lr_acoustic < 0 || lr_text < 0 || lr_other < 0 || weight_decay < 0)
            throw DomainError("learning rates and weight decay must be non-negative");
        if (batch_size <= 0) throw DomainError("batch size must be positive");
        if (epochs <= 0) throw DomainError("epoch count must be positive");
        if (focal_gamma < 0) throw DomainError("focal gamma must be >= 0");
    }
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = std::numeric_limits<double>::quiet_NaN();
    double val_auc_micro = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
    std::vector<EpochStats> epochs;
    int epochs_run = 0;
    int best_epoch = -1;
    double val_auc_micro = std::numeric_limits<double>::quiet_NaN();
    double val_auc_weighted = std::numeric_limits<double>::quiet_NaN();
    double val_micro_f1 = std::numeric_limits<double>::quiet_NaN();
    double val_log_loss = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::string checkpoint_path;
};

namespace detail {

template <class T>
typename nn::Tape<T>::Ix loss_node(nn::Tape<T>& t, typename nn::Tape<T>::Ix logits, int label,
                                   const TrainConfig& cfg) {
    switch (cfg.loss) {
        case LossKind::cross_entropy:
            return t.cross_entropy_with_logits(logits, label);
        case LossKind::focal:
            if (label < 0 || label >= static_cast<int>(cfg.focal_alpha.size()))
                throw DomainError("label outside the focal alpha table");
            return t.focal_with_logits(logits, label, static_cast<T>(cfg.focal_gamma),
                                       static_cast<T>(cfg.focal_alpha[label]));
        case LossKind::reweighted:
            if (label < 0 || label >= static_cast<int>(cfg.class_weights.size()))
                throw DomainError("label outside the class weight table");
            return t.scale(t.cross_entropy_with_logits(logits, label),
                           static_cast<T>(cfg.class_weights[label]));
    }
    throw StateError("unreachable loss kind");
}

inline double lr_for(nn::ParamGroup g, const TrainConfig& cfg) {
    switch (g) {
        case nn::ParamGroup::acoustic: return cfg.lr_acoustic;
        case nn::ParamGroup::text: return cfg.lr_text;
        case nn::ParamGroup::head: return cfg.lr_other;
    }
    return cfg.lr_other;
}

}  // namespace detail

template <class T>
eval::PredictionRecord predict_record(model::Model<T>& m, const pipeline::RecordFeatures& f) {
    eval::PredictionRecord pr;
    pr.uid = f.uid;
    const std::vector<double> probs = m.predict(f);
    for (int c = 0; c < 3; ++c) pr.probs[c] = probs[c];
    pr.label = f.label;
    pr.age_bucket = f.age_bucket;
    pr.gender = f.gender;
    pr.education = f.education;
    pr.language = f.language;
    return pr;
}

template <class T>
eval::PredictionSet predict_set(model::Model<T>& m,
                                const std::vector<pipeline::RecordFeatures>& records) {
    eval::PredictionSet out;
    out.reserve(records.size());
    for (const auto& f : records) out.push_back(predict_record(m, f));
    return out;
}

// Mini-batch gradient descent with decoupled weight decay and per-group
// learning rates. Keeps the best-validation-loss parameters and stops early
// after `early_stop_patience` epochs without improvement. Deterministic for a
// fixed seed and config.
template <class T>
RunResult train_model(model::Model<T>& m, const std::vector<pipeline::RecordFeatures>& train_set,
                      const std::vector<pipeline::RecordFeatures>& val_set,
                      const TrainConfig& cfg, const std::string& checkpoint_path = "") {
    cfg.validate();
    if (train_set.empty()) throw DataError("training split is empty");
    for (const auto& f : train_set)
        if (f.label < 0) throw DataError("training record " + f.uid + " has no label");

    auto params = m.parameters();
    auto snapshot = [&params]() {
        std::vector<Mat<T>> vals;
        vals.reserve(params.size());
        for (const auto* p : params) vals.push_back(p->value);
        return vals;
    };
    auto restore = [&params](const std::vector<Mat<T>>& vals) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = vals[i];
    };

    auto val_loss_of = [&]() {
        double total = 0.0;
        for (const auto& f : val_set) {
            nn::Tape<T> t;  // inference: dropout off
            const auto fw = m.forward(t, f);
            total += static_cast<double>(
                t.value(detail::loss_node(t, fw.logits, f.label, cfg)).v[0]);
        }
        return total / static_cast<double>(val_set.size());
    };
    auto val_auc_of = [&]() {
        try {
            return eval::auc_ovr(predict_set(m, val_set), eval::Averaging::micro);
        } catch (const MetricError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    RunResult result;
    result.seed = cfg.seed;
    std::vector<Mat<T>> best = snapshot();
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng = Rng::stream(cfg.seed, "shuffle/" + std::to_string(epoch));
        shuffle_rng.shuffle(order.begin(), order.end());

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const auto batch_n = static_cast<T>(stop - start);
            for (auto* p : params) p->zero_grad();
            for (std::size_t k = start; k < stop; ++k) {
                const auto& f = train_set[order[k]];
                Rng drop_rng = Rng::stream(
                    cfg.seed, "dropout/" + std::to_string(epoch) + "/" + f.uid);
                nn::Tape<T> t(true, &drop_rng);
                const auto fw = m.forward(t, f);
                const auto loss = detail::loss_node(t, fw.logits, f.label, cfg);
                const double value = static_cast<double>(t.value(loss).v[0]);
                if (!std::isfinite(value))
                    throw NumericError("training diverged (non-finite loss) at epoch " +
                                       std::to_string(epoch) + ", record " + f.uid);
                epoch_loss += value;
                t.backward(t.scale(loss, T(1) / batch_n));
            }
            for (auto* p : params) {
                const auto lr = static_cast<T>(detail::lr_for(p->group, cfg));
                const auto wd = static_cast<T>(cfg.weight_decay);
                for (std::size_t i = 0; i < p->value.v.size(); ++i)
                    p->value.v[i] -= lr * (p->grad.v[i] + wd * p->value.v[i]);
            }
        }

        EpochStats stats;
        stats.train_loss = epoch_loss / static_cast<double>(train_set.size());
        if (!val_set.empty()) {
            stats.val_loss = val_loss_of();
            stats.val_auc_micro = val_auc_of();
            if (stats.val_loss < best_val) {
                best_val = stats.val_loss;
                best = snapshot();
                result.best_epoch = epoch;
                since_best = 0;
            } else {
                ++since_best;
            }
        }
        result.epochs.push_back(stats);
        result.epochs_run = epoch + 1;
        if (!val_set.empty() && since_best >= cfg.early_stop_patience) break;
    }

    if (!val_set.empty()) {
        restore(best);
        const auto preds = predict_set(m, val_set);
        try {
            result.val_auc_micro = eval::auc_ovr(preds, eval::Averaging::micro);
            result.val_auc_weighted = eval::auc_ovr(preds, eval::Averaging::weighted);
        } catch (const MetricError&) {
        }
        result.val_micro_f1 = eval::micro_f1(eval::confusion_argmax(preds));
        result.val_log_loss = eval::multiclass_log_loss(preds);
    }
    if (!checkpoint_path.empty()) {
        nn::save_checkpoint(checkpoint_path, params);
        result.checkpoint_path = checkpoint_path;
    }
    return result;
}

}  // namespace speechcare::train
