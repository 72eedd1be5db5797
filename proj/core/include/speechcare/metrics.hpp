#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speechcare/manifest.hpp"

namespace speechcare::eval {

// One scored record with the group attributes the fairness audit needs.
struct PredictionRecord {
    std::string uid;
    std::array<double, 3> probs{};
    int label = -1;
    std::optional<data::AgeBucket> age_bucket;
    data::Gender gender = data::Gender::female;
    std::optional<data::Education> education;
    data::Language language = data::Language::english;
};

using PredictionSet = std::vector<PredictionRecord>;

enum class Averaging { micro, weighted };

enum class CurveKind { roc, pr, cumulative_gain, information_gain };

struct CurveSeries {
    CurveKind kind;
    std::vector<std::pair<double, double>> points;
};

// 3×3 counts, rows = true label, cols = predicted.
struct ConfusionMatrix {
    std::array<std::array<long, 3>, 3> counts{};

    long total() const {
        long t = 0;
        for (const auto& row : counts)
            for (const long c : row) t += c;
        return t;
    }
    long trace() const { return counts[0][0] + counts[1][1] + counts[2][2]; }
};

// Binary ROC-AUC with ties counted 0.5 (midrank convention). Exact: equals
// the O(n²) pairwise concordance count.
double auc_binary(const std::vector<double>& scores, const std::vector<int>& labels);

// One-vs-rest multiclass AUC. Micro pools the 3N binary decisions; weighted
// averages per-class AUC by class prevalence. Classes without both a
// positive and a negative are skipped with a warning; a single-class set is
// an error.
double auc_ovr(const PredictionSet& preds, Averaging averaging);

// Micro-averaged F1; equals trace/total for single-label multiclass.
double micro_f1(const ConfusionMatrix& m);

struct ClassPrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    bool precision_defined = true;  // false when the class was never predicted
    bool recall_defined = true;     // false when the class has no true records
};

std::array<ClassPrecisionRecall, 3> per_class_pr(const ConfusionMatrix& m);

// Ratio-to-threshold decision rule: predicted class = argmax p_c / theta_c.
// Equal thresholds reduce to plain argmax.
ConfusionMatrix threshold_adjust(const PredictionSet& preds,
                                 const std::array<double, 3>& thresholds);

ConfusionMatrix confusion_argmax(const PredictionSet& preds);

int predicted_class(const std::array<double, 3>& probs,
                    const std::array<double, 3>* thresholds = nullptr);

// Mean -log p_true, clamped at 1e-15.
double multiclass_log_loss(const PredictionSet& preds);

CurveSeries roc_curve(const PredictionSet& preds, int positive_class);
CurveSeries pr_curve(const PredictionSet& preds, int positive_class);

// Share of the class's positives captured in the top-f fraction when records
// are ranked by that class's probability.
CurveSeries cumulative_gain(const PredictionSet& preds, int positive_class);

// Entropy reduction H(label) - H(label | predicted class) over the top-f
// most confident records. The exact construction is this library's
// definition; treat absolute values as relative diagnostics.
CurveSeries information_gain_curve(const PredictionSet& preds);

void write_curve_csv(const CurveSeries& curve, const std::string& path);

// Predictions JSONL: uid, probs, label, group fields.
void write_predictions(const std::string& path, const PredictionSet& preds);
PredictionSet read_predictions(const std::string& path);

}  // namespace speechcare::eval
