#include "speechcare/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace speechcare::eval {

using json = nlohmann::json;

double auc_binary(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DomainError("auc: scores/labels length mismatch");
    const std::size_t n = scores.size();
    long positives = 0;
    for (const int y : labels) positives += y ? 1 : 0;
    const long negatives = static_cast<long>(n) - positives;
    if (positives == 0 || negatives == 0)
        throw MetricError("auc undefined without both positives and negatives");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tied scores keep the rank-sum equal to the pairwise
    // concordance count with ties worth 0.5.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = static_cast<double>(i + 1 + j) / 2.0;  // (first+last)/2, 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) pos_rank_sum += midrank;
        i = j;
    }
    const double p = static_cast<double>(positives);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

double auc_ovr(const PredictionSet& preds, Averaging averaging) {
    if (preds.empty()) throw MetricError("auc of an empty prediction set");
    std::array<long, 3> class_count{};
    for (const auto& r : preds) {
        if (r.label < 0 || r.label > 2) throw DomainError("prediction label out of range");
        ++class_count[r.label];
    }
    int present = 0;
    for (const long c : class_count) present += c > 0 ? 1 : 0;
    if (present < 2) throw MetricError("auc undefined on a single-class dataset");

    if (averaging == Averaging::micro) {
        std::vector<double> scores;
        std::vector<int> labels;
        scores.reserve(preds.size() * 3);
        labels.reserve(preds.size() * 3);
        for (const auto& r : preds) {
            for (int c = 0; c < 3; ++c) {
                scores.push_back(r.probs[c]);
                labels.push_back(r.label == c ? 1 : 0);
            }
        }
        return auc_binary(scores, labels);
    }

    double weighted = 0.0, weight_sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        if (class_count[c] == 0 || class_count[c] == static_cast<long>(preds.size())) {
            if (class_count[c] != 0)
                std::cerr << "auc_ovr: class " << c << " has no negatives; skipped\n";
            continue;
        }
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& r : preds) {
            scores.push_back(r.probs[c]);
            labels.push_back(r.label == c ? 1 : 0);
        }
        const double prevalence =
            static_cast<double>(class_count[c]) / static_cast<double>(preds.size());
        weighted += prevalence * auc_binary(scores, labels);
        weight_sum += prevalence;
    }
    if (weight_sum == 0.0) throw MetricError("no class had both positives and negatives");
    return weighted / weight_sum;
}

double micro_f1(const ConfusionMatrix& m) {
    const long total = m.total();
    if (total == 0) throw MetricError("micro F1 of an empty confusion matrix");
    // Single-label multiclass: pooled TP = trace, pooled FP = pooled FN.
    return static_cast<double>(m.trace()) / static_cast<double>(total);
}

std::array<ClassPrecisionRecall, 3> per_class_pr(const ConfusionMatrix& m) {
    if (m.total() == 0) throw MetricError("precision/recall of an empty confusion matrix");
    std::array<ClassPrecisionRecall, 3> out;
    for (int c = 0; c < 3; ++c) {
        long col = 0, row = 0;
        for (int k = 0; k < 3; ++k) {
            col += m.counts[k][c];
            row += m.counts[c][k];
        }
        const long tp = m.counts[c][c];
        out[c].precision_defined = col > 0;
        out[c].recall_defined = row > 0;
        out[c].precision = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
        out[c].recall = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    }
    return out;
}

int predicted_class(const std::array<double, 3>& probs, const std::array<double, 3>* thresholds) {
    int best = 0;
    double best_ratio = -1.0;
    for (int c = 0; c < 3; ++c) {
        const double ratio = thresholds ? probs[c] / (*thresholds)[c] : probs[c];
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = c;
        }
    }
    return best;
}

ConfusionMatrix threshold_adjust(const PredictionSet& preds,
                                 const std::array<double, 3>& thresholds) {
    for (const double t : thresholds)
        if (!(t > 0.0 && t < 1.0)) throw DomainError("thresholds must lie in (0,1)");
    ConfusionMatrix m;
    for (const auto& r : preds) {
        if (r.label < 0 || r.label > 2) throw DomainError("prediction label out of range");
        ++m.counts[r.label][predicted_class(r.probs, &thresholds)];
    }
    return m;
}

ConfusionMatrix confusion_argmax(const PredictionSet& preds) {
    ConfusionMatrix m;
    for (const auto& r : preds) {
        if (r.label < 0 || r.label > 2) throw DomainError("prediction label out of range");
        ++m.counts[r.label][predicted_class(r.probs)];
    }
    return m;
}

double multiclass_log_loss(const PredictionSet& preds) {
    if (preds.empty()) throw MetricError("log loss of an empty prediction set");
    double total = 0.0;
    for (const auto& r : preds) {
        if (r.label < 0 || r.label > 2) throw DomainError("prediction label out of range");
        total += -std::log(std::max(r.probs[r.label], 1e-15));
    }
    return total / static_cast<double>(preds.size());
}

namespace {

// Indices sorted by one class's score, descending, uid tie-break for
// deterministic output.
std::vector<std::size_t> rank_by_score(const PredictionSet& preds, int positive_class) {
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (preds[a].probs[positive_class] != preds[b].probs[positive_class])
            return preds[a].probs[positive_class] > preds[b].probs[positive_class];
        return preds[a].uid < preds[b].uid;
    });
    return order;
}

long count_positives(const PredictionSet& preds, int positive_class) {
    long p = 0;
    for (const auto& r : preds) p += r.label == positive_class ? 1 : 0;
    return p;
}

double entropy(const std::array<long, 3>& counts, long total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (const long c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

CurveSeries roc_curve(const PredictionSet& preds, int positive_class) {
    const long pos = count_positives(preds, positive_class);
    const long neg = static_cast<long>(preds.size()) - pos;
    if (pos == 0 || neg == 0) throw MetricError("roc curve needs positives and negatives");
    const auto order = rank_by_score(preds, positive_class);
    CurveSeries out{CurveKind::roc, {}};
    out.points.emplace_back(0.0, 0.0);
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double score = preds[order[i]].probs[positive_class];
        while (i < order.size() && preds[order[i]].probs[positive_class] == score) {
            if (preds[order[i]].label == positive_class) ++tp;
            else ++fp;
            ++i;
        }
        out.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos));
    }
    return out;
}

CurveSeries pr_curve(const PredictionSet& preds, int positive_class) {
    const long pos = count_positives(preds, positive_class);
    if (pos == 0) throw MetricError("pr curve needs at least one positive");
    const auto order = rank_by_score(preds, positive_class);
    CurveSeries out{CurveKind::pr, {}};
    out.points.emplace_back(0.0, 1.0);
    long tp = 0, taken = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double score = preds[order[i]].probs[positive_class];
        while (i < order.size() && preds[order[i]].probs[positive_class] == score) {
            if (preds[order[i]].label == positive_class) ++tp;
            ++taken;
            ++i;
        }
        out.points.emplace_back(static_cast<double>(tp) / static_cast<double>(pos),
                                static_cast<double>(tp) / static_cast<double>(taken));
    }
    return out;
}

CurveSeries cumulative_gain(const PredictionSet& preds, int positive_class) {
    const long pos = count_positives(preds, positive_class);
    if (pos == 0) throw MetricError("cumulative gain needs at least one positive");
    const auto order = rank_by_score(preds, positive_class);
    CurveSeries out{CurveKind::cumulative_gain, {}};
    out.points.emplace_back(0.0, 0.0);
    long captured = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (preds[order[k]].label == positive_class) ++captured;
        out.points.emplace_back(static_cast<double>(k + 1) / static_cast<double>(preds.size()),
                                static_cast<double>(captured) / static_cast<double>(pos));
    }
    return out;
}

CurveSeries information_gain_curve(const PredictionSet& preds) {
    if (preds.empty()) throw MetricError("information gain of an empty prediction set");
    std::array<long, 3> class_count{};
    for (const auto& r : preds) ++class_count[r.label];
    int present = 0;
    for (const long c : class_count) present += c > 0 ? 1 : 0;
    if (present < 2) throw MetricError("information gain needs at least two classes");

    // Rank by confidence (top predicted probability), uid tie-break.
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ca = *std::max_element(preds[a].probs.begin(), preds[a].probs.end());
        const double cb = *std::max_element(preds[b].probs.begin(), preds[b].probs.end());
        if (ca != cb) return ca > cb;
        return preds[a].uid < preds[b].uid;
    });

    CurveSeries out{CurveKind::information_gain, {}};
    std::array<long, 3> label_hist{};
    std::array<std::array<long, 3>, 3> joint{};  // [predicted][label]
    std::array<long, 3> pred_hist{};
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& r = preds[order[k]];
        const int pred = predicted_class(r.probs);
        ++label_hist[r.label];
        ++pred_hist[pred];
        ++joint[pred][r.label];
        const long n = static_cast<long>(k + 1);
        double cond = 0.0;
        for (int g = 0; g < 3; ++g) {
            if (pred_hist[g] == 0) continue;
            cond += static_cast<double>(pred_hist[g]) / static_cast<double>(n) *
                    entropy(joint[g], pred_hist[g]);
        }
        const double gain = std::max(0.0, entropy(label_hist, n) - cond);
        out.points.emplace_back(static_cast<double>(n) / static_cast<double>(preds.size()), gain);
    }
    return out;
}

void write_curve_csv(const CurveSeries& curve, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open curve csv for writing: " + path);
    os << "x,y\n";
    os.precision(10);
    for (const auto& [x, y] : curve.points) os << x << ',' << y << '\n';
}

void write_predictions(const std::string& path, const PredictionSet& preds) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open predictions for writing: " + path);
    for (const auto& r : preds) {
        json j;
        j["uid"] = r.uid;
        j["probs"] = r.probs;
        if (r.label >= 0) j["label"] = r.label;
        if (r.age_bucket) j["age_bucket"] = data::to_string(*r.age_bucket);
        j["gender"] = data::to_string(r.gender);
        if (r.education) j["education"] = data::to_string(*r.education);
        j["language"] = data::to_string(r.language);
        os << j.dump() << "\n";
    }
    if (!os) throw DataError("short write to predictions: " + path);
}

PredictionSet read_predictions(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open predictions: " + path);
    PredictionSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            PredictionRecord r;
            r.uid = j.at("uid").get<std::string>();
            const auto probs = j.at("probs").get<std::vector<double>>();
            if (probs.size() != 3) throw DataError("probs must have 3 entries");
            std::copy(probs.begin(), probs.end(), r.probs.begin());
            if (j.contains("label") && !j.at("label").is_null())
                r.label = j.at("label").get<int>();
            if (j.contains("age_bucket") && !j.at("age_bucket").is_null()) {
                const auto s = j.at("age_bucket").get<std::string>();
                if (s == "midlife_46_65") r.age_bucket = data::AgeBucket::midlife_46_65;
                else if (s == "older_66_80") r.age_bucket = data::AgeBucket::older_66_80;
                else if (s == "elderly_over_80") r.age_bucket = data::AgeBucket::elderly_over_80;
                else throw DataError("unknown age bucket: " + s);
            }
            if (j.contains("gender"))
                r.gender = data::gender_from_string(j.at("gender").get<std::string>());
            if (j.contains("education") && !j.at("education").is_null())
                r.education = data::education_from_string(j.at("education").get<std::string>());
            if (j.contains("language"))
                r.language = data::language_from_string(j.at("language").get<std::string>());
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw DataError("predictions line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace speechcare::eval
