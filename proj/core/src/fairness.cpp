#include "speechcare/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

namespace speechcare::eval {

GroupAttr group_attr_from_string(const std::string& s) {
    if (s == "age_bucket") return GroupAttr::age_bucket;
    if (s == "gender") return GroupAttr::gender;
    if (s == "education") return GroupAttr::education;
    if (s == "language") return GroupAttr::language;
    throw DataError("unknown group attribute: " + s);
}

std::string to_string(GroupAttr a) {
    switch (a) {
        case GroupAttr::age_bucket: return "age_bucket";
        case GroupAttr::gender: return "gender";
        case GroupAttr::education: return "education";
        case GroupAttr::language: return "language";
    }
    return "";
}

std::string group_of(const PredictionRecord& r, GroupAttr attr) {
    switch (attr) {
        case GroupAttr::age_bucket:
            return r.age_bucket ? data::to_string(*r.age_bucket) : "no_age";
        case GroupAttr::gender: return data::to_string(r.gender);
        case GroupAttr::education:
            return r.education ? data::to_string(*r.education) : "no_education";
        case GroupAttr::language: return data::to_string(r.language);
    }
    return "";
}

namespace {

struct Tally {
    long tp = 0, fn = 0, fp = 0, tn = 0;
    long positives() const { return tp + fn; }
    long negatives() const { return fp + tn; }
};

std::map<std::string, Tally> tally_groups(const PredictionSet& preds, GroupAttr attr,
                                          int positive_class,
                                          const std::array<double, 3>* thresholds) {
    if (positive_class < 0 || positive_class > 2)
        throw DomainError("positive class out of range");
    std::map<std::string, Tally> out;
    for (const auto& r : preds) {
        if (r.label < 0 || r.label > 2) throw DomainError("prediction label out of range");
        Tally& t = out[group_of(r, attr)];
        const bool truth = r.label == positive_class;
        const bool pred = predicted_class(r.probs, thresholds) == positive_class;
        if (truth && pred) ++t.tp;
        else if (truth) ++t.fn;
        else if (pred) ++t.fp;
        else ++t.tn;
    }
    return out;
}

}  // namespace

EooReport equality_of_opportunity(const PredictionSet& preds, GroupAttr attr, int positive_class,
                                  const std::array<double, 3>* thresholds) {
    const auto tallies = tally_groups(preds, attr, positive_class, thresholds);
    EooReport report;
    for (const auto& [name, t] : tallies) {
        if (t.positives() == 0) {
            std::cerr << "equality_of_opportunity: group " << name << " has no positives\n";
            report.excluded.push_back(name);
            continue;
        }
        GroupRates g;
        g.group = name;
        g.positives = t.positives();
        g.negatives = t.negatives();
        g.tpr = static_cast<double>(t.tp) / static_cast<double>(t.positives());
        g.fpr = t.negatives() > 0
                    ? static_cast<double>(t.fp) / static_cast<double>(t.negatives())
                    : 0.0;
        report.groups.push_back(g);
    }
    if (report.groups.empty()) throw MetricError("no group had positive examples");
    double lo = report.groups.front().tpr, hi = lo;
    for (const auto& g : report.groups) {
        lo = std::min(lo, g.tpr);
        hi = std::max(hi, g.tpr);
    }
    report.gap = hi - lo;
    return report;
}

OddsReport average_odds(const PredictionSet& preds, GroupAttr attr, int positive_class,
                        const std::array<double, 3>* thresholds) {
    const auto tallies = tally_groups(preds, attr, positive_class, thresholds);
    OddsReport report;
    for (const auto& [name, t] : tallies) {
        if (t.positives() == 0 || t.negatives() == 0) {
            std::cerr << "average_odds: group " << name << " lacks positives or negatives\n";
            report.excluded.push_back(name);
            continue;
        }
        GroupRates g;
        g.group = name;
        g.positives = t.positives();
        g.negatives = t.negatives();
        g.tpr = static_cast<double>(t.tp) / static_cast<double>(t.positives());
        g.fpr = static_cast<double>(t.fp) / static_cast<double>(t.negatives());
        report.groups.push_back(g);
    }
    if (report.groups.size() < 2)
        throw MetricError("average odds needs at least two usable groups");
    for (std::size_t i = 0; i < report.groups.size(); ++i) {
        for (std::size_t j = i + 1; j < report.groups.size(); ++j) {
            const double odds = 0.5 * (std::abs(report.groups[i].tpr - report.groups[j].tpr) +
                                       std::abs(report.groups[i].fpr - report.groups[j].fpr));
            report.max_average_odds = std::max(report.max_average_odds, odds);
        }
    }
    return report;
}

}  // namespace speechcare::eval
