#pragma once

#include <array>
#include <string>
#include <vector>

#include "speechcare/metrics.hpp"

namespace speechcare::eval {

enum class GroupAttr { age_bucket, gender, education, language };

GroupAttr group_attr_from_string(const std::string& s);
std::string to_string(GroupAttr a);
std::string group_of(const PredictionRecord& r, GroupAttr attr);

struct GroupRates {
    std::string group;
    double tpr = 0.0;
    double fpr = 0.0;
    long positives = 0;
    long negatives = 0;
};

// Per-group true-positive rates for one positive class, and the spread
// between the best- and worst-served group. Groups without positives are
// excluded (reported in `excluded`).
struct EooReport {
    std::vector<GroupRates> groups;
    double gap = 0.0;
    std::vector<std::string> excluded;
};

EooReport equality_of_opportunity(const PredictionSet& preds, GroupAttr attr, int positive_class,
                                  const std::array<double, 3>* thresholds = nullptr);

// Pairwise mean of |dTPR| and |dFPR|; reports per-group rates and the worst
// pair. Groups missing positives or negatives are excluded.
struct OddsReport {
    std::vector<GroupRates> groups;
    double max_average_odds = 0.0;
    std::vector<std::string> excluded;
};

OddsReport average_odds(const PredictionSet& preds, GroupAttr attr, int positive_class,
                        const std::array<double, 3>* thresholds = nullptr);

}  // namespace speechcare::eval
