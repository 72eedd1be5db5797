#include "speechcare/demographics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace speechcare::data {

AgeBucket bucket_age(double age) {
    if (age < 18.0 || age > 120.0)
        throw DomainError("age " + std::to_string(age) + " outside [18, 120]");
    if (age < 66.0) return AgeBucket::midlife_46_65;
    if (age <= 80.0) return AgeBucket::older_66_80;
    return AgeBucket::elderly_over_80;
}

std::vector<double> encode_demographics(const ManifestRecord& record) {
    if (!record.age)
        throw DataError("record " + record.uid + " has no age; demographic encoding needs one");
    if (!record.education)
        throw StateError("record " + record.uid + " has no education after imputation");
    std::vector<double> v(kDemographicWidth, 0.0);
    v[static_cast<int>(bucket_age(*record.age))] = 1.0;
    v[3 + static_cast<int>(record.gender)] = 1.0;
    v[5 + static_cast<int>(*record.education)] = 1.0;
    return v;
}

namespace {

// 10-dimensional regression features: intercept + age(3) + gender(2) + language(4).
constexpr int kFeat = 10;

std::array<double, kFeat> features_of(const ManifestRecord& r) {
    std::array<double, kFeat> x{};
    x[0] = 1.0;
    if (r.age) x[1 + static_cast<int>(bucket_age(*r.age))] = 1.0;
    x[4 + static_cast<int>(r.gender)] = 1.0;
    x[6 + static_cast<int>(r.language)] = 1.0;
    return x;
}

// Solves (X^T X + ridge I) beta = X^T y by Gaussian elimination with partial
// pivoting. The tiny ridge keeps the collinear one-hot blocks invertible.
std::array<double, kFeat> fit_least_squares(const std::vector<std::array<double, kFeat>>& xs,
                                            const std::vector<double>& ys) {
    double a[kFeat][kFeat] = {};
    double b[kFeat] = {};
    for (std::size_t n = 0; n < xs.size(); ++n) {
        for (int i = 0; i < kFeat; ++i) {
            if (xs[n][i] == 0.0) continue;
            b[i] += xs[n][i] * ys[n];
            for (int j = 0; j < kFeat; ++j) a[i][j] += xs[n][i] * xs[n][j];
        }
    }
    for (int i = 0; i < kFeat; ++i) a[i][i] += 1e-6;

    for (int col = 0; col < kFeat; ++col) {
        int pivot = col;
        for (int r = col + 1; r < kFeat; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (pivot != col) {
            for (int j = 0; j < kFeat; ++j) std::swap(a[col][j], a[pivot][j]);
            std::swap(b[col], b[pivot]);
        }
        const double d = a[col][col];
        for (int r = col + 1; r < kFeat; ++r) {
            const double f = a[r][col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < kFeat; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    std::array<double, kFeat> beta{};
    for (int i = kFeat - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < kFeat; ++j) s -= a[i][j] * beta[j];
        beta[i] = s / a[i][i];
    }
    return beta;
}

double predict(const std::array<double, kFeat>& x, const std::array<double, kFeat>& beta) {
    double s = 0.0;
    for (int i = 0; i < kFeat; ++i) s += x[i] * beta[i];
    return s;
}

Education round_to_level(double y) {
    // Half-up rounding, clamped to the 0..3 ordinal range.
    const int level = std::clamp(static_cast<int>(std::floor(y + 0.5)), 0, 3);
    return static_cast<Education>(level);
}

}  // namespace

std::vector<ManifestRecord> impute_education(const std::vector<ManifestRecord>& records,
                                             std::uint64_t /*seed*/) {
    std::vector<std::size_t> missing;
    std::size_t observed = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].education) ++observed;
        else missing.push_back(i);
    }
    if (missing.empty()) return records;
    if (observed == 0) throw DataError("cannot impute education: no observed values");
    if (observed < 10)
        throw DataError("cannot impute education: need at least 10 observed values, have " +
                        std::to_string(observed));

    std::vector<std::array<double, kFeat>> feats(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) feats[i] = features_of(records[i]);

    std::vector<ManifestRecord> out = records;
    std::vector<double> estimate(records.size(), 0.0);
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].education) estimate[i] = static_cast<double>(static_cast<int>(*records[i].education));

    constexpr int kMaxRounds = 10;
    for (int round = 0; round < kMaxRounds; ++round) {
        // Round 0 fits on observed rows only; later rounds refit with the
        // current imputations included.
        std::vector<std::array<double, kFeat>> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (round == 0 && !records[i].education) continue;
            xs.push_back(feats[i]);
            ys.push_back(estimate[i]);
        }
        const auto beta = fit_least_squares(xs, ys);
        double max_change = 0.0;
        for (const std::size_t i : missing) {
            const double y = predict(feats[i], beta);
            max_change = std::max(max_change, std::abs(y - estimate[i]));
            estimate[i] = y;
        }
        if (round > 0 && max_change < 1e-6) break;
    }
    for (const std::size_t i : missing) out[i].education = round_to_level(estimate[i]);
    return out;
}

}  // namespace speechcare::data
