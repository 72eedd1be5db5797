#include "speechcare/stats.hpp"

#include <cmath>
#include <limits>

namespace speechcare::train {

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) throw DomainError("mean of nothing");
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) throw DomainError("sample std needs at least two values");
    const double m = mean_of(xs);
    double s = 0.0;
    for (const double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

namespace {

double log_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-12;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw DomainError("incomplete beta x outside [0,1]");
    if (x == 0.0 || x == 1.0) return x;
    const double ln_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double dof) {
    if (dof <= 0.0) throw DomainError("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = dof / (dof + t * t);
    return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

CompareResult compare_runs(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("compare_runs needs seed-paired result lists");
    if (a.size() < 2) throw DomainError("compare_runs needs at least two paired results");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];

    CompareResult out;
    out.mean_diff = mean_of(diff);
    const double sd = sample_std(diff);
    if (sd == 0.0) {
        out.exact_tie = true;
        out.p = std::numeric_limits<double>::quiet_NaN();
        if (out.mean_diff == 0.0) {
            out.t = 0.0;
            out.cohens_d = 0.0;
        } else {
            const double inf = std::numeric_limits<double>::infinity();
            out.t = out.mean_diff > 0 ? inf : -inf;
            out.cohens_d = out.t;
        }
        return out;
    }
    const double n = static_cast<double>(diff.size());
    out.t = out.mean_diff / (sd / std::sqrt(n));
    out.cohens_d = out.mean_diff / sd;
    out.p = t_two_sided_p(out.t, n - 1.0);
    return out;
}

}  // namespace speechcare::train
