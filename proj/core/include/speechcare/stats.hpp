#pragma once

#include <vector>

#include "speechcare/errors.hpp"

namespace speechcare::train {

// Paired comparison of seed-matched run metrics. On zero-variance
// differences the p-value is reported as an exact tie (exact_tie set, p is
// NaN) and Cohen's d is +/-infinity when the mean difference is nonzero,
// zero otherwise.
struct CompareResult {
    double t = 0.0;
    double p = 1.0;
    double cohens_d = 0.0;
    double mean_diff = 0.0;
    bool exact_tie = false;
};

CompareResult compare_runs(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided p for a t statistic with `dof` degrees of freedom, via the
// regularized incomplete beta continued fraction (~1e-10 accuracy).
double t_two_sided_p(double t, double dof);

double regularized_incomplete_beta(double a, double b, double x);

double mean_of(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);  // unbiased (n-1)

}  // namespace speechcare::train
