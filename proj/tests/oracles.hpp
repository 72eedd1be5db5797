#pragma once

// Independent reference implementations the tests check the library against.
// These deliberately use different algorithms (or at least different loop
// structures) than the production code.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "speechcare/tape.hpp"
#include "speechcare/tensor.hpp"

namespace oracle {

// Naive i-j-k triple loop (production uses i-k-j accumulation).
template <class T>
speechcare::Mat<T> matmul_naive(const speechcare::Mat<T>& a, const speechcare::Mat<T>& b) {
    speechcare::Mat<T> out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            T s = T(0);
            for (int k = 0; k < a.cols; ++k) s += a.at(i, k) * b.at(k, j);
            out.at(i, j) = s;
        }
    }
    return out;
}

// Central finite differences of `loss` against analytic grads already stored
// in the parameters. Returns the worst relative error.
template <class F>
double fd_worst_rel_err(const std::vector<speechcare::nn::Parameter<double>*>& params, F&& loss,
                        double h = 1e-3) {
    double worst = 0.0;
    for (auto* p : params) {
        for (std::size_t i = 0; i < p->value.v.size(); ++i) {
            const double orig = p->value.v[i];
            p->value.v[i] = orig + h;
            const double lp = loss();
            p->value.v[i] = orig - h;
            const double lm = loss();
            p->value.v[i] = orig;
            const double fd = (lp - lm) / (2.0 * h);
            const double an = p->grad.v[i];
            const double rel =
                std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

// O(n^2) pairwise concordance count, ties worth one half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double num = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) num += 1.0;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / static_cast<double>(pairs);
}

// Full-matrix Levenshtein distance.
inline long edit_distance_full(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<long>> d(n + 1, std::vector<long>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<long>(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<long>(j);
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            d[i][j] = std::min({d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1),
                                d[i - 1][j] + 1, d[i][j - 1] + 1});
    return d[n][m];
}

// Direct exp/sum softmax without max-subtraction.
inline std::vector<double> softmax_direct(const std::vector<double>& v) {
    double sum = 0.0;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i]);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

// O(n^2) DFT magnitude (for small frames only).
inline std::vector<double> dft_magnitude(const std::vector<double>& x, std::size_t nfft) {
    const std::size_t bins = nfft / 2 + 1;
    std::vector<double> out(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < x.size() && i < nfft; ++i) {
            const double ang = -2.0 * 3.14159265358979323846 * static_cast<double>(k * i) /
                               static_cast<double>(nfft);
            acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = std::abs(acc);
    }
    return out;
}

}  // namespace oracle
