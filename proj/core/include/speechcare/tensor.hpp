#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "speechcare/errors.hpp"

namespace speechcare {

// Dense row-major matrix. Vectors are 1×n or n×1 as context requires.
template <class T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, T(0)) {}
    Mat(int r, int c, std::initializer_list<T> init) : rows(r), cols(c), v(init) {
        if (v.size() != static_cast<std::size_t>(r) * c)
            throw ShapeError("Mat initializer length does not match rows*cols");
    }

    static Mat row_vector(std::initializer_list<T> init) {
        Mat m;
        m.rows = 1;
        m.cols = static_cast<int>(init.size());
        m.v = init;
        return m;
    }

    T* row(int i) { return v.data() + static_cast<std::size_t>(i) * cols; }
    const T* row(int i) const { return v.data() + static_cast<std::size_t>(i) * cols; }

    T& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
    T at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }

    std::size_t size() const { return v.size(); }
    bool empty() const { return v.empty(); }

    void fill(T x) { std::fill(v.begin(), v.end(), x); }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (const T x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }
};

template <class T>
inline std::string shape_str(const Mat<T>& m) {
    return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

template <class T>
inline Mat<T> transposed(const Mat<T>& a) {
    Mat<T> out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i) {
        const T* arow = a.row(i);
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = arow[j];
    }
    return out;
}

namespace detail {

// Fixed-width panel: the output row lives in registers across the whole
// k loop instead of being reloaded per iteration.
template <class T, int W>
inline void matmul_acc_narrow(const Mat<T>& a, const Mat<T>& b, Mat<T>& out) {
    const int n = a.rows, kk = a.cols;
    for (int i = 0; i < n; ++i) {
        const T* arow = a.row(i);
        T acc[W];
        for (int j = 0; j < W; ++j) acc[j] = T(0);
        for (int k = 0; k < kk; ++k) {
            const T aik = arow[k];
            const T* brow = b.row(k);
#pragma omp simd
            for (int j = 0; j < W; ++j) acc[j] += aik * brow[j];
        }
        T* orow = out.row(i);
        for (int j = 0; j < W; ++j) orow[j] += acc[j];
    }
}

}  // namespace detail

// out += a * b. The k-j loop order keeps the inner loop unit-stride and
// free of floating-point reductions, so it vectorizes under strict IEEE.
template <class T>
inline void matmul_acc(const Mat<T>& a, const Mat<T>& b, Mat<T>& out) {
    if (a.cols != b.rows || out.rows != a.rows || out.cols != b.cols)
        throw ShapeError("matmul shapes " + shape_str(a) + " * " + shape_str(b) +
                         " -> " + shape_str(out));
    const int n = a.rows, kk = a.cols, m = b.cols;
    switch (m) {
        case 2: detail::matmul_acc_narrow<T, 2>(a, b, out); return;
        case 3: detail::matmul_acc_narrow<T, 3>(a, b, out); return;
        case 4: detail::matmul_acc_narrow<T, 4>(a, b, out); return;
        case 8: detail::matmul_acc_narrow<T, 8>(a, b, out); return;
        case 16: detail::matmul_acc_narrow<T, 16>(a, b, out); return;
        default: break;
    }
    for (int i = 0; i < n; ++i) {
        const T* arow = a.row(i);
        T* orow = out.row(i);
        for (int k = 0; k < kk; ++k) {
            const T aik = arow[k];
            const T* brow = b.row(k);
            for (int j = 0; j < m; ++j) orow[j] += aik * brow[j];
        }
    }
}

template <class T>
inline Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> out(a.rows, b.cols);
    matmul_acc(a, b, out);
    return out;
}

}  // namespace speechcare
