#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "speechcare/errors.hpp"
#include "speechcare/rng.hpp"
#include "speechcare/tensor.hpp"

namespace speechcare::nn {

namespace detail {

// Attention tapes allocate ~250 KB score blocks every pass; keeping those on
// the heap instead of per-call mmap/munmap cuts page-fault churn badly enough
// to matter for training throughput.
inline bool tune_allocator() {
#if defined(__GLIBC__)
    mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 128 * 1024 * 1024);
#endif
    return true;
}

inline const bool allocator_tuned = tune_allocator();

}  // namespace detail

namespace detail {

// Branchless Cephes-style expf with relative error ~4e-6, valid for
// |x| <= 2^21 (softmax arguments are max-normalized, and the additive
// attention mask constant stays inside that domain). Saturates to 2^±127
// outside the binary32 exponent range instead of returning inf/0. Used on
// the float training path where attention softmax dominates runtime; the
// double path keeps libm exp so gradient verification is bit-faithful.
inline float fast_exp(float x) {
    const float t = 1.44269504088896341f * x;
    const float magic = 12582912.0f;  // 1.5 * 2^23, rounds to nearest int
    const float z = (t + magic) - magic;
    float r = x - z * 0.693359375f;
    r -= z * -2.12194440e-4f;
    float p = 1.9875691500e-4f;
    p = p * r + 1.3981999507e-3f;
    p = p * r + 8.3334519073e-3f;
    p = p * r + 4.1665795894e-2f;
    p = p * r + 1.6666665459e-1f;
    p = p * r + 5.0000001201e-1f;
    p = p * r * r + r + 1.0f;
    int ki = static_cast<int>(z);
    ki = ki < -126 ? -126 : (ki > 127 ? 127 : ki);
    return p * std::bit_cast<float>(static_cast<std::uint32_t>(ki + 127) << 23);
}

inline double fast_exp(double x) { return std::exp(x); }

}  // namespace detail

enum class ParamGroup { acoustic, text, head };

// A named trainable tensor. Gradients accumulate across a mini-batch and are
// cleared by the optimizer step.
template <class T>
struct Parameter {
    std::string name;
    ParamGroup group = ParamGroup::head;
    Mat<T> value;
    Mat<T> grad;

    Parameter() = default;
    Parameter(std::string n, int rows, int cols, ParamGroup g)
        : name(std::move(n)), group(g), value(rows, cols), grad(rows, cols) {}

    void zero_grad() { grad.fill(T(0)); }
};

// Reverse-mode tape over matrix-valued nodes. A forward pass records one node
// per operation; backward() walks the nodes in reverse creation order (a valid
// topological order of the DAG) and accumulates gradients into Parameter::grad
// for every trainable leaf touched by the pass.
//
// One tape serves one forward/backward pass over one example; construction is
// cheap and tapes are not reused.
template <class T>
class Tape {
public:
    using Ix = std::int32_t;

    Tape() = default;
    // training enables dropout; rng drives dropout masks and must outlive the tape.
    Tape(bool training, Rng* rng) : training_(training), rng_(rng) {}

    bool training() const { return training_; }

    const Mat<T>& value(Ix i) const { return nodes_[i].val; }
    const Mat<T>& grad(Ix i) const { return nodes_[i].grad; }
    int rows(Ix i) const { return nodes_[i].val.rows; }
    int cols(Ix i) const { return nodes_[i].val.cols; }

    // ---- leaves ----

    Ix input(Mat<T> value) { return push(std::move(value), nullptr); }

    Ix param(Parameter<T>& p) {
        Parameter<T>* pp = &p;
        return push(Mat<T>(p.value), [pp](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            for (std::size_t i = 0; i < g.v.size(); ++i) pp->grad.v[i] += g.v[i];
        });
    }

    // Gathers rows of an embedding table without materializing the table on
    // the tape; backward scatters straight into the table's gradient.
    Ix rows_lookup(Parameter<T>& table, std::vector<int> ids) {
        Mat<T> out(static_cast<int>(ids.size()), table.value.cols);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const int id = ids[i];
            if (id < 0 || id >= table.value.rows)
                throw DomainError("rows_lookup id out of range");
            const T* src = table.value.row(id);
            T* dst = out.row(static_cast<int>(i));
            for (int j = 0; j < out.cols; ++j) dst[j] = src[j];
        }
        Parameter<T>* pt = &table;
        auto ids_c = std::move(ids);
        return push(std::move(out), [pt, ids_c](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            for (std::size_t i = 0; i < ids_c.size(); ++i) {
                T* dst = pt->grad.row(ids_c[i]);
                const T* src = g.row(static_cast<int>(i));
                for (int j = 0; j < g.cols; ++j) dst[j] += src[j];
            }
        });
    }

    // ---- arithmetic ----

    Ix matmul(Ix a, Ix b) {
        const Mat<T>&A = val(a), &B = val(b);
        if (A.cols != B.rows)
            throw ShapeError("matmul " + shape_str(A) + " * " + shape_str(B));
        Mat<T> out(A.rows, B.cols);
        matmul_acc(A, B, out);
        return push(std::move(out), [a, b](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            // dA += g * B^T, dB += A^T * g; transposed copies keep the
            // accumulation kernel reduction-free.
            Mat<T> bt = transposed(t.val(b));
            matmul_acc(g, bt, t.nodes_[a].grad);
            Mat<T> at = transposed(t.val(a));
            matmul_acc(at, g, t.nodes_[b].grad);
        });
    }

    Ix transpose(Ix a) {
        return push(transposed(val(a)), [a](Tape& t, Ix self) {
            Mat<T> gt = transposed(t.nodes_[self].grad);
            accumulate(t.nodes_[a].grad, gt);
        });
    }

    Ix add(Ix a, Ix b) {
        const Mat<T>&A = val(a), &B = val(b);
        if (!A.same_shape(B))
            throw ShapeError("add " + shape_str(A) + " + " + shape_str(B));
        Mat<T> out(A.rows, A.cols);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = A.v[i] + B.v[i];
        return push(std::move(out), [a, b](Tape& t, Ix self) {
            accumulate(t.nodes_[a].grad, t.nodes_[self].grad);
            accumulate(t.nodes_[b].grad, t.nodes_[self].grad);
        });
    }

    // a (n×d) plus a 1×d row broadcast over every row (bias add).
    Ix add_row(Ix a, Ix r) {
        const Mat<T>&A = val(a), &R = val(r);
        if (R.rows != 1 || R.cols != A.cols)
            throw ShapeError("add_row " + shape_str(A) + " + " + shape_str(R));
        Mat<T> out(A.rows, A.cols);
        for (int i = 0; i < A.rows; ++i) {
            const T* arow = A.row(i);
            T* orow = out.row(i);
            for (int j = 0; j < A.cols; ++j) orow[j] = arow[j] + R.v[j];
        }
        return push(std::move(out), [a, r](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            accumulate(t.nodes_[a].grad, g);
            Mat<T>& gr = t.nodes_[r].grad;
            for (int i = 0; i < g.rows; ++i) {
                const T* grow = g.row(i);
                for (int j = 0; j < g.cols; ++j) gr.v[j] += grow[j];
            }
        });
    }

    Ix scale(Ix a, T s) {
        Mat<T> out = val(a);
        for (T& x : out.v) x *= s;
        return push(std::move(out), [a, s](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            Mat<T>& ga = t.nodes_[a].grad;
            for (std::size_t i = 0; i < g.v.size(); ++i) ga.v[i] += s * g.v[i];
        });
    }

    Ix tanh_of(Ix a) {
        Mat<T> out = val(a);
        for (T& x : out.v) x = std::tanh(x);
        return push(std::move(out), [a](Tape& t, Ix self) {
            const Mat<T>& y = t.nodes_[self].val;
            const Mat<T>& g = t.nodes_[self].grad;
            Mat<T>& ga = t.nodes_[a].grad;
            for (std::size_t i = 0; i < g.v.size(); ++i)
                ga.v[i] += g.v[i] * (T(1) - y.v[i] * y.v[i]);
        });
    }

    // Row-wise softmax, stabilized by max subtraction.
    Ix softmax_rows(Ix a) {
        const Mat<T>& A = val(a);
        if (A.cols == 0) throw DomainError("softmax of empty vector");
        Mat<T> out(A.rows, A.cols);
        for (int i = 0; i < A.rows; ++i)
            softmax_row(A.row(i), out.row(i), A.cols);
        return push(std::move(out), [a](Tape& t, Ix self) {
            const Mat<T>& y = t.nodes_[self].val;
            const Mat<T>& g = t.nodes_[self].grad;
            Mat<T>& ga = t.nodes_[a].grad;
            for (int i = 0; i < y.rows; ++i) {
                const T* yr = y.row(i);
                const T* gr = g.row(i);
                T* gar = ga.row(i);
                T dot = T(0);
                for (int j = 0; j < y.cols; ++j) dot += gr[j] * yr[j];
                for (int j = 0; j < y.cols; ++j) gar[j] += yr[j] * (gr[j] - dot);
            }
        });
    }

    // Row-wise layer norm with affine parameters gamma/beta (1×d nodes).
    Ix layer_norm_rows(Ix a, Ix gamma, Ix beta, T eps) {
        const Mat<T>&A = val(a), &G = val(gamma), &B = val(beta);
        const int d = A.cols;
        if (d < 2) throw DomainError("layer norm needs length >= 2");
        if (G.cols != d || B.cols != d || G.rows != 1 || B.rows != 1)
            throw ShapeError("layer_norm affine shape");
        Mat<T> out(A.rows, d);
        Mat<T> xhat(A.rows, d);
        std::vector<T> inv_std(A.rows);
        for (int i = 0; i < A.rows; ++i) {
            const T* x = A.row(i);
            T mean = T(0);
            for (int j = 0; j < d; ++j) mean += x[j];
            mean /= T(d);
            T var = T(0);
            for (int j = 0; j < d; ++j) var += (x[j] - mean) * (x[j] - mean);
            var /= T(d);
            const T is = T(1) / std::sqrt(var + eps);
            inv_std[i] = is;
            T* xh = xhat.row(i);
            T* o = out.row(i);
            for (int j = 0; j < d; ++j) {
                xh[j] = (x[j] - mean) * is;
                o[j] = G.v[j] * xh[j] + B.v[j];
            }
        }
        auto xhat_c = std::make_shared<Mat<T>>(std::move(xhat));
        auto istd_c = std::make_shared<std::vector<T>>(std::move(inv_std));
        return push(std::move(out), [a, gamma, beta, xhat_c, istd_c](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            const Mat<T>& G = t.val(gamma);
            const int d = g.cols;
            Mat<T>& ga = t.nodes_[a].grad;
            Mat<T>& gg = t.nodes_[gamma].grad;
            Mat<T>& gb = t.nodes_[beta].grad;
            for (int i = 0; i < g.rows; ++i) {
                const T* gr = g.row(i);
                const T* xh = xhat_c->row(i);
                const T is = (*istd_c)[i];
                T sum_gxh = T(0), sum_gx = T(0);
                for (int j = 0; j < d; ++j) {
                    gb.v[j] += gr[j];
                    gg.v[j] += gr[j] * xh[j];
                    const T gxhat = gr[j] * G.v[j];
                    sum_gx += gxhat;
                    sum_gxh += gxhat * xh[j];
                }
                const T mean_gx = sum_gx / T(d);
                const T mean_gxh = sum_gxh / T(d);
                T* gar = ga.row(i);
                for (int j = 0; j < d; ++j) {
                    const T gxhat = gr[j] * G.v[j];
                    gar[j] += is * (gxhat - mean_gx - xh[j] * mean_gxh);
                }
            }
        });
    }

    // Multi-head scaled dot-product self-attention, fused into one node.
    // q/k/v are n×dim projections; output is the n×dim concatenation of
    // per-head softmax(Q_h K_h^T / sqrt(head_dim)) V_h. Fusing all heads keeps
    // the big n×n products in cache-friendly kernels.
    Ix mha(Ix q, Ix k, Ix v, int heads) {
        const Mat<T>&Q = val(q), &K = val(k), &V = val(v);
        if (!Q.same_shape(K) || !Q.same_shape(V))
            throw ShapeError("mha projections must share a shape");
        const int n = Q.rows, dim = Q.cols;
        if (heads <= 0 || dim % heads != 0)
            throw ShapeError("mha dim not divisible by heads");
        const int hd = dim / heads;
        const T att_scale = T(1) / std::sqrt(static_cast<T>(hd));

        struct HeadCtx {
            Mat<T> qh, kh, vh;  // n×hd contiguous copies
            Mat<T> attn;        // n×n softmax weights
        };
        auto ctx = std::make_shared<std::vector<HeadCtx>>(heads);
        Mat<T> out(n, dim);
        for (int h = 0; h < heads; ++h) {
            HeadCtx& hc = (*ctx)[h];
            hc.qh = take_cols(Q, h * hd, hd);
            hc.kh = take_cols(K, h * hd, hd);
            hc.vh = take_cols(V, h * hd, hd);
            Mat<T> kt = transposed(hc.kh);
            Mat<T> scores(n, n);
            matmul_acc(hc.qh, kt, scores);
            hc.attn = Mat<T>(n, n);
            for (int i = 0; i < n; ++i) {
                T* srow = scores.row(i);
                for (int j = 0; j < n; ++j) srow[j] *= att_scale;
                softmax_row(srow, hc.attn.row(i), n);
            }
            Mat<T> oh(n, hd);
            matmul_acc(hc.attn, hc.vh, oh);
            for (int i = 0; i < n; ++i) {
                const T* src = oh.row(i);
                T* dst = out.row(i) + h * hd;
                for (int j = 0; j < hd; ++j) dst[j] = src[j];
            }
        }
        return push(std::move(out), [q, k, v, heads, hd, att_scale, ctx](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            const int n = g.rows;
            Mat<T>& gq = t.nodes_[q].grad;
            Mat<T>& gk = t.nodes_[k].grad;
            Mat<T>& gv = t.nodes_[v].grad;
            for (int h = 0; h < heads; ++h) {
                const HeadCtx& hc = (*ctx)[h];
                Mat<T> goh = take_cols(g, h * hd, hd);
                Mat<T> goh_t = transposed(goh);
                // dV_h^T = dO_h^T A keeps the wide dimension innermost; the
                // small transposed results are scattered back below.
                Mat<T> dvh_t(hd, n);
                matmul_acc(goh_t, hc.attn, dvh_t);
                // dA = dO_h V_h^T, then back through the row softmax.
                Mat<T> vt = transposed(hc.vh);
                Mat<T> da(n, n);
                matmul_acc(goh, vt, da);
                Mat<T> ds(n, n);
                for (int i = 0; i < n; ++i) {
                    const T* arow = hc.attn.row(i);
                    const T* darow = da.row(i);
                    T* dsrow = ds.row(i);
                    T dot = T(0);
                    for (int j = 0; j < n; ++j) dot += darow[j] * arow[j];
                    for (int j = 0; j < n; ++j)
                        dsrow[j] = att_scale * arow[j] * (darow[j] - dot);
                }
                // dQ_h += dS K_h ; dK_h^T = Q_h^T dS
                Mat<T> dqh(n, hd);
                matmul_acc(ds, hc.kh, dqh);
                Mat<T> qt = transposed(hc.qh);
                Mat<T> dkh_t(hd, n);
                matmul_acc(qt, ds, dkh_t);
                for (int i = 0; i < n; ++i) {
                    T* gqr = gq.row(i) + h * hd;
                    T* gkr = gk.row(i) + h * hd;
                    T* gvr = gv.row(i) + h * hd;
                    const T* dq = dqh.row(i);
                    for (int j = 0; j < hd; ++j) {
                        gqr[j] += dq[j];
                        gkr[j] += dkh_t.at(j, i);
                        gvr[j] += dvh_t.at(j, i);
                    }
                }
            }
        });
    }

    // Inverted dropout; identity when not training or rate == 0.
    Ix dropout(Ix a, T rate) {
        if (rate < T(0) || rate >= T(1)) throw DomainError("dropout rate must be in [0,1)");
        if (!training_ || rate == T(0)) return a;
        if (!rng_) throw StateError("dropout in training mode requires an rng");
        const Mat<T>& A = val(a);
        const T keep_scale = T(1) / (T(1) - rate);
        auto mask = std::make_shared<Mat<T>>(A.rows, A.cols);
        Mat<T> out(A.rows, A.cols);
        for (std::size_t i = 0; i < A.v.size(); ++i) {
            const T m = (rng_->uniform() < static_cast<double>(rate)) ? T(0) : keep_scale;
            mask->v[i] = m;
            out.v[i] = A.v[i] * m;
        }
        return push(std::move(out), [a, mask](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            Mat<T>& ga = t.nodes_[a].grad;
            for (std::size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i] * mask->v[i];
        });
    }

    // ---- reshaping ----

    Ix slice_rows(Ix a, int r0, int n) {
        const Mat<T>& A = val(a);
        if (r0 < 0 || n < 0 || r0 + n > A.rows) throw ShapeError("slice_rows range");
        Mat<T> out(n, A.cols);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < A.cols; ++j) out.at(i, j) = A.at(r0 + i, j);
        return push(std::move(out), [a, r0, n](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            Mat<T>& ga = t.nodes_[a].grad;
            for (int i = 0; i < n; ++i) {
                const T* src = g.row(i);
                T* dst = ga.row(r0 + i);
                for (int j = 0; j < g.cols; ++j) dst[j] += src[j];
            }
        });
    }

    Ix slice_cols(Ix a, int c0, int n) {
        const Mat<T>& A = val(a);
        if (c0 < 0 || n < 0 || c0 + n > A.cols) throw ShapeError("slice_cols range");
        Mat<T> out(A.rows, n);
        for (int i = 0; i < A.rows; ++i) {
            const T* src = A.row(i);
            T* dst = out.row(i);
            for (int j = 0; j < n; ++j) dst[j] = src[c0 + j];
        }
        return push(std::move(out), [a, c0, n](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            Mat<T>& ga = t.nodes_[a].grad;
            for (int i = 0; i < g.rows; ++i) {
                const T* src = g.row(i);
                T* dst = ga.row(i);
                for (int j = 0; j < n; ++j) dst[c0 + j] += src[j];
            }
        });
    }

    Ix concat_rows(const std::vector<Ix>& parts) {
        if (parts.empty()) throw ShapeError("concat_rows of nothing");
        const int cols = val(parts[0]).cols;
        int rows = 0;
        for (Ix p : parts) {
            if (val(p).cols != cols) throw ShapeError("concat_rows column mismatch");
            rows += val(p).rows;
        }
        Mat<T> out(rows, cols);
        int r = 0;
        for (Ix p : parts) {
            const Mat<T>& P = val(p);
            for (int i = 0; i < P.rows; ++i, ++r)
                for (int j = 0; j < cols; ++j) out.at(r, j) = P.at(i, j);
        }
        auto parts_c = parts;
        return push(std::move(out), [parts_c](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            int r = 0;
            for (Ix p : parts_c) {
                Mat<T>& gp = t.nodes_[p].grad;
                for (int i = 0; i < gp.rows; ++i, ++r) {
                    const T* src = g.row(r);
                    T* dst = gp.row(i);
                    for (int j = 0; j < g.cols; ++j) dst[j] += src[j];
                }
            }
        });
    }

    Ix concat_cols(const std::vector<Ix>& parts) {
        if (parts.empty()) throw ShapeError("concat_cols of nothing");
        const int rows = val(parts[0]).rows;
        int cols = 0;
        for (Ix p : parts) {
            if (val(p).rows != rows) throw ShapeError("concat_cols row mismatch");
            cols += val(p).cols;
        }
        Mat<T> out(rows, cols);
        int c = 0;
        for (Ix p : parts) {
            const Mat<T>& P = val(p);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < P.cols; ++j) out.at(i, c + j) = P.at(i, j);
            c += P.cols;
        }
        auto parts_c = parts;
        return push(std::move(out), [parts_c](Tape& t, Ix self) {
            const Mat<T>& g = t.nodes_[self].grad;
            int c = 0;
            for (Ix p : parts_c) {
                Mat<T>& gp = t.nodes_[p].grad;
                for (int i = 0; i < gp.rows; ++i) {
                    const T* src = g.row(i);
                    T* dst = gp.row(i);
                    for (int j = 0; j < gp.cols; ++j) dst[j] += src[c + j];
                }
                c += gp.cols;
            }
        });
    }

    // ---- losses (logits in, scalar out) ----

    Ix cross_entropy_with_logits(Ix logits, int label) {
        const Mat<T>& L = val(logits);
        if (L.rows != 1) throw ShapeError("loss expects a 1×C logit row");
        if (label < 0 || label >= L.cols) throw DomainError("label out of range");
        auto probs = std::make_shared<Mat<T>>(1, L.cols);
        softmax_row(L.row(0), probs->row(0), L.cols);
        const T pt = std::max(probs->v[label], T(1e-15));
        Mat<T> out(1, 1);
        out.v[0] = -std::log(pt);
        return push(std::move(out), [logits, label, probs](Tape& t, Ix self) {
            const T g = t.nodes_[self].grad.v[0];
            Mat<T>& gl = t.nodes_[logits].grad;
            for (int j = 0; j < gl.cols; ++j) {
                const T onehot = (j == label) ? T(1) : T(0);
                gl.v[j] += g * (probs->v[j] - onehot);
            }
        });
    }

    // Focal loss -alpha*(1-p_t)^gamma*log(p_t) on logits. gamma=0, alpha=1
    // reduces to cross entropy.
    Ix focal_with_logits(Ix logits, int label, T gamma, T alpha) {
        if (gamma < T(0)) throw DomainError("focal gamma must be >= 0");
        if (alpha <= T(0) || alpha > T(1)) throw DomainError("focal alpha must be in (0,1]");
        const Mat<T>& L = val(logits);
        if (L.rows != 1) throw ShapeError("loss expects a 1×C logit row");
        if (label < 0 || label >= L.cols) throw DomainError("label out of range");
        auto probs = std::make_shared<Mat<T>>(1, L.cols);
        softmax_row(L.row(0), probs->row(0), L.cols);
        const T pt = std::min(std::max(probs->v[label], T(1e-15)), T(1) - T(1e-12));
        const bool saturated = probs->v[label] >= T(1) - T(1e-12);
        Mat<T> out(1, 1);
        out.v[0] = saturated ? T(0)
                             : -alpha * std::pow(T(1) - pt, gamma) * std::log(pt);
        return push(std::move(out),
                    [logits, label, gamma, alpha, probs, pt, saturated](Tape& t, Ix self) {
            if (saturated) return;
            const T g = t.nodes_[self].grad.v[0];
            // dL/dp_t, then chain through softmax.
            const T one_m = T(1) - pt;
            const T dpow = (gamma == T(0))
                               ? T(0)
                               : gamma * std::pow(one_m, gamma - T(1)) * std::log(pt);
            const T dldp = -alpha * (std::pow(one_m, gamma) / pt - dpow);
            Mat<T>& gl = t.nodes_[logits].grad;
            for (int j = 0; j < gl.cols; ++j) {
                const T onehot = (j == label) ? T(1) : T(0);
                gl.v[j] += g * dldp * pt * (onehot - probs->v[j]);
            }
        });
    }

    // ---- backward ----

    void backward(Ix root) {
        if (nodes_.empty()) throw StateError("backward without a recorded forward pass");
        if (root < 0 || root >= static_cast<Ix>(nodes_.size()))
            throw StateError("backward root is not a tape node");
        if (nodes_[root].val.rows != 1 || nodes_[root].val.cols != 1)
            throw ShapeError("backward root must be a scalar node");
        for (auto& n : nodes_) {
            n.grad = Mat<T>(n.val.rows, n.val.cols);
        }
        nodes_[root].grad.v[0] = T(1);
        for (Ix i = root; i >= 0; --i) {
            if (nodes_[i].back) nodes_[i].back(*this, i);
        }
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Mat<T> val;
        Mat<T> grad;
        std::function<void(Tape&, Ix)> back;
    };

    const Mat<T>& val(Ix i) const { return nodes_[i].val; }

    static void accumulate(Mat<T>& dst, const Mat<T>& src) {
        for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += src.v[i];
    }

    static Mat<T> take_cols(const Mat<T>& a, int c0, int n) {
        Mat<T> out(a.rows, n);
        for (int i = 0; i < a.rows; ++i) {
            const T* src = a.row(i) + c0;
            T* dst = out.row(i);
            for (int j = 0; j < n; ++j) dst[j] = src[j];
        }
        return out;
    }

    static void softmax_row(const T* x, T* y, int n) {
        T mx = x[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, x[j]);
#pragma omp simd
        for (int j = 0; j < n; ++j) y[j] = detail::fast_exp(x[j] - mx);
        T sum = T(0);
        for (int j = 0; j < n; ++j) sum += y[j];
        const T inv = T(1) / sum;
        for (int j = 0; j < n; ++j) y[j] *= inv;
    }

    Ix push(Mat<T> value, std::function<void(Tape&, Ix)> back) {
        nodes_.push_back(Node{std::move(value), Mat<T>(), std::move(back)});
        return static_cast<Ix>(nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
    bool training_ = false;
    Rng* rng_ = nullptr;
};

}  // namespace speechcare::nn
