#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "zpcc/nn/matrix.hpp"

namespace zpcc::nn {

inline constexpr int kKernelOffsets = 27;

// Kernel offsets (dx,dy,dz) in {-1,0,1}^3 are enumerated lexicographically,
// dz fastest: index = (dx+1)*9 + (dy+1)*3 + (dz+1). The center is index 13.
inline constexpr int kKernelCenter = 13;

// --- embeddings ------------------------------------------------------------

template <class R>
void embed_fwd(std::span<const uint8_t> idx, const R* table, std::size_t dim,
               Matrix<R>& out) {
  out = Matrix<R>(idx.size(), dim);
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const R* src = table + std::size_t(idx[n]) * dim;
    R* dst = out.row(n);
    for (std::size_t d = 0; d < dim; ++d) dst[d] = src[d];
  }
}

template <class R>
void embed_bwd(std::span<const uint8_t> idx, const Matrix<R>& dy, R* dtable) {
  for (std::size_t n = 0; n < idx.size(); ++n) {
    R* dst = dtable + std::size_t(idx[n]) * dy.cols;
    const R* src = dy.row(n);
    for (std::size_t d = 0; d < dy.cols; ++d) dst[d] += src[d];
  }
}

// x[n] += table[idx[n]] (occupancy context embedding).
template <class R>
void embed_add(std::span<const uint8_t> idx, const R* table, Matrix<R>& x) {
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const R* src = table + std::size_t(idx[n]) * x.cols;
    R* dst = x.row(n);
    for (std::size_t d = 0; d < x.cols; ++d) dst[d] += src[d];
  }
}

// --- channel-wise gated fusion ---------------------------------------------

// Per channel d the two gate entries (gate[d], gate[dim+d]) are softmaxed
// into weights (wc, wp); out = wc*f_cur + wp*f_prop.
template <class R>
void fuse_fwd(const Matrix<R>& f_cur, const Matrix<R>& f_prop, const R* gate,
              Matrix<R>& out) {
  if (f_cur.rows != f_prop.rows || f_cur.cols != f_prop.cols)
    throw std::invalid_argument("gated_fuse: shape mismatch");
  const std::size_t dim = f_cur.cols;
  out = Matrix<R>(f_cur.rows, dim);
  std::vector<R> wc(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const R a = gate[d], b = gate[dim + d];
    const R m = a > b ? a : b;
    const R ea = std::exp(a - m), eb = std::exp(b - m);
    wc[d] = ea / (ea + eb);
  }
  for (std::size_t n = 0; n < f_cur.rows; ++n) {
    const R* xc = f_cur.row(n);
    const R* xp = f_prop.row(n);
    R* y = out.row(n);
    for (std::size_t d = 0; d < dim; ++d)
      y[d] = wc[d] * xc[d] + (R(1) - wc[d]) * xp[d];
  }
}

template <class R>
void fuse_bwd(const Matrix<R>& dy, const Matrix<R>& f_cur, const Matrix<R>& f_prop,
              const R* gate, Matrix<R>& d_cur, Matrix<R>& d_prop, R* d_gate) {
  const std::size_t dim = f_cur.cols;
  d_cur = Matrix<R>(f_cur.rows, dim);
  d_prop = Matrix<R>(f_cur.rows, dim);
  std::vector<R> wc(dim), sc(dim, R(0)), sp(dim, R(0));
  for (std::size_t d = 0; d < dim; ++d) {
    const R a = gate[d], b = gate[dim + d];
    const R m = a > b ? a : b;
    const R ea = std::exp(a - m), eb = std::exp(b - m);
    wc[d] = ea / (ea + eb);
  }
  for (std::size_t n = 0; n < dy.rows; ++n) {
    const R* g = dy.row(n);
    const R* xc = f_cur.row(n);
    const R* xp = f_prop.row(n);
    R* dc = d_cur.row(n);
    R* dp = d_prop.row(n);
    for (std::size_t d = 0; d < dim; ++d) {
      dc[d] = wc[d] * g[d];
      dp[d] = (R(1) - wc[d]) * g[d];
      sc[d] += g[d] * xc[d];
      sp[d] += g[d] * xp[d];
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const R j = wc[d] * (R(1) - wc[d]) * (sc[d] - sp[d]);
    d_gate[d] += j;
    d_gate[dim + d] -= j;
  }
}

// --- dense -----------------------------------------------------------------

// y = x @ W + b with W stored [in][out].
template <class R>
void dense_fwd(const Matrix<R>& x, const R* W, const R* b, std::size_t out_dim,
               Matrix<R>& y) {
  y = Matrix<R>(x.rows, out_dim);
  for (std::size_t n = 0; n < x.rows; ++n) {
    const R* xr = x.row(n);
    R* yr = y.row(n);
    for (std::size_t o = 0; o < out_dim; ++o) yr[o] = b[o];
    for (std::size_t i = 0; i < x.cols; ++i) {
      const R v = xr[i];
      const R* w = W + i * out_dim;
      for (std::size_t o = 0; o < out_dim; ++o) yr[o] += v * w[o];
    }
  }
}

template <class R>
void dense_bwd(const Matrix<R>& dy, const Matrix<R>& x, const R* W,
               std::size_t out_dim, Matrix<R>& dx, R* dW, R* db) {
  dx = Matrix<R>(x.rows, x.cols);
  for (std::size_t n = 0; n < x.rows; ++n) {
    const R* g = dy.row(n);
    const R* xr = x.row(n);
    R* dxr = dx.row(n);
    for (std::size_t o = 0; o < out_dim; ++o) db[o] += g[o];
    for (std::size_t i = 0; i < x.cols; ++i) {
      const R* w = W + i * out_dim;
      R* dw = dW + i * out_dim;
      R acc = R(0);
      for (std::size_t o = 0; o < out_dim; ++o) {
        acc += w[o] * g[o];
        dw[o] += xr[i] * g[o];
      }
      dxr[i] = acc;
    }
  }
}

// --- relu --------------------------------------------------------------

template <class R>
void relu_inplace(Matrix<R>& x) {
  for (R& v : x.a)
    if (v < R(0)) v = R(0);
}

// dx = dy where pre-activation > 0.
template <class R>
void relu_bwd_inplace(Matrix<R>& dy, const Matrix<R>& pre) {
  for (std::size_t i = 0; i < dy.a.size(); ++i)
    if (pre.a[i] <= R(0)) dy.a[i] = R(0);
}

// --- submanifold sparse convolution ------------------------------------

// nbr holds rows*27 point indices (-1 for absent neighbors), offset-major
// within each row. W is [offset][in][out], 27*dim*dim values; out sites equal
// input sites. Accumulation per output row follows ascending offset index.
template <class R>
void sconv_fwd(const Matrix<R>& x, std::span<const int32_t> nbr, const R* W,
               const R* bias, Matrix<R>& y) {
  const std::size_t dim = x.cols;
  y = Matrix<R>(x.rows, dim);
  for (std::size_t n = 0; n < x.rows; ++n) {
    R* yr = y.row(n);
    for (std::size_t d = 0; d < dim; ++d) yr[d] = bias[d];
    const int32_t* row_nbr = nbr.data() + n * kKernelOffsets;
    for (int o = 0; o < kKernelOffsets; ++o) {
      const int32_t j = row_nbr[o];
      if (j < 0) continue;
      const R* xj = x.row(static_cast<std::size_t>(j));
      const R* Wo = W + std::size_t(o) * dim * dim;
      for (std::size_t i = 0; i < dim; ++i) {
        const R v = xj[i];
        if (v == R(0)) continue;
        const R* w = Wo + i * dim;
        for (std::size_t d = 0; d < dim; ++d) yr[d] += v * w[d];
      }
    }
  }
}

template <class R>
void sconv_bwd(const Matrix<R>& dy, const Matrix<R>& x, std::span<const int32_t> nbr,
               const R* W, Matrix<R>& dx, R* dW, R* dbias) {
  const std::size_t dim = x.cols;
  dx = Matrix<R>(x.rows, dim);
  for (std::size_t n = 0; n < x.rows; ++n) {
    const R* g = dy.row(n);
    for (std::size_t d = 0; d < dim; ++d) dbias[d] += g[d];
    const int32_t* row_nbr = nbr.data() + n * kKernelOffsets;
    for (int o = 0; o < kKernelOffsets; ++o) {
      const int32_t j = row_nbr[o];
      if (j < 0) continue;
      const R* xj = x.row(static_cast<std::size_t>(j));
      R* dxj = dx.row(static_cast<std::size_t>(j));
      const R* Wo = W + std::size_t(o) * dim * dim;
      R* dWo = dW + std::size_t(o) * dim * dim;
      for (std::size_t i = 0; i < dim; ++i) {
        const R* w = Wo + i * dim;
        R* dw = dWo + i * dim;
        R acc = R(0);
        const R xv = xj[i];
        for (std::size_t d = 0; d < dim; ++d) {
          acc += w[d] * g[d];
          dw[d] += xv * g[d];
        }
        dxj[i] += acc;
      }
    }
  }
}

// --- softmax / cross-entropy ---------------------------------------------

template <class R>
void softmax_rows(Matrix<R>& x) {
  for (std::size_t n = 0; n < x.rows; ++n) {
    R* r = x.row(n);
    R m = r[0];
    for (std::size_t d = 1; d < x.cols; ++d) m = r[d] > m ? r[d] : m;
    R sum = R(0);
    for (std::size_t d = 0; d < x.cols; ++d) {
      r[d] = std::exp(r[d] - m);
      sum += r[d];
    }
    for (std::size_t d = 0; d < x.cols; ++d) r[d] /= sum;
  }
}

// Code-length loss in bits, sum over rows of -log2 p[target]. dlogits is the
// gradient w.r.t. the pre-softmax logits.
template <class R>
double xent_bits(const Matrix<R>& probs, std::span<const uint8_t> targets,
                 Matrix<R>* dlogits) {
  const R inv_ln2 = R(1) / R(M_LN2);
  double loss = 0.0;
  if (dlogits) *dlogits = Matrix<R>(probs.rows, probs.cols);
  for (std::size_t n = 0; n < probs.rows; ++n) {
    const R* p = probs.row(n);
    const uint8_t t = targets[n];
    loss -= std::log2(static_cast<double>(p[t]));
    if (dlogits) {
      R* g = dlogits->row(n);
      for (std::size_t d = 0; d < probs.cols; ++d) g[d] = p[d] * inv_ln2;
      g[t] -= inv_ln2;
    }
  }
  return loss;
}

}  // namespace zpcc::nn
