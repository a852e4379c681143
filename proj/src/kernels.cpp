// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace apollo::kernels {
namespace {

using Index = std::ptrdiff_t;

inline double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::kAdd: return a + b;
    case BinaryOp::kSub: return a - b;
    case BinaryOp::kMul: return a * b;
    case BinaryOp::kDiv: return a / b;
    case BinaryOp::kMax: return std::max(a, b);
  }
  return a;
}

inline double apply(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::kAbs: return std::abs(a);
    case UnaryOp::kSquare: return a * a;
    case UnaryOp::kNeg: return -a;
  }
  return a;
}

inline bool big(std::size_t n) { return n >= kParallelThreshold; }

// Sums term(i) per fixed block, then folds the partials in block order.
template <std::size_t K, class Term>
std::array<double, K> blocked_sum(std::size_t n, Term term) {
  std::array<double, K> total{};
  if (n <= kReductionBlock) {
    for (std::size_t i = 0; i < n; ++i) term(i, total);
    return total;
  }
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::array<double, K>> partial(blocks);
#pragma omp parallel for schedule(static) if (big(n))
  for (Index b = 0; b < static_cast<Index>(blocks); ++b) {
    std::array<double, K> acc{};
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    for (std::size_t i = lo; i < hi; ++i) term(i, acc);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
  return total;
}

}  // namespace

void binary(BinaryOp op, std::span<const double> a, std::span<const double> b,
            std::span<double> out) {
  const std::size_t n = out.size();
#pragma omp parallel for schedule(static) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) out[i] = apply(op, a[i], b[i]);
}

void binary_scalar(BinaryOp op, std::span<const double> a, double b,
                   std::span<double> out) {
  const std::size_t n = out.size();
#pragma omp parallel for schedule(static) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) out[i] = apply(op, a[i], b);
}

void unary(UnaryOp op, std::span<const double> a, std::span<double> out) {
  const std::size_t n = out.size();
#pragma omp parallel for schedule(static) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) out[i] = apply(op, a[i]);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = y.size();
#pragma omp parallel for schedule(static) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) y[i] += alpha * x[i];
}

void scale(double factor, std::span<double> x) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) x[i] *= factor;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum<1>(a.size(), [&](std::size_t i, auto& acc) {
    acc[0] += a[i] * b[i];
  })[0];
}

double sum_pow4(std::span<const double> a) {
  return blocked_sum<1>(a.size(), [&](std::size_t i, auto& acc) {
    const double sq = a[i] * a[i];
    acc[0] += sq * sq;
  })[0];
}

double max_abs(std::span<const double> a) {
  const std::size_t n = a.size();
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) best = std::max(best, std::abs(a[i]));
  return best;
}

std::size_t count_zeros(std::span<const double> a) {
  const std::size_t n = a.size();
  std::size_t zeros = 0;
#pragma omp parallel for schedule(static) reduction(+ : zeros) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) zeros += (a[i] == 0.0) ? 1 : 0;
  return zeros;
}

bool all_finite(std::span<const double> a) {
  const std::size_t n = a.size();
  std::size_t bad = 0;
#pragma omp parallel for schedule(static) reduction(+ : bad) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) bad += std::isfinite(a[i]) ? 0 : 1;
  return bad == 0;
}

MomentSums apollo_moment(std::span<double> m, std::span<const double> g,
                         std::span<const double> theta, std::span<const double> d,
                         std::span<const double> hess, double take, double l2) {
  const auto sums = blocked_sum<2>(m.size(), [&](std::size_t i, auto& acc) {
    const double grad = l2 != 0.0 ? g[i] + l2 * theta[i] : g[i];
    const double diff = take * (grad - m[i]);
    const double di = d[i];
    acc[0] += di * diff + di * hess[i] * di;
    const double sq = di * di;
    acc[1] += sq * sq;
    m[i] += diff;
  });
  return {sums[0], sums[1]};
}

void apollo_direction(std::span<double> hess, std::span<double> d,
                      std::span<double> theta, std::span<const double> m,
                      const DirectionParams& p) {
  const std::size_t n = theta.size();
#pragma omp parallel for schedule(static) if (big(n))
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    const double b = hess[i] - p.alpha * d[i] * d[i];
    hess[i] = b;
    const double dir = m[i] / std::max(std::abs(b), p.sigma);
    d[i] = dir;
    const double before = theta[i];
    theta[i] = before - p.lr * dir - p.decoupled_decay * before;
  }
}

void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::size_t rows,
                    std::size_t in, std::size_t out_dim, std::span<double> out) {
#pragma omp parallel for schedule(static) if (big(rows * in * out_dim))
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const double* xr = x.data() + static_cast<std::size_t>(r) * in;
    double* orow = out.data() + static_cast<std::size_t>(r) * out_dim;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double* wo = w.data() + o * in;
      double acc = bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wo[i];
      orow[o] = acc;
    }
  }
}

void affine_weight_grad(std::span<const double> delta, std::span<const double> x,
                        std::size_t rows, std::size_t in, std::size_t out_dim,
                        double scale, std::span<double> dw, std::span<double> db) {
#pragma omp parallel for schedule(static) if (big(rows * in * out_dim))
  for (Index o = 0; o < static_cast<Index>(out_dim); ++o) {
    const std::size_t oo = static_cast<std::size_t>(o);
    double* dwo = dw.data() + oo * in;
    std::fill(dwo, dwo + in, 0.0);
    double bias_acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double dr = delta[r * out_dim + oo];
      const double* xr = x.data() + r * in;
      for (std::size_t i = 0; i < in; ++i) dwo[i] += dr * xr[i];
      bias_acc += dr;
    }
    for (std::size_t i = 0; i < in; ++i) dwo[i] *= scale;
    db[oo] = bias_acc * scale;
  }
}

void affine_input_grad(std::span<const double> delta, std::span<const double> w,
                       std::size_t rows, std::size_t in, std::size_t out_dim,
                       std::span<double> dx) {
#pragma omp parallel for schedule(static) if (big(rows * in * out_dim))
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t rr = static_cast<std::size_t>(r);
    double* dxr = dx.data() + rr * in;
    std::fill(dxr, dxr + in, 0.0);
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double dr = delta[rr * out_dim + o];
      const double* wo = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) dxr[i] += dr * wo[i];
    }
  }
}

// Serial twins. Plain loops, no blocking.
namespace reference {

void binary(BinaryOp op, std::span<const double> a, std::span<const double> b,
            std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply(op, a[i], b[i]);
}

void binary_scalar(BinaryOp op, std::span<const double> a, double b,
                   std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply(op, a[i], b);
}

void unary(UnaryOp op, std::span<const double> a, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply(op, a[i]);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(double factor, std::span<double> x) {
  for (double& v : x) v *= factor;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum_pow4(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += (v * v) * (v * v);
  return s;
}

double max_abs(std::span<const double> a) {
  double best = 0.0;
  for (double v : a) best = std::max(best, std::abs(v));
  return best;
}

std::size_t count_zeros(std::span<const double> a) {
  return static_cast<std::size_t>(std::count(a.begin(), a.end(), 0.0));
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

MomentSums apollo_moment(std::span<double> m, std::span<const double> g,
                         std::span<const double> theta, std::span<const double> d,
                         std::span<const double> hess, double take, double l2) {
  MomentSums sums;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double grad = l2 != 0.0 ? g[i] + l2 * theta[i] : g[i];
    const double diff = take * (grad - m[i]);
    sums.secant += d[i] * diff + d[i] * hess[i] * d[i];
    sums.pow4 += (d[i] * d[i]) * (d[i] * d[i]);
    m[i] += diff;
  }
  return sums;
}

void apollo_direction(std::span<double> hess, std::span<double> d,
                      std::span<double> theta, std::span<const double> m,
                      const DirectionParams& p) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    hess[i] -= p.alpha * d[i] * d[i];
    d[i] = m[i] / std::max(std::abs(hess[i]), p.sigma);
    theta[i] = theta[i] - p.lr * d[i] - p.decoupled_decay * theta[i];
  }
}

void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::size_t rows,
                    std::size_t in, std::size_t out_dim, std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out_dim; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += x[r * in + i] * w[o * in + i];
      out[r * out_dim + o] = acc;
    }
}

void affine_weight_grad(std::span<const double> delta, std::span<const double> x,
                        std::size_t rows, std::size_t in, std::size_t out_dim,
                        double scale, std::span<double> dw, std::span<double> db) {
  std::fill(dw.begin(), dw.end(), 0.0);
  std::fill(db.begin(), db.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double dr = delta[r * out_dim + o];
      for (std::size_t i = 0; i < in; ++i) dw[o * in + i] += dr * x[r * in + i];
      db[o] += dr;
    }
  for (double& v : dw) v *= scale;
  for (double& v : db) v *= scale;
}

void affine_input_grad(std::span<const double> delta, std::span<const double> w,
                       std::size_t rows, std::size_t in, std::size_t out_dim,
                       std::span<double> dx) {
  std::fill(dx.begin(), dx.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out_dim; ++o)
      for (std::size_t i = 0; i < in; ++i)
        dx[r * in + i] += delta[r * out_dim + o] * w[o * in + i];
}

}  // namespace reference

}  // namespace apollo::kernels
