// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Flat-array compute kernels.
//
// Every kernel in `apollo::kernels` has a serial twin in
// `apollo::kernels::reference` with the same signature. The OpenMP versions
// split work into fixed-size blocks whose layout does not depend on the thread
// count, so reductions produce the same bits on 1 or 64 threads. For inputs of
// at most kReductionBlock elements the two versions agree bitwise.

#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace apollo::kernels {

/// Below this many elements kernels stay on the calling thread.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;
/// Reduction partials are formed over blocks of this many elements.
inline constexpr std::size_t kReductionBlock = 4096;

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kMax };
enum class UnaryOp { kAbs, kSquare, kNeg };

/// Sums produced by the first Apollo pass over a parameter group.
struct MomentSums {
  double secant = 0.0;  // d^T (m_new - m_old) + d^T B d
  double pow4 = 0.0;    // sum d_i^4
};

/// Scalars consumed by the second Apollo pass.
struct DirectionParams {
  double alpha = 0.0;
  double sigma = 1.0;
  double lr = 0.0;
  double decoupled_decay = 0.0;  // lr * gamma, or 0
};

// Elementwise. `out` may alias `a` (and `b`).
void binary(BinaryOp op, std::span<const double> a, std::span<const double> b,
            std::span<double> out);
void binary_scalar(BinaryOp op, std::span<const double> a, double b,
                   std::span<double> out);
void unary(UnaryOp op, std::span<const double> a, std::span<double> out);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double factor, std::span<double> x);

// Reductions.
double dot(std::span<const double> a, std::span<const double> b);
double sum_pow4(std::span<const double> a);
double max_abs(std::span<const double> a);
std::size_t count_zeros(std::span<const double> a);
bool all_finite(std::span<const double> a);

/// First fused Apollo pass. Overwrites `m` with the bias-corrected moving
/// average of the (optionally L2-coupled) gradient and returns the secant and
/// fourth-power sums over the previous direction `d`.
///   g_eff = g + l2 * theta
///   m_new = m + take * (g_eff - m)
MomentSums apollo_moment(std::span<double> m, std::span<const double> g,
                         std::span<const double> theta, std::span<const double> d,
                         std::span<const double> hess, double take, double l2);

/// Second fused Apollo pass: B -= alpha d^2, D = max(|B|, sigma), d = m / D,
/// theta -= lr d + decoupled_decay * theta.
void apollo_direction(std::span<double> hess, std::span<double> d,
                      std::span<double> theta, std::span<const double> m,
                      const DirectionParams& p);

// Dense row-major kernels used by the MLP.
/// out[n, o] = sum_i x[n, i] w[o, i] + bias[o]
void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::size_t rows,
                    std::size_t in, std::size_t out_dim, std::span<double> out);
/// dw[o, i] = scale * sum_n delta[n, o] x[n, i]; db[o] = scale * sum_n delta[n, o]
void affine_weight_grad(std::span<const double> delta, std::span<const double> x,
                        std::size_t rows, std::size_t in, std::size_t out_dim,
                        double scale, std::span<double> dw, std::span<double> db);
/// dx[n, i] = sum_o delta[n, o] w[o, i]
void affine_input_grad(std::span<const double> delta, std::span<const double> w,
                       std::size_t rows, std::size_t in, std::size_t out_dim,
                       std::span<double> dx);

namespace reference {

void binary(BinaryOp op, std::span<const double> a, std::span<const double> b,
            std::span<double> out);
void binary_scalar(BinaryOp op, std::span<const double> a, double b,
                   std::span<double> out);
void unary(UnaryOp op, std::span<const double> a, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double factor, std::span<double> x);

double dot(std::span<const double> a, std::span<const double> b);
double sum_pow4(std::span<const double> a);
double max_abs(std::span<const double> a);
std::size_t count_zeros(std::span<const double> a);
bool all_finite(std::span<const double> a);

MomentSums apollo_moment(std::span<double> m, std::span<const double> g,
                         std::span<const double> theta, std::span<const double> d,
                         std::span<const double> hess, double take, double l2);
void apollo_direction(std::span<double> hess, std::span<double> d,
                      std::span<double> theta, std::span<const double> m,
                      const DirectionParams& p);

void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::size_t rows,
                    std::size_t in, std::size_t out_dim, std::span<double> out);
void affine_weight_grad(std::span<const double> delta, std::span<const double> x,
                        std::size_t rows, std::size_t in, std::size_t out_dim,
                        double scale, std::span<double> dw, std::span<double> db);
void affine_input_grad(std::span<const double> delta, std::span<const double> w,
                       std::size_t rows, std::size_t in, std::size_t out_dim,
                       std::span<double> dx);

}  // namespace reference

}  // namespace apollo::kernels
