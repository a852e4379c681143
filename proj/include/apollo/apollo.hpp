// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Apollo: a diagonal quasi-Newton method for stochastic nonconvex problems.
//
// Per parameter group, one step does
//
//   m_{t+1} = [beta (1 - beta^t) m_t + (1 - beta) g_{t+1}] / (1 - beta^{t+1})
//   alpha   = [d_t^T (m_{t+1} - m_t) + d_t^T B_t d_t] / (||d_t||_4 + eps)^4
//   B_{t+1} = B_t - alpha Diag(d_t^2)
//   D_{t+1} = max(|B_{t+1}|, sigma)
//   d_{t+1} = m_{t+1} / D_{t+1}
//   theta   = theta - lr d_{t+1}
//
// With eps = 0 the update makes B_{t+1} satisfy the weak secant condition
// d_t^T B_{t+1} d_t = -d_t^T (m_{t+1} - m_t) exactly, and the group's state
// starts at m = d = B = 0.
//
// Only the ratio lr / sigma affects the parameter trajectory: scaling both by
// c scales B by c and d by 1/c and leaves m and theta unchanged. sigma is
// therefore kept at 1 and only the stepsize is tuned.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "apollo/optimizer.hpp"
#include "apollo/tensor.hpp"

namespace apollo {

struct ApolloConfig {
  double eta = 0.5;     // base stepsize; schedules scale this
  double sigma = 1.0;   // convexity floor of the rectified curvature
  double beta = 0.9;    // moving-average decay
  double eps = 1e-4;    // added to ||d||_4 before the fourth power
  double weight_decay = 0.0;
  WeightDecayMode weight_decay_mode = WeightDecayMode::kCoupled;
};

/// Throws ConfigError unless 0 < beta < 1 and eta, sigma, eps > 0 and
/// weight_decay >= 0.
void validate(const ApolloConfig& cfg);

struct ApolloState {
  explicit ApolloState(const Shape& shape) : m(shape), d(shape), hess(shape) {}

  Tensor m;     // bias-corrected moving average of gradients
  Tensor d;     // last update direction
  Tensor hess;  // diagonal of the curvature estimate B; may go negative
  std::uint64_t step = 0;
};

/// Bias-corrected moving average. `t` is the number of gradients already
/// folded into `m`; t = 0 returns `g_next` exactly.
Tensor ema_update(const Tensor& m, const Tensor& g_next, double beta, std::uint64_t t);

/// Coefficient of the diagonal update. `y` is m_{t+1} - m_t. The denominator
/// is (||d||_4 + eps)^4; d = 0 gives 0, including for eps = 0.
double compute_alpha(const Tensor& d, const Tensor& y, const Tensor& hess, double eps);

/// B - alpha * d^2.
Tensor update_diagonal(const Tensor& hess, double alpha, const Tensor& d);

/// max(|B|, sigma), elementwise.
Tensor rectify(const Tensor& hess, double sigma);

/// One Apollo update of a single group at effective stepsize `lr`.
///
/// Unlike `validate`, eps = 0 is accepted here: it selects the exact
/// weak-secant denominator used by verification code. Throws NonFiniteError
/// (carrying the index of the attempted step) if `g` holds NaN/Inf, before
/// touching `theta` or `state`.
void apollo_step(Tensor& theta, const Tensor& g, ApolloState& state, const ApolloConfig& cfg,
                 double lr);

/// apollo_step on every group with its own state. Each group gets its own
/// alpha; nothing is pooled across groups, so group order is irrelevant.
void apply_per_group(std::span<Tensor> params, std::span<const Tensor> grads,
                     std::span<ApolloState> states, const ApolloConfig& cfg, double lr);

class ApolloOptimizer final : public Optimizer {
 public:
  ApolloOptimizer(std::vector<Shape> layout, ApolloConfig cfg);

  std::string name() const override { return "apollo"; }
  const ApolloConfig& config() const noexcept { return cfg_; }
  const std::vector<ApolloState>& states() const noexcept { return states_; }

 protected:
  void update(std::span<Tensor> params, std::span<const Tensor> grads, double lr) override;
  void save_payload(CheckpointWriter& w) const override;
  void load_payload(CheckpointReader& r) override;

 private:
  ApolloConfig cfg_;
  std::vector<ApolloState> states_;
};

}  // namespace apollo
