// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force references used to certify the closed-form optimizer math.
// Nothing here calls the tensor arithmetic or the optimizer update paths;
// tensors are only read and written element by element.

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "apollo/error.hpp"
#include "apollo/objectives.hpp"
#include "apollo/tensor.hpp"

namespace apollo::oracles {

using Vec = std::vector<double>;

/// Infeasible instance, non-finite evaluation, or mismatched inputs.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// min ||B - b_prev||_F over diagonal B subject to s^T B s = s^T y.
struct SecantProblemInstance {
  Vec b_prev;
  Vec s;
  Vec y;
};

/// Lagrange closed form B = b_prev + c s^2 / sum s^4 with
/// c = s^T y - s^T b_prev s. Throws OracleError if s = 0.
Vec solve_weak_secant_lagrange(const SecantProblemInstance& inst);

/// The same problem solved numerically: start from a feasible point away
/// from the answer and run projected gradient descent on the constraint
/// hyperplane until the step falls below `tol`.
Vec solve_weak_secant_projected(const SecantProblemInstance& inst, double tol = 1e-15,
                                std::size_t max_iters = 100000);

/// The literal closed-form update B + (s^T y - s^T B s) / ||s||_4^4 Diag(s^2).
Vec weak_secant_update(const SecantProblemInstance& inst);

/// Direction form: B - (d^T y + d^T B d) / ||d||_4^4 Diag(d^2).
Vec corrected_secant_update(const Vec& b_prev, const Vec& d, const Vec& y);

/// m_t = sum_i beta^{t-i} (1 - beta) g_i / (1 - beta^t), summed directly.
Vec ema_direct(const std::vector<Vec>& gradients, double beta);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h of
/// objective.eval, one tensor per group. Throws OracleError naming the
/// group and coordinate if an evaluation is not finite.
std::vector<Tensor> finite_diff_grad(const Objective& objective,
                                     const std::vector<Tensor>& params, double h);

/// Relative error used by gradient checks:
/// max_i |a_i - b_i| / max(max_i |b_i|, floor).
double max_relative_error(const std::vector<Tensor>& a, const std::vector<Tensor>& b,
                          double floor = 1e-8);

/// Snapshot of one Apollo step, all groups concatenated.
struct TrajectoryStep {
  Vec theta;
  Vec m;
  Vec d;
  Vec b;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
};

inline constexpr std::size_t kNoStep = std::numeric_limits<std::size_t>::max();

struct TrajectoryReport {
  std::vector<double> theta_deviation;  // per step
  double max_theta_deviation = 0.0;
  double max_m_deviation = 0.0;
  double max_d_deviation = 0.0;
  double max_b_deviation = 0.0;
  std::size_t first_exceeding_step = kNoStep;  // first theta deviation > tol
  bool states_checked = false;
  bool passed = false;
};

/// Compares two runs step by step. Deviations are
/// ||a - b||_inf / max(||a||_inf, ||b||_inf). If both runs carry state
/// snapshots, B'/scale, d' * scale and m' are compared with B, d, m; this is
/// the scaling left by multiplying stepsize and sigma by `scale`. Passes iff
/// every deviation is <= tol. Throws OracleError on mismatched layouts.
TrajectoryReport compare_trajectories(const Trajectory& a, const Trajectory& b, double tol,
                                      double scale = 1.0);

}  // namespace apollo::oracles
