// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace apollo::oracles {
namespace {

void require_sizes(const SecantProblemInstance& inst) {
  if (inst.s.size() != inst.b_prev.size() || inst.y.size() != inst.b_prev.size())
    throw OracleError("secant instance: b_prev, s, y differ in length");
}

double sum_fourth(const Vec& s) {
  double total = 0.0;
  for (double v : s) total += v * v * v * v;
  return total;
}

// ||a - scale_b * b||_inf relative to the larger of the two norms.
double deviation(const Vec& a, const Vec& b, double scale_b) {
  if (a.size() != b.size()) throw OracleError("trajectory snapshots differ in length");
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double bb = scale_b * b[i];
    // A diverged run never agrees with anything.
    if (!std::isfinite(a[i]) || !std::isfinite(bb)) return std::numeric_limits<double>::infinity();
    diff = std::max(diff, std::fabs(a[i] - bb));
    na = std::max(na, std::fabs(a[i]));
    nb = std::max(nb, std::fabs(bb));
  }
  const double denom = std::max(na, nb);
  return denom > 0.0 ? diff / denom : 0.0;
}

}  // namespace

Vec solve_weak_secant_lagrange(const SecantProblemInstance& inst) {
  require_sizes(inst);
  const std::size_t n = inst.s.size();
  // Stationarity of ||B - b_prev||^2 / 2 - lambda (sum s_i^2 B_i - s^T y)
  // gives B_i = b_prev_i + lambda s_i^2; the constraint fixes lambda.
  double target = 0.0;
  double current = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s2 = inst.s[i] * inst.s[i];
    target += inst.s[i] * inst.y[i];
    current += s2 * inst.b_prev[i];
    weight += s2 * s2;
  }
  if (!(weight > 0.0)) throw OracleError("secant instance infeasible: s is zero");
  const double lambda = (target - current) / weight;
  Vec b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = inst.b_prev[i] + lambda * inst.s[i] * inst.s[i];
  return b;
}

Vec solve_weak_secant_projected(const SecantProblemInstance& inst, double tol,
                                std::size_t max_iters) {
  require_sizes(inst);
  const std::size_t n = inst.s.size();
  Vec a(n);  // constraint normal: s^2
  double aa = 0.0;
  double target = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = inst.s[i] * inst.s[i];
    aa += a[i] * a[i];
    target += inst.s[i] * inst.y[i];
  }
  if (!(aa > 0.0)) throw OracleError("secant instance infeasible: s is zero");

  // Feasible start: move only the coordinate with the largest |s_i|.
  const std::size_t k = static_cast<std::size_t>(
      std::max_element(a.begin(), a.end()) - a.begin());
  Vec b = inst.b_prev;
  double residual = target;
  for (std::size_t i = 0; i < n; ++i) residual -= a[i] * b[i];
  b[k] += residual / a[k];

  const double step = 0.25;
  for (std::size_t it = 0; it < max_iters; ++it) {
    // Objective gradient (b - b_prev), projected onto a^perp.
    Vec g(n);
    double ag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = b[i] - inst.b_prev[i];
      ag += a[i] * g[i];
    }
    double moved = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pg = g[i] - (ag / aa) * a[i];
      b[i] -= step * pg;
      moved = std::max(moved, std::fabs(step * pg));
      size = std::max(size, std::fabs(b[i]));
    }
    // Re-project to remove drift off the hyperplane.
    double r = target;
    for (std::size_t i = 0; i < n; ++i) r -= a[i] * b[i];
    for (std::size_t i = 0; i < n; ++i) b[i] += (r / aa) * a[i];
    if (moved <= tol * std::max(size, 1.0)) break;
  }
  return b;
}

Vec weak_secant_update(const SecantProblemInstance& inst) {
  require_sizes(inst);
  const std::size_t n = inst.s.size();
  double sy = 0.0;
  double sbs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sy += inst.s[i] * inst.y[i];
    sbs += inst.s[i] * inst.b_prev[i] * inst.s[i];
  }
  const double p4 = sum_fourth(inst.s);
  if (!(p4 > 0.0)) throw OracleError("secant instance infeasible: s is zero");
  Vec b(n);
  for (std::size_t i = 0; i < n; ++i)
    b[i] = inst.b_prev[i] + (sy - sbs) / p4 * (inst.s[i] * inst.s[i]);
  return b;
}

Vec corrected_secant_update(const Vec& b_prev, const Vec& d, const Vec& y) {
  if (d.size() != b_prev.size() || y.size() != b_prev.size())
    throw OracleError("corrected update: length mismatch");
  double dy = 0.0;
  double dbd = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    dy += d[i] * y[i];
    dbd += d[i] * b_prev[i] * d[i];
  }
  const double p4 = sum_fourth(d);
  if (!(p4 > 0.0)) throw OracleError("corrected update: d is zero");
  Vec b(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) b[i] = b_prev[i] - (dy + dbd) / p4 * (d[i] * d[i]);
  return b;
}

Vec ema_direct(const std::vector<Vec>& gradients, double beta) {
  if (gradients.empty()) throw OracleError("ema_direct needs at least one gradient");
  const std::size_t t = gradients.size();
  const std::size_t n = gradients.front().size();
  Vec m(n, 0.0);
  for (std::size_t i = 1; i <= t; ++i) {
    if (gradients[i - 1].size() != n) throw OracleError("ema_direct: ragged gradients");
    const double w = std::pow(beta, static_cast<double>(t - i)) * (1.0 - beta);
    for (std::size_t j = 0; j < n; ++j) m[j] += w * gradients[i - 1][j];
  }
  const double norm = 1.0 - std::pow(beta, static_cast<double>(t));
  for (double& v : m) v /= norm;
  return m;
}

std::vector<Tensor> finite_diff_grad(const Objective& objective,
                                     const std::vector<Tensor>& params, double h) {
  if (!(h > 0.0)) throw OracleError("finite_diff_grad: h must be positive");
  std::vector<Tensor> probe = params;
  std::vector<Tensor> grads;
  for (const Tensor& p : params) grads.push_back(Tensor::zeros_like(p));
  for (std::size_t g = 0; g < probe.size(); ++g) {
    for (std::size_t i = 0; i < probe[g].size(); ++i) {
      const double x = probe[g][i];
      probe[g][i] = x + h;
      const double up = objective.eval(probe);
      probe[g][i] = x - h;
      const double down = objective.eval(probe);
      probe[g][i] = x;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw OracleError("finite_diff_grad: non-finite evaluation at group " +
                          std::to_string(g) + ", coordinate " + std::to_string(i));
      grads[g][i] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

double max_relative_error(const std::vector<Tensor>& a, const std::vector<Tensor>& b,
                          double floor) {
  if (a.size() != b.size()) throw OracleError("max_relative_error: group count mismatch");
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    if (a[g].size() != b[g].size()) throw OracleError("max_relative_error: size mismatch");
    for (std::size_t i = 0; i < a[g].size(); ++i) {
      diff = std::max(diff, std::fabs(a[g][i] - b[g][i]));
      scale = std::max(scale, std::fabs(b[g][i]));
    }
  }
  return diff / std::max(scale, floor);
}

TrajectoryReport compare_trajectories(const Trajectory& a, const Trajectory& b, double tol,
                                      double scale) {
  if (a.steps.size() != b.steps.size())
    throw OracleError("compare_trajectories: runs have " + std::to_string(a.steps.size()) +
                      " and " + std::to_string(b.steps.size()) + " steps");
  TrajectoryReport rep;
  rep.states_checked = !a.steps.empty();
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    const TrajectoryStep& x = a.steps[t];
    const TrajectoryStep& y = b.steps[t];
    if (x.theta.size() != y.theta.size())
      throw OracleError("compare_trajectories: parameter layouts differ");
    const double dev = deviation(y.theta, x.theta, 1.0);
    rep.theta_deviation.push_back(dev);
    rep.max_theta_deviation = std::max(rep.max_theta_deviation, dev);
    if (dev > tol && rep.first_exceeding_step == kNoStep) rep.first_exceeding_step = t;

    const bool has_state = !x.m.empty() && !y.m.empty();
    rep.states_checked = rep.states_checked && has_state;
    if (has_state) {
      rep.max_m_deviation = std::max(rep.max_m_deviation, deviation(y.m, x.m, 1.0));
      rep.max_d_deviation = std::max(rep.max_d_deviation, deviation(y.d, x.d, 1.0 / scale));
      rep.max_b_deviation = std::max(rep.max_b_deviation, deviation(y.b, x.b, scale));
    }
  }
  rep.passed = rep.max_theta_deviation <= tol &&
               (!rep.states_checked ||
                (rep.max_m_deviation <= tol && rep.max_d_deviation <= tol &&
                 rep.max_b_deviation <= tol));
  return rep;
}

}  // namespace apollo::oracles
