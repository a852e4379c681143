// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/apollo.hpp"

#include <cmath>
#include <exception>
#include <utility>

#include "apollo/checkpoint.hpp"
#include "apollo/error.hpp"

namespace apollo {
namespace {

void check_step_config(const ApolloConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw ConfigError("apollo: beta must be in (0, 1)");
  if (!(cfg.sigma > 0.0)) throw ConfigError("apollo: sigma must be positive");
  if (!(cfg.eps >= 0.0)) throw ConfigError("apollo: eps must be non-negative");
  if (!(cfg.weight_decay >= 0.0)) throw ConfigError("apollo: weight_decay must be non-negative");
}

// Weight on the new gradient in the bias-corrected average after t gradients.
// The retained weight beta (1 - beta^t) / (1 - beta^{t+1}) is exactly
// 1 - take, so the average is advanced as m += take * (g - m); a constant
// gradient stream is then an exact fixed point.
double ema_take(double beta, std::uint64_t t) {
  return (1.0 - beta) / (1.0 - std::pow(beta, static_cast<double>(t) + 1.0));
}

// (||d||_4 + eps)^4 from sum d_i^4.
double alpha_denominator(double pow4, double eps) {
  const double s = std::sqrt(std::sqrt(pow4)) + eps;
  const double s2 = s * s;
  return s2 * s2;
}

double alpha_from(double secant, double pow4, double eps) {
  const double denom = alpha_denominator(pow4, eps);
  return denom > 0.0 ? secant / denom : 0.0;
}

}  // namespace

void validate(const ApolloConfig& cfg) {
  check_step_config(cfg);
  if (!(cfg.eta > 0.0)) throw ConfigError("apollo: eta must be positive");
  if (!(cfg.eps > 0.0)) throw ConfigError("apollo: eps must be positive");
}

Tensor ema_update(const Tensor& m, const Tensor& g_next, double beta, std::uint64_t t) {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("ema_update: beta must be in (0, 1)");
  require_same_shape(m, g_next, "ema_update");
  Tensor out = m;
  out.axpy(ema_take(beta, t), sub(g_next, m));
  return out;
}

double compute_alpha(const Tensor& d, const Tensor& y, const Tensor& hess, double eps) {
  require_same_shape(d, y, "compute_alpha");
  require_same_shape(d, hess, "compute_alpha");
  const double secant = dot(d, y) + dot(d, mul(hess, d));
  return alpha_from(secant, norm4_pow4(d), eps);
}

Tensor update_diagonal(const Tensor& hess, double alpha, const Tensor& d) {
  require_same_shape(hess, d, "update_diagonal");
  Tensor out = hess;
  out.axpy(-alpha, square(d));
  return out;
}

Tensor rectify(const Tensor& hess, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("rectify: sigma must be positive");
  return maximum(abs(hess), sigma);
}

void apollo_step(Tensor& theta, const Tensor& g, ApolloState& state, const ApolloConfig& cfg,
                 double lr) {
  check_step_config(cfg);
  if (!(lr > 0.0)) throw ConfigError("apollo: lr must be positive");
  require_same_shape(theta, g, "apollo_step");
  require_same_shape(theta, state.m, "apollo_step");
  require_same_shape(theta, state.d, "apollo_step");
  require_same_shape(theta, state.hess, "apollo_step");
  if (!all_finite(g))
    throw NonFiniteError("non-finite gradient at step " + std::to_string(state.step + 1),
                         state.step + 1, 0);

  const bool coupled = cfg.weight_decay_mode == WeightDecayMode::kCoupled;
  const kernels::MomentSums sums = kernels::apollo_moment(
      state.m.data(), g.data(), theta.data(), state.d.data(), state.hess.data(),
      ema_take(cfg.beta, state.step), coupled ? cfg.weight_decay : 0.0);

  kernels::DirectionParams p;
  p.alpha = alpha_from(sums.secant, sums.pow4, cfg.eps);
  p.sigma = cfg.sigma;
  p.lr = lr;
  p.decoupled_decay = coupled ? 0.0 : lr * cfg.weight_decay;
  kernels::apollo_direction(state.hess.data(), state.d.data(), theta.data(), state.m.data(), p);
  ++state.step;
}

void apply_per_group(std::span<Tensor> params, std::span<const Tensor> grads,
                     std::span<ApolloState> states, const ApolloConfig& cfg, double lr) {
  if (params.size() != grads.size() || params.size() != states.size())
    throw ShapeError("apply_per_group: " + std::to_string(params.size()) + " params, " +
                     std::to_string(grads.size()) + " grads, " + std::to_string(states.size()) +
                     " states");
  check_step_config(cfg);
  if (!(lr > 0.0)) throw ConfigError("apollo: lr must be positive");
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i], grads[i], "apply_per_group");
    require_same_shape(params[i], states[i].m, "apply_per_group");
    if (!all_finite(grads[i]))
      throw NonFiniteError("non-finite gradient in group " + std::to_string(i) + " at step " +
                               std::to_string(states[i].step + 1),
                           states[i].step + 1, i);
    total += params[i].size();
  }

  // Groups are disjoint; run them side by side when there is enough work.
  const auto n = static_cast<std::ptrdiff_t>(params.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (n > 1 && total >= kernels::kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      apollo_step(params[i], grads[i], states[i], cfg, lr);
    } catch (...) {
#pragma omp critical(apollo_group_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ApolloOptimizer::ApolloOptimizer(std::vector<Shape> layout, ApolloConfig cfg)
    : Optimizer(std::move(layout)), cfg_(cfg) {
  validate(cfg_);
  for (const Shape& s : this->layout()) states_.emplace_back(s);
}

void ApolloOptimizer::update(std::span<Tensor> params, std::span<const Tensor> grads,
                             double lr) {
  apply_per_group(params, grads, states_, cfg_, lr);
}

void ApolloOptimizer::save_payload(CheckpointWriter& w) const {
  w.real("eta", cfg_.eta);
  w.real("sigma", cfg_.sigma);
  w.real("beta", cfg_.beta);
  w.real("eps", cfg_.eps);
  w.real("weight_decay", cfg_.weight_decay);
  w.line("weight_decay_mode", to_string(cfg_.weight_decay_mode));
  for (std::size_t i = 0; i < states_.size(); ++i) {
    w.integer("group", i);
    w.integer("t", states_[i].step);
    w.tensor("m", states_[i].m);
    w.tensor("d", states_[i].d);
    w.tensor("B", states_[i].hess);
  }
}

void ApolloOptimizer::load_payload(CheckpointReader& r) {
  ApolloConfig cfg;
  cfg.eta = r.real("eta");
  cfg.sigma = r.real("sigma");
  cfg.beta = r.real("beta");
  cfg.eps = r.real("eps");
  cfg.weight_decay = r.real("weight_decay");
  cfg.weight_decay_mode = parse_weight_decay_mode(r.line("weight_decay_mode"));
  validate(cfg);
  std::vector<ApolloState> states;
  for (std::size_t i = 0; i < layout().size(); ++i) {
    if (r.integer("group") != i) throw FormatError("checkpoint groups out of order");
    ApolloState s(layout()[i]);
    s.step = r.integer("t");
    r.tensor("m", s.m);
    r.tensor("d", s.d);
    r.tensor("B", s.hess);
    states.push_back(std::move(s));
  }
  cfg_ = cfg;
  states_ = std::move(states);
}

}  // namespace apollo
