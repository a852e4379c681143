// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/baselines.hpp"

#include <cmath>
#include <utility>

#include "apollo/checkpoint.hpp"
#include "apollo/error.hpp"

namespace apollo {
namespace {

void check_finite(const Tensor& g, std::uint64_t step) {
  if (!all_finite(g))
    throw NonFiniteError("non-finite gradient at step " + std::to_string(step), step, 0);
}

void validate(const SgdConfig& c) {
  if (!(c.lr > 0.0)) throw ConfigError("sgd: lr must be positive");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw ConfigError("sgd: momentum must be in [0, 1)");
  if (!(c.weight_decay >= 0.0)) throw ConfigError("sgd: weight_decay must be non-negative");
}

void validate(const AdamConfig& c) {
  if (!(c.lr > 0.0)) throw ConfigError("adam: lr must be positive");
  if (!(c.beta1 > 0.0 && c.beta1 < 1.0) || !(c.beta2 > 0.0 && c.beta2 < 1.0))
    throw ConfigError("adam: betas must be in (0, 1)");
  if (!(c.eps > 0.0)) throw ConfigError("adam: eps must be positive");
  if (!(c.weight_decay >= 0.0)) throw ConfigError("adam: weight_decay must be non-negative");
}

}  // namespace

void sgd_step(Tensor& theta, const Tensor& g, SgdState& state, double lr, double momentum,
              double weight_decay) {
  require_same_shape(theta, g, "sgd_step");
  require_same_shape(theta, state.velocity, "sgd_step");
  check_finite(g, state.step + 1);
  Tensor& v = state.velocity;
  v *= momentum;
  v += g;
  if (weight_decay != 0.0) v.axpy(weight_decay, theta);
  theta.axpy(-lr, v);
  ++state.step;
}

void adam_step(Tensor& theta, const Tensor& g, AdamState& state, double lr, double beta1,
               double beta2, double eps, double weight_decay, WeightDecayMode mode) {
  require_same_shape(theta, g, "adam_step");
  require_same_shape(theta, state.m, "adam_step");
  check_finite(g, state.step + 1);
  const std::uint64_t t = ++state.step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  const bool coupled = mode == WeightDecayMode::kCoupled && weight_decay != 0.0;
  const double shrink = mode == WeightDecayMode::kDecoupled ? lr * weight_decay : 0.0;
  double* th = theta.data().data();
  double* m = state.m.data().data();
  double* v = state.v.data().data();
  const double* gr = g.data().data();
  const auto n = static_cast<std::ptrdiff_t>(theta.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<std::ptrdiff_t>(kernels::kParallelThreshold))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double grad = coupled ? gr[i] + weight_decay * th[i] : gr[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad;
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad * grad;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    const double before = th[i];
    th[i] = before - lr * m_hat / (std::sqrt(v_hat) + eps) - shrink * before;
  }
}

void adamw_step(Tensor& theta, const Tensor& g, AdamState& state, double lr, double beta1,
                double beta2, double eps, double weight_decay) {
  adam_step(theta, g, state, lr, beta1, beta2, eps, weight_decay, WeightDecayMode::kDecoupled);
}

double weight_decay_adjust(double base_decay, double lr_ratio) {
  if (!(lr_ratio > 0.0)) throw ConfigError("weight_decay_adjust: lr_ratio must be positive");
  return base_decay * lr_ratio;
}

SgdOptimizer::SgdOptimizer(std::vector<Shape> layout, SgdConfig cfg)
    : Optimizer(std::move(layout)), cfg_(cfg) {
  validate(cfg_);
  for (const Shape& s : this->layout()) states_.emplace_back(s);
}

void SgdOptimizer::update(std::span<Tensor> params, std::span<const Tensor> grads, double lr) {
  for (std::size_t i = 0; i < params.size(); ++i)
    sgd_step(params[i], grads[i], states_[i], lr, cfg_.momentum, cfg_.weight_decay);
}

void SgdOptimizer::save_payload(CheckpointWriter& w) const {
  w.real("lr", cfg_.lr);
  w.real("momentum", cfg_.momentum);
  w.real("weight_decay", cfg_.weight_decay);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    w.integer("group", i);
    w.integer("t", states_[i].step);
    w.tensor("velocity", states_[i].velocity);
  }
}

void SgdOptimizer::load_payload(CheckpointReader& r) {
  SgdConfig cfg;
  cfg.lr = r.real("lr");
  cfg.momentum = r.real("momentum");
  cfg.weight_decay = r.real("weight_decay");
  validate(cfg);
  std::vector<SgdState> states;
  for (std::size_t i = 0; i < layout().size(); ++i) {
    if (r.integer("group") != i) throw FormatError("checkpoint groups out of order");
    SgdState s(layout()[i]);
    s.step = r.integer("t");
    r.tensor("velocity", s.velocity);
    states.push_back(std::move(s));
  }
  cfg_ = cfg;
  states_ = std::move(states);
}

AdamOptimizer::AdamOptimizer(std::vector<Shape> layout, AdamConfig cfg)
    : Optimizer(std::move(layout)), cfg_(cfg) {
  validate(cfg_);
  for (const Shape& s : this->layout()) states_.emplace_back(s);
}

std::string AdamOptimizer::name() const {
  return cfg_.weight_decay_mode == WeightDecayMode::kDecoupled ? "adamw" : "adam";
}

void AdamOptimizer::update(std::span<Tensor> params, std::span<const Tensor> grads, double lr) {
  for (std::size_t i = 0; i < params.size(); ++i)
    adam_step(params[i], grads[i], states_[i], lr, cfg_.beta1, cfg_.beta2, cfg_.eps,
              cfg_.weight_decay, cfg_.weight_decay_mode);
}

void AdamOptimizer::save_payload(CheckpointWriter& w) const {
  w.real("lr", cfg_.lr);
  w.real("beta1", cfg_.beta1);
  w.real("beta2", cfg_.beta2);
  w.real("eps", cfg_.eps);
  w.real("weight_decay", cfg_.weight_decay);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    w.integer("group", i);
    w.integer("t", states_[i].step);
    w.tensor("m", states_[i].m);
    w.tensor("v", states_[i].v);
  }
}

void AdamOptimizer::load_payload(CheckpointReader& r) {
  AdamConfig cfg = cfg_;
  cfg.lr = r.real("lr");
  cfg.beta1 = r.real("beta1");
  cfg.beta2 = r.real("beta2");
  cfg.eps = r.real("eps");
  cfg.weight_decay = r.real("weight_decay");
  validate(cfg);
  std::vector<AdamState> states;
  for (std::size_t i = 0; i < layout().size(); ++i) {
    if (r.integer("group") != i) throw FormatError("checkpoint groups out of order");
    AdamState s(layout()[i]);
    s.step = r.integer("t");
    r.tensor("m", s.m);
    r.tensor("v", s.v);
    states.push_back(std::move(s));
  }
  cfg_ = cfg;
  states_ = std::move(states);
}

}  // namespace apollo
