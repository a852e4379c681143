// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Reference first-order optimizers: heavy-ball SGD and Adam/AdamW.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "apollo/optimizer.hpp"
#include "apollo/tensor.hpp"

namespace apollo {

struct SgdConfig {
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0;  // always coupled (L2 through the gradient)
};

struct SgdState {
  explicit SgdState(const Shape& shape) : velocity(shape) {}
  Tensor velocity;
  std::uint64_t step = 0;
};

/// v = momentum * v + (g + weight_decay * theta); theta -= lr * v.
void sgd_step(Tensor& theta, const Tensor& g, SgdState& state, double lr, double momentum,
              double weight_decay);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  WeightDecayMode weight_decay_mode = WeightDecayMode::kDecoupled;
};

struct AdamState {
  explicit AdamState(const Shape& shape) : m(shape), v(shape) {}
  Tensor m;
  Tensor v;
  std::uint64_t step = 0;
};

/// Adam with bias correction:
///   theta -= lr * m_hat / (sqrt(v_hat) + eps)
/// eps is added to the bias-corrected root second moment. In decoupled mode
/// (AdamW) theta additionally loses lr * weight_decay * theta; in coupled
/// mode weight_decay * theta is added to the gradient first.
void adam_step(Tensor& theta, const Tensor& g, AdamState& state, double lr, double beta1,
               double beta2, double eps, double weight_decay, WeightDecayMode mode);

/// Adam with decoupled weight decay.
void adamw_step(Tensor& theta, const Tensor& g, AdamState& state, double lr, double beta1,
                double beta2, double eps, double weight_decay);

/// Returns base_decay * lr_ratio, the decay that keeps weight_decay * lr
/// constant when the stepsize is divided by lr_ratio. Moving Apollo's
/// (gamma, eta) to Adam's eta_adam uses lr_ratio = eta / eta_adam.
double weight_decay_adjust(double base_decay, double lr_ratio);

class SgdOptimizer final : public Optimizer {
 public:
  SgdOptimizer(std::vector<Shape> layout, SgdConfig cfg);
  std::string name() const override { return "sgd"; }
  const SgdConfig& config() const noexcept { return cfg_; }
  const std::vector<SgdState>& states() const noexcept { return states_; }

 protected:
  void update(std::span<Tensor> params, std::span<const Tensor> grads, double lr) override;
  void save_payload(CheckpointWriter& w) const override;
  void load_payload(CheckpointReader& r) override;

 private:
  SgdConfig cfg_;
  std::vector<SgdState> states_;
};

class AdamOptimizer final : public Optimizer {
 public:
  AdamOptimizer(std::vector<Shape> layout, AdamConfig cfg);
  /// "adamw" in decoupled mode, "adam" otherwise.
  std::string name() const override;
  const AdamConfig& config() const noexcept { return cfg_; }
  const std::vector<AdamState>& states() const noexcept { return states_; }

 protected:
  void update(std::span<Tensor> params, std::span<const Tensor> grads, double lr) override;
  void save_payload(CheckpointWriter& w) const override;
  void load_payload(CheckpointReader& r) override;

 private:
  AdamConfig cfg_;
  std::vector<AdamState> states_;
};

}  // namespace apollo
