// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "apollo/tensor.hpp"

namespace apollo {

class CheckpointWriter;
class CheckpointReader;

enum class WeightDecayMode {
  kCoupled,    // gamma * theta is added to the gradient
  kDecoupled,  // theta -= lr * gamma * theta, outside the preconditioner
};

std::string to_string(WeightDecayMode mode);
WeightDecayMode parse_weight_decay_mode(const std::string& text);

/// Rescales `grads` in place so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping. max_norm <= 0 disables clipping.
double clip_grad_norm(std::span<Tensor> grads, double max_norm);

/// Throws NonFiniteError(step, group) for the first group holding a NaN/Inf.
void require_finite_gradients(std::span<const Tensor> grads, std::uint64_t step);

/// Common interface over Apollo and the baselines. An optimizer owns one state
/// per parameter group and is stepped from a single thread.
class Optimizer {
 public:
  explicit Optimizer(std::vector<Shape> layout);
  virtual ~Optimizer() = default;

  Optimizer(const Optimizer&) = default;
  Optimizer& operator=(const Optimizer&) = default;

  virtual std::string name() const = 0;

  /// One update of every group at stepsize `lr`. Gradients are checked for
  /// finiteness, then clipped by global norm if enabled, then handed to the
  /// concrete update rule.
  void step(std::span<Tensor> params, std::span<const Tensor> grads, double lr);

  /// Number of completed steps.
  std::uint64_t steps() const noexcept { return steps_; }
  const std::vector<Shape>& layout() const noexcept { return layout_; }

  void set_clip_norm(double max_norm) { clip_norm_ = max_norm; }
  double clip_norm() const noexcept { return clip_norm_; }

  /// Writes a versioned text checkpoint (see docs/checkpoint.md).
  void save(std::ostream& os) const;
  /// Restores config, clip norm, and per-group state. Throws FormatError if
  /// the record belongs to another optimizer or layout.
  void load(std::istream& is);

 protected:
  virtual void update(std::span<Tensor> params, std::span<const Tensor> grads,
                      double lr) = 0;

  virtual void save_payload(CheckpointWriter& w) const = 0;
  virtual void load_payload(CheckpointReader& r) = 0;

 private:
  std::vector<Shape> layout_;
  std::uint64_t steps_ = 0;
  double clip_norm_ = 0.0;
};

}  // namespace apollo
