// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Benchmark objectives: analytic test functions and a small MLP classifier on
// synthetic Gaussian-mixture data. All gradients are analytic.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "apollo/tensor.hpp"

namespace apollo {

using Rng = std::mt19937_64;

struct Evaluation {
  double loss = 0.0;
  std::vector<Tensor> grads;  // one per parameter group
};

/// A differentiable objective over a list of parameter groups.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual std::vector<Shape> group_layout() const = 0;
  virtual std::vector<Tensor> initial_params(std::uint64_t seed) const = 0;

  /// Training-set size for empirical-risk objectives, 0 for analytic ones.
  virtual std::size_t num_examples() const { return 0; }

  /// Deterministic objective value (full data, no noise).
  virtual double eval(std::span<const Tensor> params) const = 0;

  /// Loss and gradient on `batch` (empty = all examples). `rng` feeds any
  /// gradient noise.
  virtual Evaluation gradient(std::span<const Tensor> params,
                              std::span<const std::size_t> batch, Rng& rng) const = 0;

  /// Gradient over all examples. Noisy objectives draw their noise from a
  /// fixed seed here.
  Evaluation full_gradient(std::span<const Tensor> params) const;
};

/// f = (1 - x)^2 + 100 (y - x^2)^2 on a 2-vector.
Evaluation rosenbrock(const Tensor& params);

/// f = 1/2 sum h_i theta_i^2. The gradient carries noise_scale * N(0, 1) per
/// coordinate; the reported loss is exact.
Evaluation quadratic_bowl(const Tensor& params, const Tensor& h_diag, double noise_scale,
                          Rng& rng);

/// f = x^2 - y^2 + 0.1 y^4: a saddle at the origin, minima at y = +-sqrt(5).
Evaluation saddle_objective(const Tensor& params);

class RosenbrockObjective final : public Objective {
 public:
  explicit RosenbrockObjective(Tensor start = Tensor{-1.2, 1.0});
  std::string name() const override { return "rosenbrock"; }
  std::vector<Shape> group_layout() const override { return {{2}}; }
  std::vector<Tensor> initial_params(std::uint64_t) const override { return {start_}; }
  double eval(std::span<const Tensor> params) const override;
  Evaluation gradient(std::span<const Tensor> params, std::span<const std::size_t>,
                      Rng&) const override;

 private:
  Tensor start_;
};

class QuadraticBowlObjective final : public Objective {
 public:
  /// Starts from all-ones unless `start` is given.
  QuadraticBowlObjective(Tensor h_diag, double noise_scale);
  QuadraticBowlObjective(Tensor h_diag, double noise_scale, Tensor start);
  std::string name() const override { return "quadratic"; }
  std::vector<Shape> group_layout() const override { return {h_.shape()}; }
  std::vector<Tensor> initial_params(std::uint64_t) const override { return {start_}; }
  double eval(std::span<const Tensor> params) const override;
  Evaluation gradient(std::span<const Tensor> params, std::span<const std::size_t>,
                      Rng& rng) const override;
  const Tensor& h_diag() const noexcept { return h_; }

 private:
  Tensor h_;
  double noise_;
  Tensor start_;
};

class SaddleObjective final : public Objective {
 public:
  explicit SaddleObjective(Tensor start = Tensor{0.1, 0.1});
  std::string name() const override { return "saddle"; }
  std::vector<Shape> group_layout() const override { return {{2}}; }
  std::vector<Tensor> initial_params(std::uint64_t) const override { return {start_}; }
  double eval(std::span<const Tensor> params) const override;
  Evaluation gradient(std::span<const Tensor> params, std::span<const std::size_t>,
                      Rng&) const override;

 private:
  Tensor start_;
};

/// Gaussian-mixture classification data, regenerated bitwise from the seed.
struct SyntheticDataset {
  std::size_t num_examples = 0;
  std::size_t num_features = 0;
  std::size_t num_classes = 0;
  std::uint64_t seed = 0;
  std::vector<double> features;     // row-major num_examples x num_features
  std::vector<std::size_t> labels;  // balanced: label of example i is i % num_classes

  /// Class centres are separation * N(0, I); each point is its centre plus
  /// N(0, I) noise.
  static SyntheticDataset generate(std::size_t num_examples, std::size_t num_features,
                                   std::size_t num_classes, std::uint64_t seed,
                                   double separation = 2.0);
};

/// input -> tanh hidden layer -> softmax. Groups, in order: W1 [hidden, in],
/// b1 [hidden], W2 [classes, hidden], b2 [classes].
struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;

  std::vector<Shape> group_layout() const;
  std::size_t num_parameters() const;
  /// Weights ~ N(0, 1/fan_in), biases zero.
  std::vector<Tensor> initial_params(std::uint64_t seed) const;
};

/// Mean softmax cross-entropy over `batch` (empty = every example) and its
/// exact gradient by backpropagation.
Evaluation mlp_forward_backward(const MlpModel& model, std::span<const Tensor> params,
                                const SyntheticDataset& data,
                                std::span<const std::size_t> batch);

class MlpObjective final : public Objective {
 public:
  MlpObjective(MlpModel model, SyntheticDataset data);
  std::string name() const override { return "mlp"; }
  std::vector<Shape> group_layout() const override { return model_.group_layout(); }
  std::vector<Tensor> initial_params(std::uint64_t seed) const override {
    return model_.initial_params(seed);
  }
  std::size_t num_examples() const override { return data_.num_examples; }
  double eval(std::span<const Tensor> params) const override;
  Evaluation gradient(std::span<const Tensor> params, std::span<const std::size_t> batch,
                      Rng&) const override;

  const MlpModel& model() const noexcept { return model_; }
  const SyntheticDataset& data() const noexcept { return data_; }

 private:
  MlpModel model_;
  SyntheticDataset data_;
};

}  // namespace apollo
