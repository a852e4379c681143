// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "apollo/error.hpp"
#include "apollo/kernels.hpp"

namespace apollo {
namespace {

void require_groups(std::span<const Tensor> params, const std::vector<Shape>& layout,
                    const std::string& who) {
  if (params.size() != layout.size())
    throw ShapeError(who + ": expected " + std::to_string(layout.size()) + " groups, got " +
                     std::to_string(params.size()));
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (params[i].shape() != layout[i])
      throw ShapeError(who + ": group " + std::to_string(i) + " has shape " +
                       shape_string(params[i].shape()) + ", expected " +
                       shape_string(layout[i]));
}

void require_pair(const Tensor& p, const char* who) {
  if (p.size() != 2) throw ShapeError(std::string(who) + ": expects a 2-vector");
}

}  // namespace

Evaluation Objective::full_gradient(std::span<const Tensor> params) const {
  Rng fixed(0);
  return gradient(params, {}, fixed);
}

Evaluation rosenbrock(const Tensor& p) {
  require_pair(p, "rosenbrock");
  const double x = p[0];
  const double y = p[1];
  const double a = 1.0 - x;
  const double b = y - x * x;
  Evaluation e;
  e.loss = a * a + 100.0 * b * b;
  e.grads.push_back(Tensor{-2.0 * a - 400.0 * x * b, 200.0 * b});
  return e;
}

Evaluation quadratic_bowl(const Tensor& p, const Tensor& h, double noise_scale, Rng& rng) {
  require_same_shape(p, h, "quadratic_bowl");
  Evaluation e;
  Tensor g = mul(h, p);
  e.loss = 0.5 * dot(g, p);
  if (noise_scale != 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += noise_scale * normal(rng);
  }
  e.grads.push_back(std::move(g));
  return e;
}

Evaluation saddle_objective(const Tensor& p) {
  require_pair(p, "saddle_objective");
  const double x = p[0];
  const double y = p[1];
  Evaluation e;
  e.loss = x * x - y * y + 0.1 * y * y * y * y;
  e.grads.push_back(Tensor{2.0 * x, -2.0 * y + 0.4 * y * y * y});
  return e;
}

RosenbrockObjective::RosenbrockObjective(Tensor start) : start_(std::move(start)) {
  require_pair(start_, "rosenbrock");
}

double RosenbrockObjective::eval(std::span<const Tensor> params) const {
  require_groups(params, group_layout(), name());
  return rosenbrock(params[0]).loss;
}

Evaluation RosenbrockObjective::gradient(std::span<const Tensor> params,
                                         std::span<const std::size_t>, Rng&) const {
  require_groups(params, group_layout(), name());
  return rosenbrock(params[0]);
}

QuadraticBowlObjective::QuadraticBowlObjective(Tensor h_diag, double noise_scale)
    : QuadraticBowlObjective(h_diag, noise_scale, Tensor::full(h_diag.shape(), 1.0)) {}

QuadraticBowlObjective::QuadraticBowlObjective(Tensor h_diag, double noise_scale, Tensor start)
    : h_(std::move(h_diag)), noise_(noise_scale), start_(std::move(start)) {
  for (double v : h_.data())
    if (!(v > 0.0)) throw ConfigError("quadratic bowl: curvatures must be positive");
  if (!(noise_ >= 0.0)) throw ConfigError("quadratic bowl: noise must be non-negative");
  require_same_shape(h_, start_, "quadratic bowl start");
}

double QuadraticBowlObjective::eval(std::span<const Tensor> params) const {
  require_groups(params, group_layout(), name());
  return 0.5 * dot(mul(h_, params[0]), params[0]);
}

Evaluation QuadraticBowlObjective::gradient(std::span<const Tensor> params,
                                            std::span<const std::size_t>, Rng& rng) const {
  require_groups(params, group_layout(), name());
  return quadratic_bowl(params[0], h_, noise_, rng);
}

SaddleObjective::SaddleObjective(Tensor start) : start_(std::move(start)) {
  require_pair(start_, "saddle");
}

double SaddleObjective::eval(std::span<const Tensor> params) const {
  require_groups(params, group_layout(), name());
  return saddle_objective(params[0]).loss;
}

Evaluation SaddleObjective::gradient(std::span<const Tensor> params,
                                     std::span<const std::size_t>, Rng&) const {
  require_groups(params, group_layout(), name());
  return saddle_objective(params[0]);
}

SyntheticDataset SyntheticDataset::generate(std::size_t num_examples, std::size_t num_features,
                                            std::size_t num_classes, std::uint64_t seed,
                                            double separation) {
  if (num_examples == 0 || num_features == 0 || num_classes < 2)
    throw ConfigError("dataset needs examples, features, and at least two classes");
  SyntheticDataset ds;
  ds.num_examples = num_examples;
  ds.num_features = num_features;
  ds.num_classes = num_classes;
  ds.seed = seed;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> centres(num_classes * num_features);
  for (double& c : centres) c = separation * normal(rng);
  ds.features.resize(num_examples * num_features);
  ds.labels.resize(num_examples);
  for (std::size_t n = 0; n < num_examples; ++n) {
    const std::size_t label = n % num_classes;
    ds.labels[n] = label;
    for (std::size_t j = 0; j < num_features; ++j)
      ds.features[n * num_features + j] = centres[label * num_features + j] + normal(rng);
  }
  return ds;
}

std::vector<Shape> MlpModel::group_layout() const {
  return {{hidden, inputs}, {hidden}, {classes, hidden}, {classes}};
}

std::size_t MlpModel::num_parameters() const {
  return hidden * inputs + hidden + classes * hidden + classes;
}

std::vector<Tensor> MlpModel::initial_params(std::uint64_t seed) const {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Tensor> params;
  for (const Shape& s : group_layout()) params.emplace_back(s);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : params[0].data()) w = s1 * normal(rng);
  for (double& w : params[2].data()) w = s2 * normal(rng);
  return params;
}

Evaluation mlp_forward_backward(const MlpModel& model, std::span<const Tensor> params,
                                const SyntheticDataset& data,
                                std::span<const std::size_t> batch) {
  require_groups(params, model.group_layout(), "mlp");
  if (data.num_features != model.inputs)
    throw ShapeError("mlp: dataset has " + std::to_string(data.num_features) +
                     " features, first layer expects " + std::to_string(model.inputs));
  if (data.num_classes > model.classes)
    throw ShapeError("mlp: dataset has more classes than the output layer");

  const std::size_t in = model.inputs;
  const std::size_t hid = model.hidden;
  const std::size_t cls = model.classes;
  const std::size_t rows = batch.empty() ? data.num_examples : batch.size();

  // Gather the batch so the dense kernels see contiguous rows.
  std::vector<double> x(rows * in);
  std::vector<std::size_t> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t n = batch.empty() ? r : batch[r];
    if (n >= data.num_examples) throw ShapeError("mlp: batch index out of range");
    std::copy_n(data.features.begin() + static_cast<std::ptrdiff_t>(n * in), in,
                x.begin() + static_cast<std::ptrdiff_t>(r * in));
    y[r] = data.labels[n];
  }

  std::vector<double> h(rows * hid);
  kernels::affine_forward(x, params[0].data(), params[1].data(), rows, in, hid, h);
  for (double& v : h) v = std::tanh(v);
  std::vector<double> logits(rows * cls);
  kernels::affine_forward(h, params[2].data(), params[3].data(), rows, hid, cls, logits);

  // Softmax cross-entropy; logits become (p - onehot).
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double* z = logits.data() + r * cls;
    const double zmax = *std::max_element(z, z + cls);
    double denom = 0.0;
    for (std::size_t c = 0; c < cls; ++c) denom += std::exp(z[c] - zmax);
    const double log_denom = std::log(denom) + zmax;
    loss += log_denom - z[y[r]];
    for (std::size_t c = 0; c < cls; ++c) z[c] = std::exp(z[c] - log_denom);
    z[y[r]] -= 1.0;
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);

  Evaluation e;
  e.loss = loss * inv_rows;
  for (const Shape& s : model.group_layout()) e.grads.emplace_back(s);
  kernels::affine_weight_grad(logits, h, rows, hid, cls, inv_rows, e.grads[2].data(),
                              e.grads[3].data());
  std::vector<double> dh(rows * hid);
  kernels::affine_input_grad(logits, params[2].data(), rows, hid, cls, dh);
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] *= 1.0 - h[i] * h[i];
  kernels::affine_weight_grad(dh, x, rows, in, hid, inv_rows, e.grads[0].data(),
                              e.grads[1].data());
  return e;
}

MlpObjective::MlpObjective(MlpModel model, SyntheticDataset data)
    : model_(model), data_(std::move(data)) {
  if (model_.inputs == 0 || model_.hidden == 0 || model_.classes < 2)
    throw ConfigError("mlp: layer sizes must be positive with at least two classes");
  if (data_.num_features != model_.inputs)
    throw ShapeError("mlp: dataset has " + std::to_string(data_.num_features) +
                     " features, first layer expects " + std::to_string(model_.inputs));
}

double MlpObjective::eval(std::span<const Tensor> params) const {
  return mlp_forward_backward(model_, params, data_, {}).loss;
}

Evaluation MlpObjective::gradient(std::span<const Tensor> params,
                                  std::span<const std::size_t> batch, Rng&) const {
  return mlp_forward_backward(model_, params, data_, batch);
}

}  // namespace apollo
