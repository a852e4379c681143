// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/optimizer.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "apollo/checkpoint.hpp"
#include "apollo/error.hpp"

namespace apollo {

std::string to_string(WeightDecayMode mode) {
  return mode == WeightDecayMode::kCoupled ? "coupled" : "decoupled";
}

WeightDecayMode parse_weight_decay_mode(const std::string& text) {
  if (text == "coupled" || text == "l2") return WeightDecayMode::kCoupled;
  if (text == "decoupled") return WeightDecayMode::kDecoupled;
  throw ConfigError("unknown weight decay mode '" + text + "' (expected coupled|decoupled)");
}

double clip_grad_norm(std::span<Tensor> grads, double max_norm) {
  const double norm = global_l2_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (Tensor& g : grads) g *= factor;
  }
  return norm;
}

void require_finite_gradients(std::span<const Tensor> grads, std::uint64_t step) {
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!all_finite(grads[i]))
      throw NonFiniteError("non-finite gradient in group " + std::to_string(i) + " at step " +
                               std::to_string(step),
                           step, i);
}

Optimizer::Optimizer(std::vector<Shape> layout) : layout_(std::move(layout)) {
  if (layout_.empty()) throw ConfigError("optimizer needs at least one parameter group");
}

void Optimizer::step(std::span<Tensor> params, std::span<const Tensor> grads, double lr) {
  if (params.size() != layout_.size() || grads.size() != layout_.size())
    throw ShapeError("optimizer has " + std::to_string(layout_.size()) + " groups, got " +
                     std::to_string(params.size()) + " params and " +
                     std::to_string(grads.size()) + " grads");
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (params[i].shape() != layout_[i] || grads[i].shape() != layout_[i])
      throw ShapeError("group " + std::to_string(i) + ": expected shape " +
                       shape_string(layout_[i]));
  }
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  require_finite_gradients(grads, steps_ + 1);
  if (clip_norm_ > 0.0) {
    std::vector<Tensor> clipped(grads.begin(), grads.end());
    clip_grad_norm(clipped, clip_norm_);
    update(params, clipped, lr);
  } else {
    update(params, grads, lr);
  }
  ++steps_;
}

void Optimizer::save(std::ostream& os) const {
  CheckpointWriter w(os);
  w.line(kCheckpointMagic, std::to_string(kCheckpointVersion));
  w.line("optimizer", name());
  w.integer("steps", steps_);
  w.real("clip_norm", clip_norm_);
  w.integer("groups", layout_.size());
  for (const Shape& s : layout_) {
    std::string dims;
    for (std::size_t i = 0; i < s.size(); ++i) dims += (i ? "," : "") + std::to_string(s[i]);
    w.line("shape", dims);
  }
  save_payload(w);
  w.line("end", "");
}

void Optimizer::load(std::istream& is) {
  CheckpointReader r(is);
  const std::string version = r.line(kCheckpointMagic);
  if (version != std::to_string(kCheckpointVersion))
    throw FormatError("unsupported checkpoint version '" + version + "'");
  const std::string who = r.line("optimizer");
  if (who != name())
    throw FormatError("checkpoint is for optimizer '" + who + "', not '" + name() + "'");
  const std::uint64_t steps = r.integer("steps");
  const double clip = r.real("clip_norm");
  const std::uint64_t groups = r.integer("groups");
  if (groups != layout_.size())
    throw FormatError("checkpoint has " + std::to_string(groups) + " groups, optimizer has " +
                      std::to_string(layout_.size()));
  for (const Shape& s : layout_) {
    std::string dims;
    for (std::size_t i = 0; i < s.size(); ++i) dims += (i ? "," : "") + std::to_string(s[i]);
    const std::string got = r.line("shape");
    if (got != dims) throw FormatError("checkpoint group shape " + got + " != " + dims);
  }
  load_payload(r);
  r.line("end");
  steps_ = steps;
  clip_norm_ = clip;
}

}  // namespace apollo
