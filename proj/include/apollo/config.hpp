// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment configuration: a flat "key = value" file, optionally overridden
// by "key=value" strings, resolved into a typed ExperimentConfig.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "apollo/objectives.hpp"
#include "apollo/optimizer.hpp"
#include "apollo/schedule.hpp"

namespace apollo {

/// Raw key/value pairs in key order.
using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines. '#' starts a comment; blank lines are skipped.
/// Throws ConfigError (with the line number) on malformed lines or repeated
/// keys.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);
/// Applies one "key=value" override.
void apply_override(KeyValues& kv, const std::string& assignment);

struct ObjectiveSpec {
  std::string kind = "rosenbrock";  // rosenbrock | quadratic | saddle | mlp
  std::vector<double> start;        // analytic objectives; empty = default start
  std::vector<double> h_diag = {1.0, 100.0};
  double noise = 0.0;
  std::size_t dataset_size = 512;
  std::size_t features = 8;
  std::size_t classes = 3;
  std::size_t hidden = 16;
  std::uint64_t data_seed = 7;
  double separation = 2.0;
};

struct OptimizerSpec {
  std::string name = "apollo";  // apollo | sgd | adamw | adam
  double lr = 0.5;
  // apollo
  double sigma = 1.0;
  double beta = 0.9;
  double eps = 1e-4;
  // sgd
  double momentum = 0.9;
  // adam / adamw
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // shared
  double weight_decay = 0.0;
  WeightDecayMode weight_decay_mode = WeightDecayMode::kCoupled;  // apollo only
  double clip_norm = 0.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ObjectiveSpec objective;
  OptimizerSpec optimizer;
  LrSchedule schedule;  // base_lr always equals optimizer.lr
  std::uint64_t steps = 1000;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 1;
  std::size_t repeat = 1;
  std::uint64_t log_every = 10;
  double loss_threshold = 1e-6;
};

/// Every recognised key with its default value.
KeyValues default_key_values();

/// Builds a validated config. Unknown keys and unparsable or out-of-range
/// values raise ConfigError.
ExperimentConfig resolve(const KeyValues& kv);

/// Canonical, fully resolved key/value form; resolve(to_key_values(c))
/// reproduces c.
KeyValues to_key_values(const ExperimentConfig& cfg);

std::string to_text(const KeyValues& kv);

std::unique_ptr<Objective> make_objective(const ObjectiveSpec& desc);
std::unique_ptr<Optimizer> make_optimizer(const OptimizerSpec& desc,
                                          const std::vector<Shape>& layout);

}  // namespace apollo
