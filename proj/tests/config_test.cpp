// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>

#include "apollo/apollo.hpp"
#include "apollo/config.hpp"
#include "apollo/error.hpp"

using namespace apollo;

TEST_CASE("key/value parsing") {
  const KeyValues kv = parse_key_values(
      "# rosenbrock run\n"
      "objective = rosenbrock\n"
      "\n"
      "lr=0.02   # trailing comment\n"
      "  milestones = 80:0.1, 120:0.1\n");
  CHECK(kv.at("objective") == "rosenbrock");
  CHECK(kv.at("lr") == "0.02");
  CHECK(kv.at("milestones") == "80:0.1, 120:0.1");
  CHECK_THROWS_AS((void)parse_key_values("lr = 1\nlr = 2\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_key_values("just words\n"), ConfigError);
  try {
    (void)parse_key_values("a = 1\n\nbroken\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("overrides") {
  KeyValues kv = default_key_values();
  apply_override(kv, "lr=0.3");
  CHECK(kv.at("lr") == "0.3");
  CHECK_THROWS_AS(apply_override(kv, "lr"), ConfigError);
  CHECK_THROWS_AS(apply_override(kv, "=3"), ConfigError);
}

TEST_CASE("resolve builds a validated config") {
  KeyValues kv{{"objective", "mlp"}, {"optimizer", "adamw"}, {"lr", "0.01"},
               {"schedule", "milestone"}, {"milestones", "80:0.1,120:0.1"},
               {"warmup_steps", "10"}, {"batch_size", "32"}};
  const ExperimentConfig cfg = resolve(kv);
  CHECK(cfg.objective.kind == "mlp");
  CHECK(cfg.optimizer.name == "adamw");
  CHECK(cfg.schedule.base_lr == 0.01);
  REQUIRE(cfg.schedule.milestones.size() == 2);
  CHECK(cfg.schedule.milestones[1].step == 120);
  CHECK(cfg.schedule.milestones[1].factor == 0.1);
  CHECK(cfg.batch_size == 32);
  CHECK(cfg.schedule.cosine_steps == cfg.steps);

  const auto obj = make_objective(cfg.objective);
  const auto opt = make_optimizer(cfg.optimizer, obj->group_layout());
  CHECK(opt->name() == "adamw");
  CHECK(obj->group_layout().size() == 4);
}

TEST_CASE("resolve rejects bad input") {
  CHECK_THROWS_AS((void)resolve({{"learning_rate", "0.1"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"lr", "fast"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"lr", "-1"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"beta", "1"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"eps", "0"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"objective", "imagenet"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"optimizer", "radam"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"steps", "0"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"milestones", "80"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"objective", "quadratic"}, {"h_diag", "1,-2"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"objective", "rosenbrock"}, {"start", "1,2,3"}}), ShapeError);
  CHECK_THROWS_AS((void)resolve({{"weight_decay_mode", "sideways"}}), ConfigError);
  CHECK_THROWS_AS((void)resolve({{"warmup_steps", "5"}, {"warmup_start", "0"}}), ConfigError);
}

TEST_CASE("resolved configs round-trip through their text form") {
  KeyValues kv{{"objective", "quadratic"}, {"h_diag", "1,10"}, {"lr", "0.1"},
               {"noise", "0.25"}, {"weight_decay", "1e-4"}, {"weight_decay_mode", "decoupled"},
               {"name", "bowl"}};
  const ExperimentConfig cfg = resolve(kv);
  const std::string text = to_text(to_key_values(cfg));
  const ExperimentConfig again = resolve(parse_key_values(text));
  CHECK(to_text(to_key_values(again)) == text);
  CHECK(again.optimizer.weight_decay_mode == WeightDecayMode::kDecoupled);
  CHECK(again.objective.h_diag == std::vector<double>{1.0, 10.0});
}
