// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace apollo {

enum class DecayPolicy { kConstant, kMilestone, kCosine };

std::string to_string(DecayPolicy policy);
DecayPolicy parse_decay_policy(const std::string& text);

struct Milestone {
  std::uint64_t step = 0;  // factor applies from this step on
  double factor = 1.0;
};

/// Linear warmup from `warmup_start` to `base_lr` over `warmup_steps`, then
/// a decay policy applied to `base_lr`.
struct LrSchedule {
  double base_lr = 0.1;
  double warmup_start = 0.01;      // only read when warmup_steps > 0
  std::uint64_t warmup_steps = 0;
  DecayPolicy decay = DecayPolicy::kConstant;
  std::vector<Milestone> milestones;  // kMilestone
  std::uint64_t cosine_steps = 0;     // kCosine: step at which the floor is reached
  double cosine_floor = 1e-8;
};

/// Throws ConfigError if any lr the schedule can produce would be <= 0.
void validate(const LrSchedule& schedule);

/// Effective stepsize for the update that follows `t` completed updates.
///
/// Warmup interpolates linearly: lr_at(0) = warmup_start and
/// lr_at(warmup_steps) = base_lr. Milestone factors compound for every
/// milestone with step <= t. Cosine anneals from base_lr at the end of warmup
/// to cosine_floor at cosine_steps and stays there.
double lr_at(const LrSchedule& schedule, std::uint64_t t);

}  // namespace apollo
