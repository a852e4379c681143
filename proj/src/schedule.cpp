// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/schedule.hpp"

#include <cmath>
#include <numbers>

#include "apollo/error.hpp"

namespace apollo {

std::string to_string(DecayPolicy policy) {
  switch (policy) {
    case DecayPolicy::kConstant: return "constant";
    case DecayPolicy::kMilestone: return "milestone";
    case DecayPolicy::kCosine: return "cosine";
  }
  return "constant";
}

DecayPolicy parse_decay_policy(const std::string& text) {
  if (text == "constant") return DecayPolicy::kConstant;
  if (text == "milestone") return DecayPolicy::kMilestone;
  if (text == "cosine") return DecayPolicy::kCosine;
  throw ConfigError("unknown schedule '" + text + "' (expected constant|milestone|cosine)");
}

void validate(const LrSchedule& s) {
  if (!(s.base_lr > 0.0)) throw ConfigError("schedule: base lr must be positive");
  if (s.warmup_steps > 0 && !(s.warmup_start > 0.0))
    throw ConfigError("schedule: warmup start lr must be positive");
  for (std::size_t i = 0; i < s.milestones.size(); ++i) {
    if (!(s.milestones[i].factor > 0.0))
      throw ConfigError("schedule: milestone factors must be positive");
    if (i > 0 && s.milestones[i].step <= s.milestones[i - 1].step)
      throw ConfigError("schedule: milestone steps must be strictly increasing");
  }
  if (s.decay == DecayPolicy::kCosine) {
    if (!(s.cosine_floor > 0.0)) throw ConfigError("schedule: cosine floor must be positive");
    if (s.cosine_steps <= s.warmup_steps)
      throw ConfigError("schedule: cosine horizon must extend past warmup");
  }
}

double lr_at(const LrSchedule& s, std::uint64_t t) {
  if (t < s.warmup_steps) {
    const double frac = static_cast<double>(t) / static_cast<double>(s.warmup_steps);
    return s.warmup_start + (s.base_lr - s.warmup_start) * frac;
  }
  switch (s.decay) {
    case DecayPolicy::kConstant:
      return s.base_lr;
    case DecayPolicy::kMilestone: {
      double lr = s.base_lr;
      for (const Milestone& m : s.milestones)
        if (t >= m.step) lr *= m.factor;
      return lr;
    }
    case DecayPolicy::kCosine: {
      if (t >= s.cosine_steps) return s.cosine_floor;
      const double span = static_cast<double>(s.cosine_steps - s.warmup_steps);
      const double progress = static_cast<double>(t - s.warmup_steps) / span;
      return s.cosine_floor +
             (s.base_lr - s.cosine_floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
    }
  }
  return s.base_lr;
}

}  // namespace apollo
