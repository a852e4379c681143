// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks shared by `apollo verify` and the acceptance test binary.

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace apollo::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> run;
};

/// Criteria 1-10 in order.
const std::vector<Criterion>& criteria();

/// Runs one criterion by id; exceptions become a failed result.
CriterionResult run_criterion(int id);

/// "[PASS] 3 name: detail (1.23 s)".
std::string format_line(const CriterionResult& r);

/// Runs every criterion (or just `only` if non-empty), printing one line
/// each as it finishes. Returns true if all passed.
bool run_all(std::ostream& os, const std::vector<int>& only = {});

/// The calibration baselines compiled into the library, as JSON text.
const std::string& baselines_json();

}  // namespace apollo::verify
