// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Small generators shared by the property tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "apollo/tensor.hpp"

namespace apollo::test {

using Gen = std::mt19937_64;

inline std::vector<double> normals(Gen& g, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(g);
  return v;
}

inline std::vector<double> uniforms(Gen& g, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(g);
  return v;
}

inline Tensor random_tensor(Gen& g, std::size_t n, double scale = 1.0) {
  return Tensor({n}, normals(g, n, scale));
}

inline std::size_t random_dim(Gen& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline double rel_diff(double a, double b) {
  const double s = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / s;
}

inline double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double scale = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::fabs(a[i] - b[i]));
    scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
  }
  return diff / scale;
}

}  // namespace apollo::test
