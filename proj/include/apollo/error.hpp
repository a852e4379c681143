// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace apollo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands disagree on shape or group layout.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A divisor contained an exact zero.
class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameter, schedule, or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A gradient (or loss) stopped being finite. Carries the step at which the
/// optimizer saw it so a harness can report where the run diverged.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::uint64_t step, std::size_t group)
      : Error(what), step_(step), group_(group) {}

  std::uint64_t step() const noexcept { return step_; }
  std::size_t group() const noexcept { return group_; }

 private:
  std::uint64_t step_;
  std::size_t group_;
};

/// Malformed or incompatible checkpoint.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace apollo
