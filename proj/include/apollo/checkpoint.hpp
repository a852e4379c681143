// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Line-oriented text records for optimizer checkpoints. Reals are written in
// shortest round-trip decimal form, so a save/load cycle is bit-exact.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "apollo/tensor.hpp"

namespace apollo {

inline constexpr const char* kCheckpointMagic = "apollo-checkpoint";
inline constexpr int kCheckpointVersion = 1;

std::string format_real(double value);
double parse_real(const std::string& text);

class CheckpointWriter {
 public:
  explicit CheckpointWriter(std::ostream& os) : os_(os) {}

  void line(const std::string& key, const std::string& value);
  void real(const std::string& key, double value);
  void integer(const std::string& key, std::uint64_t value);
  /// "<key> <n> v0 v1 ..." on one line.
  void tensor(const std::string& key, const Tensor& t);

 private:
  std::ostream& os_;
};

class CheckpointReader {
 public:
  explicit CheckpointReader(std::istream& is) : is_(is) {}

  /// Reads the next line, requires its first token to equal `key`, returns
  /// the remainder.
  std::string line(const std::string& key);
  double real(const std::string& key);
  std::uint64_t integer(const std::string& key);
  /// Reads values into `t`, which fixes the expected element count.
  void tensor(const std::string& key, Tensor& t);

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

}  // namespace apollo
