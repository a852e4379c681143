// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "apollo/kernels.hpp"

namespace apollo {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles. The shape is metadata; all arithmetic in
/// the library treats a tensor as a flat vector.
class Tensor {
 public:
  /// Zero-filled tensor. Throws ShapeError if any extent is zero or the shape
  /// is empty.
  explicit Tensor(Shape shape);
  /// Throws ShapeError unless product(shape) == data.size().
  Tensor(Shape shape, std::vector<double> data);
  /// 1-D tensor from literal values.
  Tensor(std::initializer_list<double> values);

  static Tensor zeros(const Shape& shape) { return Tensor(shape); }
  static Tensor full(const Shape& shape, double value);
  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  void fill(double value);

  // In-place updates.
  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double factor);
  /// this += alpha * x
  Tensor& axpy(double alpha, const Tensor& x);

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Throws ShapeError naming both shapes unless a and b have the same shape.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

/// Binary ops require equal shapes. kDiv throws DivisionByZeroError if any
/// element of b is exactly zero.
Tensor elementwise(kernels::BinaryOp op, const Tensor& a, const Tensor& b);
/// Tensor-vs-scalar; the only broadcasting the library supports.
Tensor elementwise(kernels::BinaryOp op, const Tensor& a, double b);
Tensor elementwise(kernels::UnaryOp op, const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor maximum(const Tensor& a, const Tensor& b);
Tensor maximum(const Tensor& a, double floor);
Tensor abs(const Tensor& a);
Tensor square(const Tensor& a);
Tensor scaled(const Tensor& a, double factor);

double dot(const Tensor& a, const Tensor& b);
/// Sum of a_i^4, i.e. the 4-norm raised to the fourth power.
double norm4_pow4(const Tensor& a);
double l2_norm(const Tensor& a);
double max_abs(const Tensor& a);
bool all_finite(const Tensor& a);

/// Euclidean norm over a list of tensors, as if concatenated.
double global_l2_norm(std::span<const Tensor> tensors);

}  // namespace apollo
