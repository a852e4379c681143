// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/tensor.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "apollo/error.hpp"

namespace apollo {

using kernels::BinaryOp;
using kernels::UnaryOp;

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {

void check_extents(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
  for (std::size_t e : shape)
    if (e == 0) throw ShapeError("tensor extents must be positive, got " + shape_string(shape));
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_numel(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (shape_numel(shape_) != data_.size())
    throw ShapeError("shape " + shape_string(shape_) + " does not hold " +
                     std::to_string(data_.size()) + " values");
}

Tensor::Tensor(std::initializer_list<double> values)
    : Tensor(Shape{values.size()}, std::vector<double>(values)) {}

Tensor Tensor::full(const Shape& shape, double value) {
  Tensor t(shape);
  t.fill(value);
  return t;
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(*this, other, "add");
  kernels::binary(BinaryOp::kAdd, data_, other.data_, data_);
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(*this, other, "sub");
  kernels::binary(BinaryOp::kSub, data_, other.data_, data_);
  return *this;
}

Tensor& Tensor::operator*=(double factor) {
  kernels::scale(factor, data_);
  return *this;
}

Tensor& Tensor::axpy(double alpha, const Tensor& x) {
  require_same_shape(*this, x, "axpy");
  kernels::axpy(alpha, x.data_, data_);
  return *this;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
}

Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "elementwise");
  if (op == BinaryOp::kDiv && kernels::count_zeros(b.data()) != 0)
    throw DivisionByZeroError("elementwise div: divisor contains zeros");
  Tensor out(a.shape());
  kernels::binary(op, a.data(), b.data(), out.data());
  return out;
}

Tensor elementwise(BinaryOp op, const Tensor& a, double b) {
  if (op == BinaryOp::kDiv && b == 0.0)
    throw DivisionByZeroError("elementwise div: scalar divisor is zero");
  Tensor out(a.shape());
  kernels::binary_scalar(op, a.data(), b, out.data());
  return out;
}

Tensor elementwise(UnaryOp op, const Tensor& a) {
  Tensor out(a.shape());
  kernels::unary(op, a.data(), out.data());
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::kAdd, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::kSub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::kMul, a, b); }
Tensor div(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::kDiv, a, b); }
Tensor maximum(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::kMax, a, b); }
Tensor maximum(const Tensor& a, double floor) { return elementwise(BinaryOp::kMax, a, floor); }
Tensor abs(const Tensor& a) { return elementwise(UnaryOp::kAbs, a); }
Tensor square(const Tensor& a) { return elementwise(UnaryOp::kSquare, a); }
Tensor scaled(const Tensor& a, double factor) { return elementwise(BinaryOp::kMul, a, factor); }

double dot(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "dot");
  return kernels::dot(a.data(), b.data());
}

double norm4_pow4(const Tensor& a) { return kernels::sum_pow4(a.data()); }

double l2_norm(const Tensor& a) { return std::sqrt(kernels::dot(a.data(), a.data())); }

double max_abs(const Tensor& a) { return kernels::max_abs(a.data()); }

bool all_finite(const Tensor& a) { return kernels::all_finite(a.data()); }

double global_l2_norm(std::span<const Tensor> tensors) {
  double sq = 0.0;
  for (const Tensor& t : tensors) sq += kernels::dot(t.data(), t.data());
  return std::sqrt(sq);
}

}  // namespace apollo
