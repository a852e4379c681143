// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "apollo/error.hpp"
#include "apollo/tensor.hpp"
#include "test_util.hpp"

using namespace apollo;

TEST_CASE("construction validates shape") {
  CHECK(Tensor(Shape{2, 3}).size() == 6);
  CHECK(Tensor(Shape{2, 3}) == Tensor::zeros({2, 3}));
  CHECK_THROWS_AS(Tensor(Shape{}), ShapeError);
  CHECK_THROWS_AS(Tensor(Shape{2, 0}), ShapeError);
  CHECK_THROWS_AS(Tensor(Shape{2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  CHECK(Tensor::full({3}, 1.5) == Tensor{1.5, 1.5, 1.5});
  CHECK(shape_string({2, 3}) == "[2,3]");
}

TEST_CASE("elementwise examples") {
  CHECK(abs(Tensor{-2.0, 0.5, 0.0}) == Tensor{2.0, 0.5, 0.0});
  CHECK(mul(Tensor{1.0, 2.0}, Tensor{3.0, 4.0}) == Tensor{3.0, 8.0});
  CHECK(maximum(Tensor{0.3, -5.0}, 1.0) == Tensor{1.0, 1.0});
  CHECK(add(Tensor{1.0, 2.0}, Tensor{0.5, 0.5}) == Tensor{1.5, 2.5});
  CHECK(sub(Tensor{1.0, 2.0}, Tensor{0.5, 0.5}) == Tensor{0.5, 1.5});
  CHECK(div(Tensor{1.0, 3.0}, Tensor{2.0, 4.0}) == Tensor{0.5, 0.75});
  CHECK(maximum(Tensor{1.0, -3.0}, Tensor{0.0, 2.0}) == Tensor{1.0, 2.0});
  CHECK(square(Tensor{-3.0, 0.5}) == Tensor{9.0, 0.25});
  CHECK(scaled(Tensor{1.0, -2.0}, 3.0) == Tensor{3.0, -6.0});
}

TEST_CASE("shape mismatch names both shapes") {
  const Tensor a(Shape{2});
  const Tensor b(Shape{3});
  try {
    (void)add(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2]") != std::string::npos);
    CHECK(what.find("[3]") != std::string::npos);
  }
  CHECK_THROWS_AS((void)dot(a, b), ShapeError);
  CHECK_THROWS_AS((void)mul(Tensor(Shape{2, 3}), Tensor(Shape{3, 2})), ShapeError);
}

TEST_CASE("division by zero is an error") {
  CHECK_THROWS_AS((void)div(Tensor{1.0, 2.0}, Tensor{1.0, 0.0}), DivisionByZeroError);
  CHECK_THROWS_AS((void)div(Tensor{1.0}, Tensor{-0.0}), DivisionByZeroError);
}

TEST_CASE("dot and norm4 examples") {
  CHECK(dot(Tensor{1.0, 2.0}, Tensor{0.5, -1.0}) == -1.5);
  CHECK(dot(Tensor{1.0, 2.0, 3.0}, Tensor(Shape{3})) == 0.0);
  CHECK(dot(Tensor{1.0, 2.0, 3.0}, Tensor{1.0, 2.0, 3.0}) == 14.0);
  CHECK(norm4_pow4(Tensor{1.0, 2.0}) == 17.0);
  CHECK(norm4_pow4(Tensor(Shape{4})) == 0.0);
  CHECK(norm4_pow4(Tensor{-1.0, 1.0}) == 2.0);
  CHECK(l2_norm(Tensor{3.0, 4.0}) == 5.0);
  CHECK(max_abs(Tensor{1.0, -7.0, 2.0}) == 7.0);
}

TEST_CASE("in-place updates") {
  Tensor t{1.0, 2.0};
  t += Tensor{1.0, 1.0};
  CHECK(t == Tensor{2.0, 3.0});
  t -= Tensor{0.5, 0.5};
  CHECK(t == Tensor{1.5, 2.5});
  t *= 2.0;
  CHECK(t == Tensor{3.0, 5.0});
  t.axpy(-1.0, Tensor{1.0, 1.0});
  CHECK(t == Tensor{2.0, 4.0});
  CHECK_THROWS_AS(t += Tensor{1.0}, ShapeError);
}

TEST_CASE("finiteness and global norm") {
  CHECK(all_finite(Tensor{1.0, 2.0}));
  CHECK_FALSE(all_finite(Tensor{1.0, std::numeric_limits<double>::quiet_NaN()}));
  CHECK_FALSE(all_finite(Tensor{std::numeric_limits<double>::infinity()}));
  const std::vector<Tensor> ts{Tensor{3.0}, Tensor{0.0, 4.0}};
  CHECK(global_l2_norm(ts) == 5.0);
}

TEST_CASE("property: dot, norm4, sign invariance") {
  test::Gen g(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_dim(g, 1, 40);
    const Tensor a = test::random_tensor(g, n, 3.0);
    CHECK(dot(a, a) > 0.0);

    double loop4 = 0.0;
    for (double v : a.data()) loop4 += (v * v) * (v * v);
    CHECK(test::rel_diff(norm4_pow4(a), loop4) <= 1e-14);
    CHECK(test::rel_diff(norm4_pow4(a), dot(square(a), square(a))) <= 1e-14);

    const Tensor neg = scaled(a, -1.0);
    CHECK(abs(a) == abs(neg));
    CHECK(square(a) == square(neg));
  }
  CHECK(dot(Tensor(Shape{5}), Tensor(Shape{5})) == 0.0);
}

TEST_CASE("property: finite inputs give finite outputs") {
  test::Gen g(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_dim(g, 1, 20);
    const Tensor a = test::random_tensor(g, n, 100.0);
    const Tensor b = add(abs(test::random_tensor(g, n)), Tensor::full({n}, 0.1));
    CHECK(all_finite(add(a, b)));
    CHECK(all_finite(mul(a, b)));
    CHECK(all_finite(div(a, b)));
    CHECK(all_finite(maximum(a, 1.0)));
  }
}
