// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "apollo/apollo.hpp"
#include "apollo/baselines.hpp"
#include "apollo/error.hpp"
#include "apollo/objectives.hpp"
#include "test_util.hpp"

using namespace apollo;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ApolloConfig exact_cfg() {
  ApolloConfig c;
  c.eps = 0.0;
  return c;
}

}  // namespace

TEST_CASE("ema_update examples") {
  const Tensor g{0.3, -2.0, 7.5};
  CHECK(ema_update(Tensor(Shape{3}), g, 0.9, 0) == g);

  Tensor m(Shape{3});
  for (std::uint64_t t = 0; t < 200; ++t) {
    m = ema_update(m, g, 0.9, t);
    REQUIRE(m == g);
  }

  const Tensor m1 = ema_update(Tensor{0.0}, Tensor{1.0}, 0.9, 0);
  const Tensor m2 = ema_update(m1, Tensor{2.0}, 0.9, 1);
  CHECK(m2[0] == doctest::Approx(0.29 / 0.19).epsilon(1e-15));
  CHECK(m2[0] == doctest::Approx(1.5263158).epsilon(1e-7));

  CHECK_THROWS_AS((void)ema_update(m, g, 1.0, 0), ConfigError);
  CHECK_THROWS_AS((void)ema_update(m, g, 0.0, 0), ConfigError);
  CHECK_THROWS_AS((void)ema_update(m, Tensor{1.0}, 0.5, 0), ShapeError);
}

TEST_CASE("moving-average weights sum to one") {
  for (double beta : {0.1, 0.5, 0.9, 0.999}) {
    for (int t = 1; t <= 60; ++t) {
      double total = 0.0;
      for (int i = 1; i <= t; ++i) total += std::pow(beta, t - i) * (1.0 - beta);
      CHECK(total / (1.0 - std::pow(beta, t)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("compute_alpha examples") {
  const Tensor zero(Shape{2});
  CHECK(compute_alpha(zero, Tensor{3.0, -1.0}, Tensor{5.0, 2.0}, 1e-4) == 0.0);
  CHECK(compute_alpha(zero, Tensor{3.0, -1.0}, Tensor{5.0, 2.0}, 0.0) == 0.0);

  const Tensor d{1.0, 2.0};
  const Tensor y{0.5, -1.0};
  const Tensor b{0.2, 0.3};
  const double alpha = compute_alpha(d, y, b, 0.0);
  CHECK(alpha == doctest::Approx(-1.0 / 170.0).epsilon(1e-14));

  // eps is added to the 4-norm, then raised to the fourth power.
  const double eps = 0.1;
  const double want = (-1.5 + 1.4) / std::pow(std::pow(17.0, 0.25) + eps, 4.0);
  CHECK(compute_alpha(d, y, b, eps) == doctest::Approx(want).epsilon(1e-14));
  CHECK(compute_alpha(d, y, b, eps) != doctest::Approx(-0.1 / 17.1));
}

TEST_CASE("property: alpha homogeneity under (d/c, cB)") {
  test::Gen g(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = test::random_dim(g, 1, 16);
    const Tensor d = test::random_tensor(g, n);
    const Tensor y = test::random_tensor(g, n);
    const Tensor b = test::random_tensor(g, n, 2.0);
    const double c = std::pow(10.0, test::uniforms(g, 1, -2.0, 2.0)[0]);
    const double a1 = compute_alpha(d, y, b, 0.0);
    const double a2 = compute_alpha(scaled(d, 1.0 / c), y, scaled(b, c), 0.0);
    // Numerator scales by 1/c, the 4-norm term by 1/c^4.
    const double d4 = norm4_pow4(d);
    const double scale = (std::fabs(dot(d, y)) + std::fabs(dot(d, mul(b, d)))) / d4;
    CHECK(std::fabs(a2 - c * c * c * a1) <= 1e-12 * c * c * c * scale);
    // So the corrected diagonal scales by c.
    const Tensor b1 = update_diagonal(b, a1, d);
    const Tensor b2 = update_diagonal(scaled(b, c), a2, scaled(d, 1.0 / c));
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::fabs(b2[i] - c * b1[i]) <= 1e-12 * c * (std::fabs(b[i]) + scale * d[i] * d[i]));
  }
}

TEST_CASE("update_diagonal examples") {
  const Tensor b{0.2, 0.3};
  const Tensor d{1.0, 2.0};
  CHECK(update_diagonal(b, 0.0, d) == b);
  const Tensor next = update_diagonal(b, -1.0 / 170.0, d);
  CHECK(next[0] == doctest::Approx(0.2058824).epsilon(1e-6));
  CHECK(next[1] == doctest::Approx(0.3235294).epsilon(1e-6));
  CHECK(dot(d, mul(next, d)) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("rectify examples") {
  CHECK(rectify(Tensor{-2.0, 0.5, 0.0}, 1.0) == Tensor{2.0, 1.0, 1.0});
  CHECK(rectify(Tensor(Shape{3}), 0.25) == Tensor::full({3}, 0.25));
  test::Gen g(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor b = test::random_tensor(g, 9, 3.0);
    CHECK(rectify(b, 0.7) == rectify(scaled(b, -1.0), 0.7));
  }
}

TEST_CASE("apollo_step base cases") {
  ApolloConfig cfg;
  cfg.sigma = 2.0;
  SUBCASE("zero gradients never move theta") {
    Tensor theta{1.0, -3.0};
    ApolloState st(theta.shape());
    for (int k = 0; k < 20; ++k) apollo_step(theta, Tensor(Shape{2}), st, cfg, 0.5);
    CHECK(theta == Tensor{1.0, -3.0});
    CHECK(st.m == Tensor(Shape{2}));
    CHECK(st.d == Tensor(Shape{2}));
    CHECK(st.step == 20);
  }
  SUBCASE("first step from zero state is an SGD step scaled by 1/sigma") {
    Tensor theta{1.0, -3.0};
    ApolloState st(theta.shape());
    CHECK(st.hess == Tensor(Shape{2}));
    const Tensor g{0.4, -1.0};
    apollo_step(theta, g, st, cfg, 0.5);
    CHECK(theta[0] == 1.0 - 0.5 * 0.4 / 2.0);
    CHECK(theta[1] == -3.0 + 0.5 * 1.0 / 2.0);
    CHECK(st.hess == Tensor(Shape{2}));
    CHECK(st.step == 1);
  }
}

TEST_CASE("apollo_step rejects bad input before touching state") {
  Tensor theta{1.0, 2.0};
  ApolloState st(theta.shape());
  ApolloConfig cfg;
  apollo_step(theta, Tensor{0.1, 0.2}, st, cfg, 0.1);
  const Tensor theta_before = theta;
  const Tensor m_before = st.m;
  try {
    apollo_step(theta, Tensor{kNaN, 0.2}, st, cfg, 0.1);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.step() == 2);
  }
  CHECK(theta == theta_before);
  CHECK(st.m == m_before);
  CHECK(st.step == 1);
  CHECK_THROWS_AS(apollo_step(theta, Tensor{1.0}, st, cfg, 0.1), ShapeError);
}

TEST_CASE("config validation") {
  ApolloConfig c;
  CHECK_NOTHROW(validate(c));
  c.eps = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.beta = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.sigma = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.eta = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.weight_decay = -1e-3;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("property: weak secant identity and direction bound") {
  test::Gen g(33);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_dim(g, 1, 64);
    ApolloState st({n});
    st.m = test::random_tensor(g, n);
    st.d = test::random_tensor(g, n);
    st.hess = test::random_tensor(g, n, 3.0);
    st.step = 5;
    const Tensor d0 = st.d;
    const Tensor m0 = st.m;
    Tensor theta = test::random_tensor(g, n);
    ApolloConfig cfg = exact_cfg();
    cfg.sigma = 0.5;
    apollo_step(theta, test::random_tensor(g, n), st, cfg, 0.1);
    const double lhs = dot(d0, mul(st.hess, d0));
    const double rhs = -dot(d0, sub(st.m, m0));
    CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(std::fabs(rhs), 1.0));
    CHECK(max_abs(st.d) <= max_abs(st.m) / cfg.sigma);
  }
}

TEST_CASE("property: eps-guarded step leaves a bounded secant residual") {
  test::Gen g(34);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = test::random_dim(g, 2, 32);
    ApolloState st({n});
    st.m = test::random_tensor(g, n);
    st.d = test::random_tensor(g, n);
    st.hess = test::random_tensor(g, n);
    st.step = 3;
    const Tensor d0 = st.d;
    const Tensor m0 = st.m;
    const Tensor b0 = st.hess;
    Tensor theta = test::random_tensor(g, n);
    apollo_step(theta, test::random_tensor(g, n), st, ApolloConfig{}, 0.1);
    const double lhs = dot(d0, mul(st.hess, d0));
    const double rhs = -dot(d0, sub(st.m, m0));
    // The residual is the secant gap times 1 - (|d|_4 / (|d|_4 + eps))^4.
    const double gap = std::fabs(lhs - rhs);
    const double num = std::fabs(dot(d0, mul(b0, d0)) - rhs);
    const double q = std::pow(norm4_pow4(d0), 0.25);
    const double shrink = 1.0 - std::pow(q / (q + ApolloConfig{}.eps), 4.0);
    const double scale = std::fabs(rhs) + std::fabs(lhs) + num;
    CHECK(gap <= num * shrink * (1.0 + 1e-6) + 1e-12 * scale);
    CHECK(shrink < 1e-2);
  }
}

TEST_CASE("one-dimensional quadratic: curvature estimate approaches lr * h") {
  // A negligible moving average makes y a pure gradient difference.
  for (double h : {1.0, 10.0, 100.0}) {
    ApolloConfig cfg = exact_cfg();
    cfg.beta = 1e-6;
    cfg.sigma = 0.01 * h;
    const double lr = 1.0;
    Tensor theta{1.0};
    ApolloState st(theta.shape());
    std::vector<double> err;
    for (int k = 0; k < 3; ++k) {
      apollo_step(theta, Tensor{h * theta[0]}, st, cfg, lr);
      err.push_back(std::fabs(st.hess[0] - lr * h));
    }
    CHECK(err[1] < err[0]);
    CHECK(err[1] <= 0.1 * h);
    CHECK(err[2] <= 0.1 * h);
  }
}

TEST_CASE("noise-free bowl: per-coordinate groups recover H_diag") {
  const Tensor h{1.0, 100.0};
  ApolloConfig cfg = exact_cfg();
  cfg.beta = 1e-6;
  cfg.sigma = 0.01;
  std::vector<Tensor> params{Tensor{1.0}, Tensor{1.0}};
  std::vector<ApolloState> states{ApolloState({1}), ApolloState({1})};
  Rng rng(3);
  for (int k = 0; k < 3; ++k) {
    const Evaluation e = quadratic_bowl(Tensor{params[0][0], params[1][0]}, h, 0.0, rng);
    const std::vector<Tensor> grads{Tensor{e.grads[0][0]}, Tensor{e.grads[0][1]}};
    apply_per_group(params, grads, states, cfg, 1.0);
  }
  CHECK(std::fabs(states[0].hess[0] - 1.0) <= 0.1);
  CHECK(std::fabs(states[1].hess[0] - 100.0) <= 10.0);
}

TEST_CASE("weight decay modes") {
  const Tensor g{0.5, -0.25};
  SUBCASE("coupled adds gamma * theta to the gradient") {
    ApolloConfig a;
    a.weight_decay = 0.1;
    ApolloConfig plain;
    Tensor t1{1.0, 2.0}, t2{1.0, 2.0};
    ApolloState s1({2}), s2({2});
    for (int k = 0; k < 4; ++k) {
      const Tensor coupled = add(g, scaled(t2, 0.1));
      apollo_step(t1, g, s1, a, 0.05);
      apollo_step(t2, coupled, s2, plain, 0.05);
      CHECK(test::max_rel(t1.values(), t2.values()) <= 1e-15);
    }
  }
  SUBCASE("decoupled shrinks theta outside the preconditioner") {
    ApolloConfig a;
    a.weight_decay = 0.1;
    a.weight_decay_mode = WeightDecayMode::kDecoupled;
    ApolloConfig plain;
    Tensor t1{1.0, 2.0}, t2{1.0, 2.0};
    ApolloState s1({2}), s2({2});
    for (int k = 0; k < 4; ++k) {
      const Tensor before = t2;
      apollo_step(t1, g, s1, a, 0.05);
      apollo_step(t2, g, s2, plain, 0.05);
      t2.axpy(-0.05 * 0.1, before);
      CHECK(test::max_rel(t1.values(), t2.values()) <= 1e-15);
    }
  }
}

TEST_CASE("apply_per_group") {
  test::Gen g(35);
  ApolloConfig cfg;
  SUBCASE("count mismatch") {
    std::vector<Tensor> p{Tensor{1.0}};
    std::vector<Tensor> gr{Tensor{1.0}, Tensor{2.0}};
    std::vector<ApolloState> st{ApolloState({1})};
    CHECK_THROWS_AS(apply_per_group(p, gr, st, cfg, 0.1), ShapeError);
  }
  SUBCASE("non-finite gradient names its group") {
    std::vector<Tensor> p{Tensor{1.0}, Tensor{1.0}};
    std::vector<Tensor> gr{Tensor{1.0}, Tensor{kNaN}};
    std::vector<ApolloState> st{ApolloState({1}), ApolloState({1})};
    try {
      apply_per_group(p, gr, st, cfg, 0.1);
      FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
      CHECK(e.group() == 1);
      CHECK(e.step() == 1);
    }
    CHECK(p[0] == Tensor{1.0});
  }
  SUBCASE("single group equals apollo_step") {
    Tensor a = test::random_tensor(g, 6);
    std::vector<Tensor> p{a};
    ApolloState sa(a.shape());
    std::vector<ApolloState> sp{ApolloState(a.shape())};
    for (int k = 0; k < 10; ++k) {
      const Tensor grad = test::random_tensor(g, 6);
      apollo_step(a, grad, sa, cfg, 0.1);
      apply_per_group(p, std::vector<Tensor>{grad}, sp, cfg, 0.1);
      CHECK(p[0] == a);
    }
  }
  SUBCASE("group order is irrelevant") {
    std::vector<Tensor> p{test::random_tensor(g, 3), test::random_tensor(g, 5)};
    std::vector<Tensor> q{p[1], p[0]};
    std::vector<ApolloState> sp{ApolloState({3}), ApolloState({5})};
    std::vector<ApolloState> sq{ApolloState({5}), ApolloState({3})};
    for (int k = 0; k < 10; ++k) {
      const Tensor g0 = test::random_tensor(g, 3);
      const Tensor g1 = test::random_tensor(g, 5);
      apply_per_group(p, std::vector<Tensor>{g0, g1}, sp, cfg, 0.1);
      apply_per_group(q, std::vector<Tensor>{g1, g0}, sq, cfg, 0.1);
      CHECK(p[0] == q[1]);
      CHECK(p[1] == q[0]);
    }
  }
  SUBCASE("two groups differ from one concatenated group after step 2") {
    const Tensor h{1.0, 4.0, 9.0, 16.0};
    cfg.sigma = 0.01;  // let B clear the floor so alpha matters
    std::vector<Tensor> split{Tensor{1.0, 1.0}, Tensor{1.0, 1.0}};
    std::vector<Tensor> joint{Tensor{1.0, 1.0, 1.0, 1.0}};
    std::vector<ApolloState> ss{ApolloState({2}), ApolloState({2})};
    std::vector<ApolloState> sj{ApolloState({4})};
    auto grad_of = [&](const std::vector<double>& x) {
      std::vector<double> out(4);
      for (int i = 0; i < 4; ++i) out[i] = h[i] * x[i];
      return out;
    };
    std::vector<double> diffs;
    for (int k = 0; k < 3; ++k) {
      const std::vector<double> xs{split[0][0], split[0][1], split[1][0], split[1][1]};
      const auto gs = grad_of(xs);
      apply_per_group(split, std::vector<Tensor>{Tensor{gs[0], gs[1]}, Tensor{gs[2], gs[3]}},
                      ss, cfg, 0.05);
      const auto gj = grad_of(joint[0].values());
      apply_per_group(joint, std::vector<Tensor>{Tensor({4}, gj)}, sj, cfg, 0.05);
      const std::vector<double> now{split[0][0], split[0][1], split[1][0], split[1][1]};
      diffs.push_back(test::max_rel(now, joint[0].values()));
    }
    CHECK(diffs[0] == 0.0);  // first update: B = 0, D = sigma either way
    CHECK(diffs[1] > 1e-6);
    CHECK(diffs[2] > 1e-6);
  }
  SUBCASE("parallel group loop equals the serial per-group loop") {
    const std::size_t big = kernels::kParallelThreshold;
    std::vector<Tensor> p{test::random_tensor(g, big), test::random_tensor(g, 17),
                          test::random_tensor(g, big / 2)};
    std::vector<Tensor> q = p;
    std::vector<ApolloState> sp, sq;
    for (const Tensor& t : p) {
      sp.emplace_back(t.shape());
      sq.emplace_back(t.shape());
    }
    for (int k = 0; k < 3; ++k) {
      std::vector<Tensor> grads;
      for (const Tensor& t : p) grads.push_back(test::random_tensor(g, t.size()));
      apply_per_group(p, grads, sp, cfg, 0.1);
      for (std::size_t i = 0; i < q.size(); ++i) apollo_step(q[i], grads[i], sq[i], cfg, 0.1);
    }
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == q[i]);
  }
}

TEST_CASE("optimizer checkpoint round-trip resumes bitwise") {
  test::Gen g(36);
  const std::vector<Shape> layout{{3}, {2, 2}};
  ApolloConfig cfg;
  cfg.weight_decay = 1e-3;
  ApolloOptimizer a(layout, cfg);
  a.set_clip_norm(5.0);
  std::vector<Tensor> p{test::random_tensor(g, 3), Tensor({2, 2}, test::normals(g, 4))};
  auto grads = [&] {
    return std::vector<Tensor>{test::random_tensor(g, 3), Tensor({2, 2}, test::normals(g, 4))};
  };
  for (int k = 0; k < 5; ++k) a.step(p, grads(), 0.1);

  std::stringstream ss;
  a.save(ss);
  const std::string text = ss.str();
  ApolloOptimizer b(layout, ApolloConfig{});
  b.load(ss);
  CHECK(b.steps() == 5);
  CHECK(b.clip_norm() == 5.0);
  CHECK(b.config().weight_decay == 1e-3);
  std::stringstream again;
  b.save(again);
  CHECK(again.str() == text);

  std::vector<Tensor> q = p;
  for (int k = 0; k < 5; ++k) {
    const auto gr = grads();
    a.step(p, gr, 0.1);
    b.step(q, gr, 0.1);
  }
  CHECK(p == q);

  SUBCASE("rejects other layouts and optimizers") {
    std::stringstream s1(text);
    ApolloOptimizer wrong({{3}}, ApolloConfig{});
    CHECK_THROWS_AS(wrong.load(s1), FormatError);
    std::stringstream s2(text);
    SgdOptimizer sgd(layout, SgdConfig{});
    CHECK_THROWS_AS(sgd.load(s2), FormatError);
    std::stringstream s3("not-a-checkpoint 1\n");
    CHECK_THROWS_AS(b.load(s3), FormatError);
  }
}
