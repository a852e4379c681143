// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "apollo/config.hpp"
#include "apollo/error.hpp"
#include "apollo/harness.hpp"

using namespace apollo;
namespace fs = std::filesystem;

namespace {

ExperimentConfig make(std::initializer_list<std::pair<const std::string, std::string>> kv) {
  return resolve(KeyValues(kv));
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("apollo-harness-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("trace rows") {
  const auto cfg = make({{"objective", "quadratic"}, {"h_diag", "1,10"}, {"lr", "0.1"},
                         {"steps", "95"}, {"log_every", "10"}});
  const RunResult r = run_single(cfg, 1);
  REQUIRE_FALSE(r.diverged);
  CHECK(r.trace.front().step == 0);
  CHECK(r.trace.front().loss == doctest::Approx(5.5));
  CHECK(r.trace.front().effective_lr == 0.0);
  CHECK(r.trace.back().step == 95);
  CHECK(r.trace.size() == 11);  // 0, 10, ..., 90, 95
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].step > r.trace[i - 1].step);
    CHECK(r.trace[i].effective_lr == 0.1);
  }
  CHECK(r.final_loss == r.trace.back().loss);
}

TEST_CASE("quadratic bowl converges") {
  const auto cfg = make({{"objective", "quadratic"}, {"h_diag", "1,10"}, {"lr", "0.1"},
                         {"steps", "500"}, {"log_every", "1"}, {"loss_threshold", "1e-10"}});
  const RunResult r = run_single(cfg, 1);
  REQUIRE_FALSE(r.diverged);
  CHECK(r.final_loss < 1e-10);
  REQUIRE(r.steps_to_threshold.has_value());
}

TEST_CASE("bowl loss never rises after warmup in the calibrated lr range") {
  // lr 0.1 overshoots (the moving average carries momentum); 0.01..0.02
  // with a 100-step warmup is monotone.
  for (const char* lr : {"0.01", "0.015", "0.02"}) {
    CAPTURE(lr);
    const auto cfg = make({{"objective", "quadratic"}, {"h_diag", "1,10"}, {"lr", lr},
                           {"warmup_steps", "100"}, {"warmup_start", "1e-4"},
                           {"steps", "1000"}, {"log_every", "1"}});
    const RunResult r = run_single(cfg, 1);
    REQUIRE_FALSE(r.diverged);
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      if (r.trace[i].step > 100) CHECK(r.trace[i].loss <= r.trace[i - 1].loss);
  }
}

TEST_CASE("saddle escapes below -1") {
  const auto cfg = make({{"objective", "saddle"}, {"steps", "2000"}, {"loss_threshold", "-1"}});
  const RunResult r = run_single(cfg, 1);
  CHECK_FALSE(r.diverged);
  CHECK(r.best_loss < -1.0);
}

TEST_CASE("divergence ends the trace with a marker row") {
  const auto cfg = make({{"objective", "rosenbrock"}, {"lr", "0.5"}, {"steps", "2000"}});
  const RunResult r = run_single(cfg, 1);
  REQUIRE(r.diverged);
  REQUIRE(r.diverged_at.has_value());
  CHECK(std::isnan(r.trace.back().loss));
  CHECK(std::isnan(r.trace.back().grad_norm));
  CHECK(r.trace.back().step == *r.diverged_at);
  CHECK_FALSE(r.divergence_reason.empty());
}

TEST_CASE("runs are deterministic") {
  const auto cfg = make({{"objective", "mlp"}, {"batch_size", "16"}, {"steps", "60"},
                         {"lr", "1"}, {"log_every", "1"}, {"repeat", "2"}});
  const RunResult a = run_single(cfg, 4);
  const RunResult b = run_single(cfg, 4);
  const RunResult c = run_single(cfg, 5);
  CHECK(trace_without_timing(a.trace) == trace_without_timing(b.trace));
  CHECK(trace_without_timing(a.trace) != trace_without_timing(c.trace));
}

TEST_CASE("epoch sampler covers every example once per epoch") {
  EpochSampler s(10, 3);
  Rng rng(2);
  std::multiset<std::size_t> seen;
  for (int k = 0; k < 4; ++k)
    for (std::size_t i : s.next(rng)) seen.insert(i);
  CHECK(seen.size() == 12);
  // The first ten draws form a permutation.
  EpochSampler fresh(10, 5);
  Rng r2(3);
  std::set<std::size_t> first;
  for (int k = 0; k < 2; ++k)
    for (std::size_t i : fresh.next(r2)) first.insert(i);
  CHECK(first.size() == 10);
  EpochSampler full(10, 0);
  CHECK(full.next(rng).empty());
}

TEST_CASE("experiment output and summary statistics") {
  const fs::path dir = scratch_dir("experiment");
  const auto cfg = make({{"name", "bowl"}, {"objective", "quadratic"}, {"h_diag", "1,4"},
                         {"noise", "0.05"}, {"lr", "0.05"}, {"steps", "200"}, {"repeat", "3"},
                         {"loss_threshold", "1e-3"}});
  const ExperimentSummary s = run_experiment(cfg, dir);
  REQUIRE(s.runs.size() == 3);
  CHECK(s.runs[1].seed == cfg.seed + 1);

  std::vector<double> finals;
  for (const RunResult& r : s.runs) {
    std::ifstream in(dir / ("trace_seed" + std::to_string(r.seed) + ".csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == kTraceHeader);
    in.seekg(0);
    const auto trace = read_trace(in);
    finals.push_back(trace.back().loss);
  }
  const Stat st = mean_stddev(finals);
  CHECK(s.final_loss.mean == st.mean);
  CHECK(s.final_loss.stddev == st.stddev);

  std::ifstream js(dir / "summary.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["final_loss"]["mean"].get<double>() == st.mean);
  CHECK(j["runs"].size() == 3);
  CHECK(j["config"]["name"] == "bowl");

  std::ifstream ct(dir / "config.txt");
  std::stringstream text;
  text << ct.rdbuf();
  CHECK(resolve(parse_key_values(text.str())).objective.h_diag == std::vector<double>{1.0, 4.0});
  fs::remove_all(dir);
}

TEST_CASE("mean and sample standard deviation") {
  const Stat s = mean_stddev({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(mean_stddev({7.0}).stddev == 0.0);
}

TEST_CASE("trace files round-trip") {
  std::vector<TrainRecord> t{{0, 1.5, 0.0, 2.0, 0.0}, {10, 0.25, 0.1, 0.5, 1.25}};
  std::stringstream ss;
  write_trace(ss, t);
  const auto back = read_trace(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].loss == 0.25);
  CHECK(back[1].effective_lr == 0.1);
  std::stringstream bad("step,loss\n1,2\n");
  CHECK_THROWS_AS((void)read_trace(bad), FormatError);
}

TEST_CASE("sweeps") {
  const auto cfg = make({{"objective", "quadratic"}, {"h_diag", "1,4"}, {"lr", "0.1"},
                         {"steps", "100"}, {"weight_decay", "1e-3"}});
  SUBCASE("lr axis keeps weight_decay * lr constant") {
    const auto rows = sweep(cfg, "lr_scale", {"0.2", "1", "2", "10"});
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows)
      CHECK(r.config.optimizer.weight_decay * r.config.optimizer.lr ==
            doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(rows[3].config.optimizer.lr == doctest::Approx(1.0));
    const auto direct = sweep(cfg, "lr", {"0.05"});
    CHECK(direct[0].config.optimizer.weight_decay == doctest::Approx(2e-3));
  }
  SUBCASE("single value equals a plain run") {
    const auto rows = sweep(cfg, "seed", {"1"});
    const RunResult r = run_single(cfg, 1);
    CHECK(trace_without_timing(rows[0].summary.runs[0].trace) == trace_without_timing(r.trace));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS((void)sweep(cfg, "lr", {}), ConfigError);
    CHECK_THROWS_AS((void)sweep(cfg, "colour", {"red"}), ConfigError);
    CHECK_THROWS_AS((void)sweep(cfg, "lr", {"fast"}), ConfigError);
  }
  SUBCASE("table") {
    const fs::path dir = scratch_dir("sweep");
    const auto rows = run_sweep(cfg, "lr_scale", {"0.5", "1"}, dir);
    std::ifstream in(dir / "sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("lr_scale,", 0) == 0);
    CHECK(fs::exists(dir / "lr_scale_0.5" / "summary.json"));
    fs::remove_all(dir);
  }
}

TEST_CASE("lr robustness band on synthetic classification") {
  // Apollo's final loss stays within a narrow band for 0.2x..2x of its
  // tuned stepsize; the band is the calibrated spread with slack.
  const auto cfg = make({{"objective", "mlp"}, {"classes", "4"}, {"separation", "0.7"},
                         {"lr", "2"}, {"warmup_steps", "50"}, {"warmup_start", "0.04"},
                         {"batch_size", "32"}, {"steps", "800"}, {"log_every", "100"},
                         {"weight_decay", "2.5e-5"}});
  const auto rows = sweep(cfg, "lr_scale", {"0.2", "1", "2"});
  double lo = 1e9, hi = 0.0;
  for (const auto& r : rows) {
    REQUIRE_FALSE(r.summary.diverged);
    lo = std::min(lo, r.summary.final_loss.mean);
    hi = std::max(hi, r.summary.final_loss.mean);
  }
  MESSAGE("final loss band [" << lo << ", " << hi << "]");
  CHECK(hi - lo <= 0.25);
}

TEST_CASE("output directory resolution") {
  CHECK(output_dir(std::string("x/y"), "run") == fs::path("x/y"));
  ::setenv(kOutputRootEnv, "/tmp/apollo-root", 1);
  CHECK(output_dir(std::nullopt, "run") == fs::path("/tmp/apollo-root/run"));
  ::unsetenv(kOutputRootEnv);
  CHECK(output_dir(std::nullopt, "run") == fs::path("runs/run"));
}
