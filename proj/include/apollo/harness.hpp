// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded training loops, CSV traces, JSON summaries, and sweeps.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apollo/config.hpp"
#include "apollo/objectives.hpp"
#include "apollo/optimizer.hpp"

namespace apollo {

/// Exact header line of every trace file.
inline constexpr const char* kTraceHeader = "step,loss,effective_lr,grad_norm,elapsed_ms";

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "APOLLO_OUTPUT_ROOT";

/// One trace row. Row k > 0 describes the state after k updates together
/// with the stepsize and pre-clip gradient norm of update k. Row 0 holds the
/// initial loss, effective_lr = 0, and the full-gradient norm at the start.
/// A diverged run ends with a row whose loss and grad_norm are NaN.
struct TrainRecord {
  std::uint64_t step = 0;
  double loss = 0.0;
  double effective_lr = 0.0;
  double grad_norm = 0.0;
  double elapsed_ms = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<TrainRecord> trace;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double best_loss = 0.0;
  std::optional<std::uint64_t> steps_to_threshold;  // first step with loss <= threshold
  bool diverged = false;
  std::optional<std::uint64_t> diverged_at;
  std::string divergence_reason;
  std::vector<Tensor> final_params;
};

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1); 0 for one value
};

Stat mean_stddev(const std::vector<double>& values);

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<RunResult> runs;
  Stat final_loss;
  Stat best_loss;
  /// Over seeds; unset unless every seed reached the threshold.
  std::optional<Stat> steps_to_threshold;
  bool diverged = false;
};

/// Hooks into the loop, mainly for tests and verification.
struct RunObserver {
  virtual ~RunObserver() = default;
  /// Called after every optimizer step with the updated parameters.
  virtual void after_step(std::uint64_t step, const std::vector<Tensor>& params,
                          const Optimizer& optimizer) = 0;
};

/// Draws minibatches as consecutive slices of a per-epoch shuffled order.
class EpochSampler {
 public:
  EpochSampler(std::size_t num_examples, std::size_t batch_size);
  /// Empty result means "use every example".
  std::vector<std::size_t> next(Rng& rng);

 private:
  std::size_t batch_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// One seeded run, no file output. Divergence (non-finite loss or gradient)
/// stops the loop and is reported in the result rather than thrown.
RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed,
                     RunObserver* observer = nullptr);

/// cfg.repeat runs with seeds cfg.seed, cfg.seed + 1, ...
ExperimentSummary run_repeats(const ExperimentConfig& cfg);

/// run_repeats, then writes into `out_dir`: trace_seed<S>.csv per seed,
/// summary.json, and config.txt (the resolved config).
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir);

void write_trace(std::ostream& os, const std::vector<TrainRecord>& trace);
std::vector<TrainRecord> read_trace(std::istream& is);
/// Trace text without the timing column, for determinism comparisons.
std::string trace_without_timing(const std::vector<TrainRecord>& trace);

std::string summary_json(const ExperimentSummary& summary);

struct SweepRow {
  std::string value;
  ExperimentConfig config;
  ExperimentSummary summary;
};

/// One sub-run per value. Axis "lr" sets the stepsize to each value and
/// "lr_scale" multiplies the configured stepsize by it; both rescale weight
/// decay so weight_decay * lr stays at its configured product. Any other
/// axis must be a config key and is set verbatim. Values run in parallel.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values);

/// Writes sweep.csv plus one sub-directory per value under `out_dir`.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                                const std::vector<std::string>& values,
                                const std::filesystem::path& out_dir);

std::string sweep_table(const std::string& axis, const std::vector<SweepRow>& rows);

/// `explicit_out` if set, else $APOLLO_OUTPUT_ROOT/<name>, else runs/<name>.
std::filesystem::path output_dir(const std::optional<std::string>& explicit_out,
                                 const std::string& name);

}  // namespace apollo
