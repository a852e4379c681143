// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "apollo/baselines.hpp"
#include "apollo/checkpoint.hpp"
#include "apollo/error.hpp"
#include "apollo/schedule.hpp"

namespace apollo {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", ms);
  return buf;
}

void write_row(std::ostream& os, const TrainRecord& r, bool with_time) {
  os << r.step << ',' << format_real(r.loss) << ',' << format_real(r.effective_lr) << ','
     << format_real(r.grad_norm);
  if (with_time) os << ',' << format_ms(r.elapsed_ms);
  os << '\n';
}

nlohmann::json stat_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

nlohmann::json optional_step(const std::optional<std::uint64_t>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

Stat mean_stddev(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (n - 1.0));
  }
  return s;
}

EpochSampler::EpochSampler(std::size_t num_examples, std::size_t batch_size)
    : batch_(batch_size >= num_examples ? 0 : batch_size), order_(num_examples) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  cursor_ = order_.size();  // forces a shuffle on first use
}

std::vector<std::size_t> EpochSampler::next(Rng& rng) {
  if (batch_ == 0) return {};
  if (cursor_ + batch_ > order_.size()) {
    // Fisher-Yates with rng-drawn indices, independent of std::shuffle's
    // implementation-specific draw pattern.
    for (std::size_t i = order_.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order_[i - 1], order_[j]);
    }
    cursor_ = 0;
  }
  std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_));
  cursor_ += batch_;
  return batch;
}

RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed, RunObserver* observer) {
  const auto objective = make_objective(cfg.objective);
  std::vector<Tensor> params = objective->initial_params(seed);
  const auto optimizer = make_optimizer(cfg.optimizer, objective->group_layout());
  Rng rng(seed);
  EpochSampler sampler(objective->num_examples(), cfg.batch_size);

  RunResult res;
  res.seed = seed;
  const auto started = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  };

  const double loss0 = objective->eval(params);
  const double gnorm0 = global_l2_norm(objective->full_gradient(params).grads);
  res.initial_loss = loss0;
  res.best_loss = loss0;
  res.final_loss = loss0;
  res.trace.push_back({0, loss0, 0.0, gnorm0, elapsed()});
  if (loss0 <= cfg.loss_threshold) res.steps_to_threshold = 0;
  if (!std::isfinite(loss0)) {
    res.diverged = true;
    res.diverged_at = 0;
    res.divergence_reason = "non-finite initial loss";
    return res;
  }

  for (std::uint64_t k = 1; k <= cfg.steps; ++k) {
    const std::vector<std::size_t> batch =
        objective->num_examples() > 0 ? sampler.next(rng) : std::vector<std::size_t>{};
    Evaluation ev = objective->gradient(params, batch, rng);
    const double gnorm = global_l2_norm(ev.grads);
    const double lr = lr_at(cfg.schedule, k - 1);

    double loss = kNaN;
    try {
      optimizer->step(params, ev.grads, lr);
      loss = objective->eval(params);
      if (!std::isfinite(loss)) res.divergence_reason = "non-finite loss at step " + std::to_string(k);
    } catch (const NonFiniteError& e) {
      res.divergence_reason = e.what();
    }
    if (!std::isfinite(loss)) {
      res.diverged = true;
      res.diverged_at = k;
      res.final_loss = kNaN;
      res.trace.push_back({k, kNaN, lr, kNaN, elapsed()});
      break;
    }

    if (observer) observer->after_step(k, params, *optimizer);
    res.final_loss = loss;
    res.best_loss = std::min(res.best_loss, loss);
    if (!res.steps_to_threshold && loss <= cfg.loss_threshold) res.steps_to_threshold = k;
    if (k % cfg.log_every == 0 || k == cfg.steps)
      res.trace.push_back({k, loss, lr, gnorm, elapsed()});
  }
  res.final_params = std::move(params);
  return res;
}

ExperimentSummary run_repeats(const ExperimentConfig& cfg) {
  ExperimentSummary sum;
  sum.config = cfg;
  for (std::size_t r = 0; r < cfg.repeat; ++r) sum.runs.push_back(run_single(cfg, cfg.seed + r));

  std::vector<double> finals;
  std::vector<double> bests;
  std::vector<double> reach;
  bool all_reached = true;
  for (const RunResult& run : sum.runs) {
    finals.push_back(run.final_loss);
    bests.push_back(run.best_loss);
    sum.diverged = sum.diverged || run.diverged;
    if (run.steps_to_threshold)
      reach.push_back(static_cast<double>(*run.steps_to_threshold));
    else
      all_reached = false;
  }
  sum.final_loss = mean_stddev(finals);
  sum.best_loss = mean_stddev(bests);
  if (all_reached) sum.steps_to_threshold = mean_stddev(reach);
  return sum;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExperimentSummary sum = run_repeats(cfg);
  for (const RunResult& run : sum.runs) {
    std::ostringstream os;
    write_trace(os, run.trace);
    write_file(out_dir / ("trace_seed" + std::to_string(run.seed) + ".csv"), os.str());
  }
  write_file(out_dir / "summary.json", summary_json(sum));
  write_file(out_dir / "config.txt", to_text(to_key_values(cfg)));
  return sum;
}

void write_trace(std::ostream& os, const std::vector<TrainRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const TrainRecord& r : trace) write_row(os, r, true);
}

std::vector<TrainRecord> read_trace(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader)
    throw FormatError("trace does not start with '" + std::string(kTraceHeader) + "'");
  std::vector<TrainRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      throw FormatError("trace line " + std::to_string(line_no) + ": expected 5 columns");
    TrainRecord r;
    try {
      r.step = static_cast<std::uint64_t>(std::stoull(cells[0]));
    } catch (const std::exception&) {
      throw FormatError("trace line " + std::to_string(line_no) + ": bad step");
    }
    r.loss = parse_real(cells[1]);
    r.effective_lr = parse_real(cells[2]);
    r.grad_norm = parse_real(cells[3]);
    r.elapsed_ms = parse_real(cells[4]);
    rows.push_back(r);
  }
  return rows;
}

std::string trace_without_timing(const std::vector<TrainRecord>& trace) {
  std::ostringstream os;
  for (const TrainRecord& r : trace) write_row(os, r, false);
  return os.str();
}

std::string summary_json(const ExperimentSummary& s) {
  nlohmann::json j;
  j["name"] = s.config.name;
  j["config"] = to_key_values(s.config);
  j["diverged"] = s.diverged;
  j["final_loss"] = stat_json(s.final_loss);
  j["best_loss"] = stat_json(s.best_loss);
  j["loss_threshold"] = s.config.loss_threshold;
  j["steps_to_threshold"] =
      s.steps_to_threshold ? stat_json(*s.steps_to_threshold) : nlohmann::json(nullptr);
  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& r : s.runs) {
    runs.push_back({{"seed", r.seed},
                    {"initial_loss", r.initial_loss},
                    {"final_loss", r.final_loss},
                    {"best_loss", r.best_loss},
                    {"steps_to_threshold", optional_step(r.steps_to_threshold)},
                    {"diverged", r.diverged},
                    {"diverged_at", optional_step(r.diverged_at)},
                    {"divergence_reason", r.divergence_reason}});
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const KeyValues base = to_key_values(cfg);
  if (axis != "lr_scale" && !base.contains(axis))
    throw ConfigError("sweep axis '" + axis + "' is not a hyperparameter");

  std::vector<SweepRow> rows;
  for (const std::string& value : values) {
    KeyValues kv = base;
    if (axis == "lr" || axis == "lr_scale") {
      double v = 0.0;
      try {
        v = parse_real(value);
      } catch (const FormatError&) {
        throw ConfigError("sweep value '" + value + "' is not a number");
      }
      if (!(v > 0.0)) throw ConfigError("sweep stepsizes must be positive");
      const double lr = axis == "lr" ? v : cfg.optimizer.lr * v;
      kv["lr"] = format_real(lr);
      kv["weight_decay"] =
          format_real(weight_decay_adjust(cfg.optimizer.weight_decay, cfg.optimizer.lr / lr));
    } else {
      kv[axis] = value;
    }
    kv["name"] = cfg.name + "_" + axis + "_" + value;
    rows.push_back({value, resolve(kv), {}});
  }

  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)].summary =
          run_repeats(rows[static_cast<std::size_t>(i)].config);
    } catch (...) {
#pragma omp critical(apollo_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string sweep_table(const std::string& axis, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << axis
     << ",lr,weight_decay,final_loss_mean,final_loss_std,best_loss_mean,"
        "steps_to_threshold_mean,diverged\n";
  for (const SweepRow& r : rows) {
    const ExperimentSummary& s = r.summary;
    os << r.value << ',' << format_real(r.config.optimizer.lr) << ','
       << format_real(r.config.optimizer.weight_decay) << ',' << format_real(s.final_loss.mean)
       << ',' << format_real(s.final_loss.stddev) << ',' << format_real(s.best_loss.mean) << ','
       << (s.steps_to_threshold ? format_real(s.steps_to_threshold->mean) : std::string("NA"))
       << ',' << (s.diverged ? "true" : "false") << '\n';
  }
  return os.str();
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                                const std::vector<std::string>& values,
                                const std::filesystem::path& out_dir) {
  std::vector<SweepRow> rows = sweep(cfg, axis, values);
  std::filesystem::create_directories(out_dir);
  for (const SweepRow& r : rows) {
    const auto sub = out_dir / (axis + "_" + r.value);
    std::filesystem::create_directories(sub);
    for (const RunResult& run : r.summary.runs) {
      std::ostringstream os;
      write_trace(os, run.trace);
      write_file(sub / ("trace_seed" + std::to_string(run.seed) + ".csv"), os.str());
    }
    write_file(sub / "summary.json", summary_json(r.summary));
    write_file(sub / "config.txt", to_text(to_key_values(r.config)));
  }
  write_file(out_dir / "sweep.csv", sweep_table(axis, rows));
  return rows;
}

std::filesystem::path output_dir(const std::optional<std::string>& explicit_out,
                                 const std::string& name) {
  if (explicit_out) return *explicit_out;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root)
    return std::filesystem::path(root) / name;
  return std::filesystem::path("runs") / name;
}

}  // namespace apollo
