// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// apollo: run experiments, sweeps, the acceptance checks, and plots.
//
// Exit status: 0 success, 1 divergence (or a failed check), 2 bad config.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apollo/config.hpp"
#include "apollo/error.hpp"
#include "apollo/harness.hpp"
#include "apollo/plot.hpp"
#include "apollo/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDiverged = 1;
constexpr int kConfigError = 2;

apollo::ExperimentConfig load_config(const std::string& path,
                                     const std::vector<std::string>& overrides) {
  apollo::KeyValues kv = apollo::load_key_values(path);
  for (const std::string& o : overrides) apollo::apply_override(kv, o);
  return apollo::resolve(kv);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string describe(const apollo::Stat& s) {
  std::ostringstream os;
  os << s.mean;
  if (s.stddev > 0.0) os << " +- " << s.stddev;
  return os.str();
}

void print_summary(const apollo::ExperimentSummary& s) {
  std::cout << s.config.name << ": final loss " << describe(s.final_loss) << ", best "
            << describe(s.best_loss);
  if (s.steps_to_threshold)
    std::cout << ", steps to " << s.config.loss_threshold << " "
              << describe(*s.steps_to_threshold);
  std::cout << '\n';
  for (const auto& r : s.runs) {
    if (r.diverged)
      std::cout << "  seed " << r.seed << " diverged at step " << *r.diverged_at << ": "
                << r.divergence_reason << '\n';
  }
}

int cmd_run(const std::string& config, const std::vector<std::string>& sets,
            const std::optional<std::string>& out) {
  const apollo::ExperimentConfig cfg = load_config(config, sets);
  const auto dir = apollo::output_dir(out, cfg.name);
  const auto summary = apollo::run_experiment(cfg, dir);
  print_summary(summary);
  std::cout << "wrote " << dir.string() << '\n';
  return summary.diverged ? kDiverged : kOk;
}

int cmd_sweep(const std::string& config, const std::string& axis, const std::string& values,
              const std::vector<std::string>& sets, const std::optional<std::string>& out) {
  const apollo::ExperimentConfig cfg = load_config(config, sets);
  const auto list = split_list(values);
  const auto dir = apollo::output_dir(out, cfg.name + "-sweep-" + axis);
  const auto rows = apollo::run_sweep(cfg, axis, list, dir);
  std::cout << apollo::sweep_table(axis, rows);
  std::cout << "wrote " << dir.string() << '\n';
  for (const auto& r : rows) {
    if (r.summary.diverged) return kDiverged;
  }
  return kOk;
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& out,
             const std::string& title) {
  std::vector<apollo::PlotSeries> series;
  for (const std::string& path : traces) {
    std::ifstream in(path);
    if (!in) throw apollo::ConfigError("cannot read trace '" + path + "'");
    series.push_back({std::filesystem::path(path).stem().string(), apollo::read_trace(in)});
  }
  const std::string svg = apollo::render_loss_svg(series, title);
  std::ofstream os(out);
  if (!os) throw apollo::ConfigError("cannot write '" + out + "'");
  os << svg;
  std::cout << "wrote " << out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Apollo optimizer experiments"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> out;

  auto* run = app.add_subcommand("run", "Train one config (repeat seeds if set)");
  run->add_option("config", config, "Key/value config file")->required();
  run->add_option("--set", sets, "Override, key=value");
  run->add_option("--out", out, "Output directory");

  std::string axis;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Run one config per value of a hyperparameter");
  sweep->add_option("config", config, "Key/value config file")->required();
  sweep->add_option("--axis", axis, "Config key, or lr_scale")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--set", sets, "Override, key=value");
  sweep->add_option("--out", out, "Output directory");

  std::vector<int> only;
  bool show_baselines = false;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("--only", only, "Criterion ids to run")->delimiter(',');
  verify->add_flag("--baselines", show_baselines, "Print the calibration baselines and exit");

  std::vector<std::string> traces;
  std::string svg;
  std::string title = "loss";
  auto* plot = app.add_subcommand("plot", "Render trace CSVs to an SVG loss chart");
  plot->add_option("traces", traces, "Trace CSV files")->required();
  plot->add_option("--out", svg, "SVG file to write")->required();
  plot->add_option("--title", title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, sets, out);
    if (*sweep) return cmd_sweep(config, axis, values, sets, out);
    if (*verify) {
      if (show_baselines) {
        std::cout << apollo::verify::baselines_json();
        return kOk;
      }
      return apollo::verify::run_all(std::cout, only) ? kOk : kDiverged;
    }
    if (*plot) return cmd_plot(traces, svg, title);
  } catch (const apollo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const apollo::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  }
  return kOk;
}
