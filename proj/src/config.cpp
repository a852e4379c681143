// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "apollo/apollo.hpp"
#include "apollo/baselines.hpp"
#include "apollo/checkpoint.hpp"
#include "apollo/error.hpp"

namespace apollo {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  if (trim(s).empty()) return parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

// Typed access to the merged key/value table.
class Fields {
 public:
  explicit Fields(const KeyValues& kv) : kv_(kv) {}

  const std::string& text(const std::string& key) const { return kv_.at(key); }

  double real(const std::string& key) const {
    try {
      return parse_real(text(key));
    } catch (const FormatError&) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + text(key) + "'");
    }
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string& t = text(key);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
      throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + t +
                        "'");
    return v;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& part : split(text(key), ',')) {
      try {
        out.push_back(parse_real(part));
      } catch (const FormatError&) {
        throw ConfigError("config key '" + key + "': bad list element '" + part + "'");
      }
    }
    return out;
  }

 private:
  const KeyValues& kv_;
};

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_real(values[i]);
  return out;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second)
      throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw ConfigError("override '" + assignment + "' is not key=value");
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

KeyValues default_key_values() {
  ExperimentConfig cfg;
  KeyValues kv = to_key_values(cfg);
  kv["cosine_steps"] = "0";  // 0 = anneal over the whole run
  return kv;
}

ExperimentConfig resolve(const KeyValues& user) {
  KeyValues merged = default_key_values();
  for (const auto& [key, value] : user) {
    if (!merged.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    merged[key] = value;
  }
  const Fields f(merged);

  ExperimentConfig cfg;
  cfg.name = f.text("name");
  if (cfg.name.empty()) throw ConfigError("config key 'name' must not be empty");

  ObjectiveSpec& obj = cfg.objective;
  obj.kind = f.text("objective");
  if (obj.kind != "rosenbrock" && obj.kind != "quadratic" && obj.kind != "saddle" &&
      obj.kind != "mlp")
    throw ConfigError("unknown objective '" + obj.kind +
                      "' (expected rosenbrock|quadratic|saddle|mlp)");
  obj.start = f.reals("start");
  obj.h_diag = f.reals("h_diag");
  obj.noise = f.real("noise");
  obj.dataset_size = f.integer("dataset_size");
  obj.features = f.integer("features");
  obj.classes = f.integer("classes");
  obj.hidden = f.integer("hidden");
  obj.data_seed = f.integer("data_seed");
  obj.separation = f.real("separation");

  OptimizerSpec& opt = cfg.optimizer;
  opt.name = f.text("optimizer");
  if (opt.name != "apollo" && opt.name != "sgd" && opt.name != "adamw" && opt.name != "adam")
    throw ConfigError("unknown optimizer '" + opt.name + "' (expected apollo|sgd|adamw|adam)");
  opt.lr = f.real("lr");
  opt.sigma = f.real("sigma");
  opt.beta = f.real("beta");
  opt.eps = f.real("eps");
  opt.momentum = f.real("momentum");
  opt.beta1 = f.real("beta1");
  opt.beta2 = f.real("beta2");
  opt.adam_eps = f.real("adam_eps");
  opt.weight_decay = f.real("weight_decay");
  opt.weight_decay_mode = parse_weight_decay_mode(f.text("weight_decay_mode"));
  opt.clip_norm = f.real("clip_norm");
  if (opt.clip_norm < 0.0) throw ConfigError("clip_norm must be non-negative");

  cfg.steps = f.integer("steps");
  cfg.batch_size = f.integer("batch_size");
  cfg.seed = f.integer("seed");
  cfg.repeat = f.integer("repeat");
  cfg.log_every = f.integer("log_every");
  cfg.loss_threshold = f.real("loss_threshold");
  if (cfg.steps == 0) throw ConfigError("steps must be positive");
  if (cfg.repeat == 0) throw ConfigError("repeat must be positive");
  if (cfg.log_every == 0) throw ConfigError("log_every must be positive");

  LrSchedule& s = cfg.schedule;
  s.base_lr = opt.lr;
  s.warmup_steps = f.integer("warmup_steps");
  s.warmup_start = f.real("warmup_start");
  s.decay = parse_decay_policy(f.text("schedule"));
  for (const std::string& part : split(f.text("milestones"), ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos)
      throw ConfigError("milestone '" + part + "' is not step:factor");
    Milestone m;
    KeyValues one{{"step", trim(part.substr(0, colon))}, {"factor", trim(part.substr(colon + 1))}};
    const Fields mf(one);
    m.step = mf.integer("step");
    m.factor = mf.real("factor");
    s.milestones.push_back(m);
  }
  s.cosine_steps = f.integer("cosine_steps");
  if (s.cosine_steps == 0) s.cosine_steps = cfg.steps;
  s.cosine_floor = f.real("cosine_floor");
  validate(s);

  // Construct once so that objective and optimizer errors surface here.
  const auto objective = make_objective(obj);
  make_optimizer(opt, objective->group_layout());
  return cfg;
}

KeyValues to_key_values(const ExperimentConfig& c) {
  KeyValues kv;
  kv["name"] = c.name;
  kv["objective"] = c.objective.kind;
  kv["start"] = join(c.objective.start);
  kv["h_diag"] = join(c.objective.h_diag);
  kv["noise"] = format_real(c.objective.noise);
  kv["dataset_size"] = std::to_string(c.objective.dataset_size);
  kv["features"] = std::to_string(c.objective.features);
  kv["classes"] = std::to_string(c.objective.classes);
  kv["hidden"] = std::to_string(c.objective.hidden);
  kv["data_seed"] = std::to_string(c.objective.data_seed);
  kv["separation"] = format_real(c.objective.separation);
  kv["optimizer"] = c.optimizer.name;
  kv["lr"] = format_real(c.optimizer.lr);
  kv["sigma"] = format_real(c.optimizer.sigma);
  kv["beta"] = format_real(c.optimizer.beta);
  kv["eps"] = format_real(c.optimizer.eps);
  kv["momentum"] = format_real(c.optimizer.momentum);
  kv["beta1"] = format_real(c.optimizer.beta1);
  kv["beta2"] = format_real(c.optimizer.beta2);
  kv["adam_eps"] = format_real(c.optimizer.adam_eps);
  kv["weight_decay"] = format_real(c.optimizer.weight_decay);
  kv["weight_decay_mode"] = to_string(c.optimizer.weight_decay_mode);
  kv["clip_norm"] = format_real(c.optimizer.clip_norm);
  kv["warmup_steps"] = std::to_string(c.schedule.warmup_steps);
  kv["warmup_start"] = format_real(c.schedule.warmup_start);
  kv["schedule"] = to_string(c.schedule.decay);
  std::string ms;
  for (std::size_t i = 0; i < c.schedule.milestones.size(); ++i)
    ms += (i ? "," : "") + std::to_string(c.schedule.milestones[i].step) + ":" +
          format_real(c.schedule.milestones[i].factor);
  kv["milestones"] = ms;
  kv["cosine_steps"] = std::to_string(c.schedule.cosine_steps);
  kv["cosine_floor"] = format_real(c.schedule.cosine_floor);
  kv["steps"] = std::to_string(c.steps);
  kv["batch_size"] = std::to_string(c.batch_size);
  kv["seed"] = std::to_string(c.seed);
  kv["repeat"] = std::to_string(c.repeat);
  kv["log_every"] = std::to_string(c.log_every);
  kv["loss_threshold"] = format_real(c.loss_threshold);
  return kv;
}

std::string to_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [key, value] : kv) out += key + " = " + value + "\n";
  return out;
}

std::unique_ptr<Objective> make_objective(const ObjectiveSpec& desc) {
  auto start_or = [&](Tensor fallback) {
    if (desc.start.empty()) return fallback;
    return Tensor(Shape{desc.start.size()}, desc.start);
  };
  if (desc.kind == "rosenbrock")
    return std::make_unique<RosenbrockObjective>(start_or(Tensor{-1.2, 1.0}));
  if (desc.kind == "saddle") return std::make_unique<SaddleObjective>(start_or(Tensor{0.1, 0.1}));
  if (desc.kind == "quadratic") {
    if (desc.h_diag.empty()) throw ConfigError("quadratic objective needs h_diag");
    Tensor h(Shape{desc.h_diag.size()}, desc.h_diag);
    return std::make_unique<QuadraticBowlObjective>(
        h, desc.noise, start_or(Tensor::full(h.shape(), 1.0)));
  }
  if (desc.kind == "mlp") {
    MlpModel model{desc.features, desc.hidden, desc.classes};
    return std::make_unique<MlpObjective>(
        model, SyntheticDataset::generate(desc.dataset_size, desc.features, desc.classes,
                                          desc.data_seed, desc.separation));
  }
  throw ConfigError("unknown objective '" + desc.kind + "'");
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSpec& desc,
                                          const std::vector<Shape>& layout) {
  std::unique_ptr<Optimizer> opt;
  if (desc.name == "apollo") {
    ApolloConfig c;
    c.eta = desc.lr;
    c.sigma = desc.sigma;
    c.beta = desc.beta;
    c.eps = desc.eps;
    c.weight_decay = desc.weight_decay;
    c.weight_decay_mode = desc.weight_decay_mode;
    opt = std::make_unique<ApolloOptimizer>(layout, c);
  } else if (desc.name == "sgd") {
    opt = std::make_unique<SgdOptimizer>(layout,
                                         SgdConfig{desc.lr, desc.momentum, desc.weight_decay});
  } else if (desc.name == "adamw" || desc.name == "adam") {
    AdamConfig c;
    c.lr = desc.lr;
    c.beta1 = desc.beta1;
    c.beta2 = desc.beta2;
    c.eps = desc.adam_eps;
    c.weight_decay = desc.weight_decay;
    c.weight_decay_mode =
        desc.name == "adamw" ? WeightDecayMode::kDecoupled : WeightDecayMode::kCoupled;
    opt = std::make_unique<AdamOptimizer>(layout, c);
  } else {
    throw ConfigError("unknown optimizer '" + desc.name + "'");
  }
  opt->set_clip_norm(desc.clip_norm);
  return opt;
}

}  // namespace apollo
