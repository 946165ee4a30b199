// Copyright 2026 The redobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "redobs/analysis.hpp"
#include "redobs/io.hpp"

namespace redobs::cli {

namespace fs = std::filesystem;

namespace {

std::optional<fs::path> env_path(const char* name) {
  if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return fs::path(v);
  return std::nullopt;
}

std::optional<fs::path> effective_config_dir(const std::optional<fs::path>& dir) {
  return dir ? dir : env_path(kScenarioDirEnv);
}

// Distinguishes output failures from scenario errors.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::string output_stem(const Scenario& s) {
  if (s.gain == GainMode::scheduled) return s.name + "_" + to_string(s.hybrid.semantics);
  return s.name;
}

struct RunOutcome {
  Trajectory traj;
  std::vector<StabilityReport> reports;
  bool passed = true;
};

RunOutcome evaluate(const Scenario& scenario) {
  RunOutcome out{simulate(scenario), {}, true};
  for (auto which : {ObserverKind::reduced, ObserverKind::full}) {
    if (!out.traj.has(which)) continue;
    out.reports.push_back(analyze(out.traj, which));
    out.passed = out.passed && out.reports.back().passed();
  }
  if (out.traj.observers == ObserverMode::both) {
    const auto& red = out.reports[0].settling_time;
    const auto& full = out.reports[1].settling_time;
    out.passed = out.passed && red && full && *red < *full;
  }
  return out;
}

void write_scenario_report(std::ostream& os, const Scenario& scenario, const RunOutcome& run) {
  const auto& d = run.traj.design;
  os << std::setprecision(10);
  os << "scenario: " << scenario.name << '\n';
  os << "controller: " << to_string(scenario.controller.kind) << '\n';
  os << "observers: " << to_string(scenario.observers) << '\n';
  os << "gain_mode: " << to_string(scenario.gain) << '\n';
  os << "dt: " << scenario.dt << '\n';
  os << "t_final: " << scenario.t_final << '\n';
  os << "eta: " << d.eta << '\n';
  os << "v_max: " << d.v_max << '\n';
  os << "k0: " << d.k0 << '\n';
  os << "lambda1: " << d.lambda1 << '\n';
  os << "lambda2: " << d.lambda2 << '\n';
  os << "region_radius: " << d.region_radius << '\n';
  if (scenario.gain == GainMode::scheduled) {
    const auto& h = scenario.hybrid;
    os << "jump_semantics: " << to_string(h.semantics) << '\n';
    os << "v_bar: " << h.v_bar << '\n';
    os << "v_bar_exceeds_2eta: " << (h.v_bar > 2 * h.eta ? "true" : "false") << '\n';
    std::string empty_modes;
    for (int r = h.r_min; r <= h.r_min + 4; ++r) {
      if (flow_interval(h, r).empty) empty_modes += (empty_modes.empty() ? "" : " ") + std::to_string(r);
    }
    os << "empty_flow_modes_first5: " << (empty_modes.empty() ? "none" : empty_modes) << '\n';
    const auto resting = lowest_resting_mode(h);
    os << "lowest_resting_mode: " << (resting ? std::to_string(*resting) : "none") << '\n';

    // Chatter of the other semantics on the same scenario, for comparison.
    Scenario other = scenario;
    other.hybrid.semantics = h.semantics == JumpSemantics::hysteresis
                                 ? JumpSemantics::paper_faithful
                                 : JumpSemantics::hysteresis;
    const auto other_traj = simulate(other);
    os << "chatter_score_" << to_string(h.semantics) << ": " << chatter_score(run.traj) << '\n';
    os << "chatter_score_" << to_string(other.hybrid.semantics) << ": "
       << chatter_score(other_traj) << '\n';
  }
  for (const auto& r : run.reports) write_report(os, r, r.observer + ".");
  if (run.traj.observers == ObserverMode::both) {
    const auto& red = run.reports[0].settling_time;
    const auto& full = run.reports[1].settling_time;
    os << "reduced_settles_first: " << (red && full && *red < *full ? "true" : "false") << '\n';
  }
  os << "all_checks_passed: " << (run.passed ? "true" : "false") << '\n';
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("no sweep values given");
  return out;
}

void apply_param(Scenario& s, const std::string& param, double value) {
  if (param == "eta") {
    s.eta = value;
    s.hybrid.eta = value;
  } else if (param == "v_max") {
    s.v_max = value;
  } else if (param == "v_bar") {
    s.hybrid.v_bar = value;
  } else if (param == "dt") {
    s.dt = value;
  } else if (param == "gain_scale") {
    s.gain_scale = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + param + "'");
  }
}

// Shortest round-trip text of v.
std::string value_tag(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<ScenarioEntry> list_scenarios(const std::optional<fs::path>& config_dir) {
  std::vector<ScenarioEntry> out;
  for (const auto& s : builtin_scenarios()) out.push_back({s.name, s.description, std::nullopt});
  const auto dir = effective_config_dir(config_dir);
  if (!dir || !fs::is_directory(*dir)) return out;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(*dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ini") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      const auto s = load_scenario_file(f);
      out.push_back({s.name, s.description, f});
    } catch (const std::exception& e) {
      out.push_back({f.stem().string(), std::string("invalid: ") + e.what(), f});
    }
  }
  return out;
}

Scenario resolve_scenario(const RunConfig& config) {
  Scenario s;
  if (config.config_file) {
    s = load_scenario_file(*config.config_file);
  } else if (auto builtin = find_builtin_scenario(config.scenario)) {
    s = *builtin;
  } else {
    bool found = false;
    for (const auto& entry : list_scenarios(config.config_dir)) {
      if (entry.file && entry.name == config.scenario) {
        s = load_scenario_file(*entry.file);
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("unknown scenario '" + config.scenario + "'");
  }
  if (config.dt) s.dt = *config.dt;
  if (config.t_final) s.t_final = *config.t_final;
  if (config.observer) s.observers = parse_observer_mode(*config.observer);
  if (config.gain) s.gain = parse_gain_mode(*config.gain);
  if (config.jump_semantics) s.hybrid.semantics = parse_jump_semantics(*config.jump_semantics);
  if (config.gain_scale) s.gain_scale = *config.gain_scale;
  s.validate();
  return s;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = resolve_scenario(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  RunOutcome outcome;
  try {
    outcome = evaluate(scenario);
  } catch (const std::exception& e) {
    err << "simulation failed: " << e.what() << '\n';
    return kSimulationError;
  }

  try {
    ensure_dir(config.out_dir);
    const auto stem = output_stem(scenario);
    const auto primary = outcome.traj.primary();
    {
      auto f = open_output(config.out_dir / (stem + ".csv"));
      write_trajectory_csv(f, outcome.traj, primary);
    }
    if (outcome.traj.observers == ObserverMode::both) {
      auto f = open_output(config.out_dir / (stem + "_full.csv"));
      write_trajectory_csv(f, outcome.traj, ObserverKind::full);
    }
    if (scenario.gain == GainMode::scheduled) {
      auto f = open_output(config.out_dir / (stem + "_jumps.csv"));
      write_jumps_csv(f, outcome.traj.jumps);
    }
    if (config.plot) {
      auto f = open_output(config.out_dir / (stem + "_tidy.csv"));
      write_tidy_csv(f, outcome.traj);
    }
    out << "wrote " << (config.out_dir / (stem + ".csv")).string() << '\n';
    if (config.report) {
      std::ostringstream report;
      write_scenario_report(report, scenario, outcome);
      auto f = open_output(config.out_dir / (stem + "_report.txt"));
      f << report.str();
      out << report.str();
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "simulation failed: " << e.what() << '\n';
    return kSimulationError;
  }

  if (config.report && !outcome.passed) return kChecksFailed;
  return kOk;
}

namespace {

int run_list(const std::optional<fs::path>& dir, std::ostream& out) {
  for (const auto& e : list_scenarios(dir)) {
    out << e.name << '\t' << e.description;
    if (e.file) out << " [" << e.file->string() << "]";
    out << '\n';
  }
  return kOk;
}

int run_check(const RunConfig& config, const fs::path& csv, const std::string& observer,
              std::ostream& out, std::ostream& err) {
  Scenario scenario;
  Trajectory traj;
  ObserverKind which;
  try {
    scenario = resolve_scenario(config);
    which = observer == "full" ? ObserverKind::full : ObserverKind::reduced;
    if (observer != "full" && observer != "reduced") {
      throw std::invalid_argument("--observer must be reduced or full for check");
    }
    std::ifstream in(csv);
    if (!in) throw std::invalid_argument("cannot open " + csv.string());
    traj = read_trajectory_csv(in, which);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  const auto model = scenario.model.build();
  traj.scenario = scenario.name;
  traj.gain_mode = scenario.gain;
  traj.hybrid = scenario.hybrid;
  traj.design = compute_k0(*model, scenario.eta, scenario.v_max, scenario.grid_points);
  traj.design.k0 *= scenario.gain_scale;
  traj.jumps = jumps_from_samples(traj, which);

  const auto report = analyze(traj, which);
  out << "csv: " << csv.string() << '\n';
  out << "scenario: " << scenario.name << '\n';
  write_report(out, report, report.observer + ".");
  return report.passed() ? kOk : kChecksFailed;
}

struct SweepResult {
  double value = 0.0;
  std::optional<RunOutcome> outcome;
  std::string error;
};

int run_sweep(const RunConfig& base, const std::string& param, const std::vector<double>& values,
              unsigned jobs, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = resolve_scenario(base);
    for (double v : values) {
      Scenario probe = scenario;
      apply_param(probe, param, v);
      probe.validate();
    }
    ensure_dir(base.out_dir);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  // Work queue: each worker owns the scenario copy and trajectory it runs.
  std::vector<SweepResult> results(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      Scenario s = scenario;
      apply_param(s, param, values[i]);
      results[i].value = values[i];
      try {
        results[i].outcome = evaluate(s);
        std::ofstream f(base.out_dir /
                        (output_stem(s) + "_" + param + "_" + value_tag(values[i]) + ".csv"));
        if (!f) throw IoError("cannot write sweep output");
        write_trajectory_csv(f, results[i].outcome->traj, results[i].outcome->traj.primary());
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();

  int code = kOk;
  try {
    auto f = open_output(base.out_dir / ("sweep_" + scenario.name + "_" + param + ".csv"));
    f << param << ",k0,settling_reduced,settling_full,max_speed,jumps,chatter,passed,error\n";
    f << std::setprecision(17);
    for (const auto& r : results) {
      f << value_tag(r.value) << ',';
      if (r.outcome) {
        const auto& o = *r.outcome;
        std::optional<double> sr, sf;
        double max_speed = 0.0;
        for (const auto& rep : o.reports) {
          (rep.observer == "reduced" ? sr : sf) = rep.settling_time;
          max_speed = rep.max_speed;
        }
        auto opt = [&](const std::optional<double>& v) {
          if (v) f << *v;
        };
        f << o.traj.design.k0 << ',';
        opt(sr);
        f << ',';
        opt(sf);
        f << ',' << max_speed << ',' << o.traj.jumps.size() << ',' << chatter_score(o.traj) << ','
          << (o.passed ? "true" : "false") << ",\n";
        if (!o.passed) code = std::max(code, int(kChecksFailed));
      } else {
        f << ",,,,,,false," << std::quoted(r.error) << '\n';
        code = kSimulationError;
      }
    }
    out << "wrote " << (base.out_dir / ("sweep_" + scenario.name + "_" + param + ".csv")).string()
        << '\n';
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return base.report ? code : (code == kChecksFailed ? kOk : code);
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dt", cfg.dt, "Integration step (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--t-final", cfg.t_final, "Horizon (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--observer", cfg.observer, "Observers to run")
      ->check(CLI::IsMember({"reduced", "full", "both"}));
  cmd->add_option("--gain", cfg.gain, "Gain mode")->check(CLI::IsMember({"constant", "scheduled"}));
  cmd->add_option("--jump-semantics", cfg.jump_semantics, "Hybrid jump sets")
      ->check(CLI::IsMember({"paper", "hysteresis"}));
  cmd->add_option("--gain-scale", cfg.gain_scale, "Multiply designed gains")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--config-dir", cfg.config_dir, "Directory of *.ini scenario files");
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced-order velocity observer simulator for rigid manipulators"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string default_out = "out";
  if (auto env = env_path(kOutDirEnv)) default_out = env->string();
  std::string out_dir = default_out;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write its trajectory");
  std::string positional;
  run_cmd->add_option("name", positional, "Built-in or file-defined scenario name");
  run_cmd->add_option("--scenario", cfg.scenario, "Scenario name");
  run_cmd->add_option("--config", cfg.config_file, "Scenario file (INI)");
  run_cmd->add_option("--out", out_dir, "Output directory (default $" + std::string(kOutDirEnv) + " or ./out)");
  run_cmd->add_flag("--report", cfg.report, "Write and print the analysis report");
  run_cmd->add_flag("--plot", cfg.plot, "Also write tidy plot data");
  add_run_options(run_cmd, cfg);

  auto* list_cmd = app.add_subcommand("list", "List available scenarios");
  std::optional<fs::path> list_dir;
  list_cmd->add_option("--config-dir", list_dir, "Directory of *.ini scenario files");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over several parameter values");
  std::string sweep_param;
  std::string sweep_values;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep_cmd->add_option("name", positional, "Scenario name");
  sweep_cmd->add_option("--scenario", cfg.scenario, "Scenario name");
  sweep_cmd->add_option("--config", cfg.config_file, "Scenario file (INI)");
  sweep_cmd->add_option("--param", sweep_param, "Parameter to vary")
      ->required()
      ->check(CLI::IsMember({"eta", "v_max", "v_bar", "dt", "gain_scale"}));
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_flag("--report", cfg.report, "Exit 3 when any run fails its checks");
  add_run_options(sweep_cmd, cfg);

  auto* check_cmd = app.add_subcommand("check", "Analyze an exported trajectory CSV");
  fs::path csv;
  std::string check_observer = "reduced";
  check_cmd->add_option("csv", csv, "Trajectory CSV")->required();
  check_cmd->add_option("--scenario", cfg.scenario, "Scenario the CSV was produced from");
  check_cmd->add_option("--config", cfg.config_file, "Scenario file (INI)");
  check_cmd->add_option("--observer", check_observer, "Observer recorded in the CSV")
      ->check(CLI::IsMember({"reduced", "full"}));
  check_cmd->add_option("--config-dir", cfg.config_dir, "Directory of *.ini scenario files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? (app.exit(e, out, err), kOk)
                                  : (app.exit(e, out, err), int(kConfigError));
  }

  if (!positional.empty()) {
    if (!cfg.scenario.empty() && cfg.scenario != positional) {
      err << "error: conflicting scenario names\n";
      return kConfigError;
    }
    cfg.scenario = positional;
  }
  cfg.out_dir = out_dir;

  if (*list_cmd) return run_list(list_dir, out);

  if (cfg.scenario.empty() && !cfg.config_file) {
    err << "error: a scenario name or --config is required\n";
    return kConfigError;
  }
  if (*run_cmd) return run(cfg, out, err);
  if (*check_cmd) return run_check(cfg, csv, check_observer, out, err);
  if (*sweep_cmd) {
    std::vector<double> values;
    try {
      values = parse_values(sweep_values);
    } catch (const std::exception& e) {
      err << "error: bad --values: " << e.what() << '\n';
      return kConfigError;
    }
    return run_sweep(cfg, sweep_param, values, jobs, out, err);
  }
  return kConfigError;
}

}  // namespace redobs::cli
