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

#include "redobs/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace redobs {

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> trajectory_csv_header(Eigen::Index n) {
  std::vector<std::string> h{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) h.push_back("q" + std::to_string(i));
  for (Eigen::Index i = 1; i <= n; ++i) h.push_back("dq" + std::to_string(i));
  for (Eigen::Index i = 1; i <= n; ++i) h.push_back("dq" + std::to_string(i) + "_hat");
  h.insert(h.end(), {"eps_norm", "V", "r", "k_r"});
  for (Eigen::Index i = 1; i <= n; ++i) h.push_back("tau" + std::to_string(i));
  h.insert(h.end(), {"lower_bound", "upper_bound"});
  return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, ObserverKind which) {
  if (!traj.has(which)) throw std::invalid_argument("trajectory lacks the requested observer");
  if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
  const auto n = traj.samples.front().x1.size();
  const auto header = trajectory_csv_header(n);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';

  // The full-order observer has no logic; its column shows kd.
  const double full_gain = traj.full_kd;
  std::string line;
  for (const auto& s : traj.samples) {
    const auto& obs = *s.observer(which);
    line.clear();
    auto put = [&](double v) {
      line += format_double(v);
      line += ',';
    };
    put(s.t);
    for (Eigen::Index i = 0; i < n; ++i) put(s.x1(i));
    for (Eigen::Index i = 0; i < n; ++i) put(s.x2(i));
    for (Eigen::Index i = 0; i < n; ++i) put(obs.xhat2(i));
    put(obs.eps_norm);
    put(obs.lyapunov);
    line += std::to_string(s.r);
    line += ',';
    put(which == ObserverKind::reduced ? s.gain : full_gain);
    for (Eigen::Index i = 0; i < n; ++i) put(s.tau(i));
    put(s.bounds.lower);
    line += format_double(s.bounds.upper);
    os << line << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is, ObserverKind slot) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto columns = split(line, ',');
  // 1 + 4n + 6 columns.
  if ((columns.size() < 11) || ((columns.size() - 7) % 4) != 0) {
    throw FormatError("unexpected CSV column count");
  }
  const auto n = static_cast<Eigen::Index>((columns.size() - 7) / 4);
  const auto expected = trajectory_csv_header(n);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (columns[i] != expected[i]) {
      throw FormatError("unexpected CSV column '" + std::string(columns[i]) + "'");
    }
  }

  Trajectory traj;
  traj.observers = slot == ObserverKind::reduced ? ObserverMode::reduced : ObserverMode::full;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != expected.size()) {
      throw FormatError("wrong field count on line " + std::to_string(line_no));
    }
    std::size_t k = 0;
    auto next = [&] { return parse_double(f[k++]); };
    auto vec = [&] {
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = next();
      return v;
    };
    Sample s;
    s.t = next();
    s.x1 = vec();
    s.x2 = vec();
    ObserverSample obs;
    obs.xhat2 = vec();
    obs.eps = s.x2 - obs.xhat2;
    obs.eps_norm = next();
    obs.lyapunov = next();
    s.r = static_cast<int>(next());
    s.gain = next();
    s.tau = vec();
    s.bounds.lower = next();
    s.bounds.upper = next();
    if (slot == ObserverKind::reduced) {
      s.reduced = std::move(obs);
    } else {
      s.full = std::move(obs);
    }
    if (!traj.samples.empty() && !(s.t > traj.samples.back().t)) {
      throw FormatError("time stamps not strictly increasing on line " + std::to_string(line_no));
    }
    traj.samples.push_back(std::move(s));
  }
  if (traj.samples.size() < 2) throw FormatError("trajectory needs at least two samples");
  traj.dt = traj.samples[1].t - traj.samples[0].t;
  traj.t_final = traj.samples.back().t;
  return traj;
}

void write_jumps_csv(std::ostream& os, const std::vector<JumpEvent>& jumps) {
  os << "t,r_old,r_new,xhat2_norm\n";
  for (const auto& j : jumps) {
    os << format_double(j.t) << ',' << j.r_old << ',' << j.r_new << ','
       << format_double(j.xhat2_norm) << '\n';
  }
}

void write_tidy_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,series,value\n";
  for (const auto& s : traj.samples) {
    const std::string t = format_double(s.t);
    auto row = [&](const std::string& series, double v) {
      os << t << ',' << series << ',' << format_double(v) << '\n';
    };
    for (Eigen::Index i = 0; i < s.x1.size(); ++i) {
      const std::string j = std::to_string(i + 1);
      row("q" + j, s.x1(i));
      row("dq" + j, s.x2(i));
      if (s.reduced) row("dq" + j + "_hat_reduced", s.reduced->xhat2(i));
      if (s.full) row("dq" + j + "_hat_full", s.full->xhat2(i));
    }
    row("speed_norm", s.x2.norm());
    if (s.reduced) row("eps_norm_reduced", s.reduced->eps_norm);
    if (s.full) row("eps_norm_full", s.full->eps_norm);
    row("r", s.r);
    row("lower_bound", s.bounds.lower);
    row("upper_bound", s.bounds.upper);
  }
}

// ---------------------------------------------------------------------------
// Scenario files.

namespace {

namespace pt = boost::property_tree;

// Accepts plain numbers and multiples of pi: "pi/4", "-2pi/3", "0.5*pi".
double parse_angle_or_number(std::string text) {
  std::erase_if(text, [](char c) { return c == ' ' || c == '\t'; });
  const auto pi_pos = text.find("pi");
  if (pi_pos == std::string::npos) return parse_double(text);

  std::string coef = text.substr(0, pi_pos);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (coef == "+" || coef.empty()) {
    c = 1.0;
  } else {
    c = parse_double(coef);
  }
  std::string rest = text.substr(pi_pos + 2);
  double d = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw FormatError("cannot parse '" + text + "'");
    d = parse_double(rest.substr(1));
  }
  return c * std::numbers::pi / d;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  for (auto part : split(text, ',')) values.push_back(parse_angle_or_number(std::string(part)));
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"name", "description", "base"}},
      {"model", {"type", "m1", "m2", "L1", "L2", "f1", "f2", "gravity", "inertia", "damping",
                 "gravity_torque"}},
      {"initial", {"q", "dq", "xhat2"}},
      {"controller", {"type", "kp", "kd", "x_ref"}},
      {"observer", {"mode", "gain", "eta", "v_max", "gain_scale", "grid_points"}},
      {"hybrid", {"v_bar", "semantics", "r_min", "r_guess"}},
      {"simulation", {"dt", "t_final"}},
  };
  return s;
}

void check_keys(const pt::ptree& tree) {
  const auto& s = schema();
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (!s.at("").contains(key)) throw FormatError("unknown top-level key '" + key + "'");
      continue;
    }
    const auto section = s.find(key);
    if (section == s.end() || key.empty()) throw FormatError("unknown section [" + key + "]");
    for (const auto& [sub, leaf] : node) {
      if (!section->second.contains(sub)) {
        throw FormatError("unknown key '" + sub + "' in [" + key + "]");
      }
    }
  }
}

template <typename T>
void assign(const pt::ptree& tree, const std::string& path, T& target) {
  if (auto v = tree.get_optional<std::string>(path)) {
    if constexpr (std::is_same_v<T, double>) {
      target = parse_angle_or_number(*v);
    } else if constexpr (std::is_same_v<T, int>) {
      const double d = parse_double(*v);
      if (d != static_cast<double>(static_cast<int>(d))) {
        throw FormatError(path + " must be an integer");
      }
      target = static_cast<int>(d);
    } else {
      target = *v;
    }
  }
}

void assign_vector(const pt::ptree& tree, const std::string& path, Eigen::VectorXd& target) {
  if (auto v = tree.get_optional<std::string>(path)) target = parse_vector(*v);
}

}  // namespace

Scenario load_scenario(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(e.what());
  }
  check_keys(tree);

  Scenario s;
  if (auto base = tree.get_optional<std::string>("base")) {
    auto found = find_builtin_scenario(*base);
    if (!found) throw FormatError("unknown base scenario '" + *base + "'");
    s = *found;
  }
  assign(tree, "name", s.name);
  assign(tree, "description", s.description);

  try {
    if (auto type = tree.get_optional<std::string>("model.type")) {
      if (*type == "two_link") {
        s.model.kind = ModelSpec::Kind::two_link;
      } else if (*type == "single_link") {
        s.model.kind = ModelSpec::Kind::single_link;
      } else {
        throw FormatError("unknown model type '" + *type + "'");
      }
    }
    auto& tl = s.model.two_link;
    assign(tree, "model.m1", tl.m1);
    assign(tree, "model.m2", tl.m2);
    assign(tree, "model.L1", tl.L1);
    assign(tree, "model.L2", tl.L2);
    assign(tree, "model.f1", tl.f1);
    assign(tree, "model.f2", tl.f2);
    assign(tree, "model.gravity", tl.gravity_accel);
    auto& sl = s.model.single_link;
    assign(tree, "model.inertia", sl.inertia);
    assign(tree, "model.damping", sl.damping);
    assign(tree, "model.gravity_torque", sl.gravity_torque);

    assign_vector(tree, "initial.q", s.q0);
    assign_vector(tree, "initial.dq", s.dq0);
    assign_vector(tree, "initial.xhat2", s.xhat2_0);
    const auto n = s.model.dof();
    if (s.dq0.size() == 0) s.dq0 = Eigen::VectorXd::Zero(n);
    if (s.xhat2_0.size() == 0) s.xhat2_0 = Eigen::VectorXd::Zero(n);
    if (s.q0.size() == 0) s.q0 = Eigen::VectorXd::Zero(n);

    if (auto type = tree.get_optional<std::string>("controller.type")) {
      s.controller.kind = parse_controller_kind(*type);
    }
    assign_vector(tree, "controller.kp", s.controller.pd.kp);
    assign_vector(tree, "controller.kd", s.controller.pd.kd);
    assign_vector(tree, "controller.x_ref", s.controller.pd.x_ref);

    if (auto mode = tree.get_optional<std::string>("observer.mode")) {
      s.observers = parse_observer_mode(*mode);
    }
    if (auto gain = tree.get_optional<std::string>("observer.gain")) {
      s.gain = parse_gain_mode(*gain);
    }
    assign(tree, "observer.eta", s.eta);
    s.hybrid.eta = s.eta;
    assign(tree, "observer.v_max", s.v_max);
    assign(tree, "observer.gain_scale", s.gain_scale);
    assign(tree, "observer.grid_points", s.grid_points);

    assign(tree, "hybrid.v_bar", s.hybrid.v_bar);
    if (auto sem = tree.get_optional<std::string>("hybrid.semantics")) {
      s.hybrid.semantics = parse_jump_semantics(*sem);
    }
    assign(tree, "hybrid.r_min", s.hybrid.r_min);
    assign(tree, "hybrid.r_guess", s.r_guess);

    assign(tree, "simulation.dt", s.dt);
    assign(tree, "simulation.t_final", s.t_final);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }

  if (s.name.empty()) throw FormatError("scenario file needs a name");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_scenario(in);
}

void save_scenario(std::ostream& os, const Scenario& s) {
  os << "name = " << s.name << '\n';
  if (!s.description.empty()) os << "description = " << s.description << '\n';
  os << "\n[model]\n";
  if (s.model.kind == ModelSpec::Kind::two_link) {
    const auto& p = s.model.two_link;
    os << "type = two_link\n"
       << "m1 = " << format_double(p.m1) << "\nm2 = " << format_double(p.m2)
       << "\nL1 = " << format_double(p.L1) << "\nL2 = " << format_double(p.L2)
       << "\nf1 = " << format_double(p.f1) << "\nf2 = " << format_double(p.f2)
       << "\ngravity = " << format_double(p.gravity_accel) << '\n';
  } else {
    const auto& p = s.model.single_link;
    os << "type = single_link\n"
       << "inertia = " << format_double(p.inertia) << "\ndamping = " << format_double(p.damping)
       << "\ngravity_torque = " << format_double(p.gravity_torque) << '\n';
  }
  os << "\n[initial]\n"
     << "q = " << format_vector(s.q0) << "\ndq = " << format_vector(s.dq0)
     << "\nxhat2 = " << format_vector(s.xhat2_0) << '\n';
  os << "\n[controller]\ntype = " << to_string(s.controller.kind) << '\n';
  if (s.controller.kind == ControllerKind::pd) {
    os << "kp = " << format_vector(s.controller.pd.kp)
       << "\nkd = " << format_vector(s.controller.pd.kd)
       << "\nx_ref = " << format_vector(s.controller.pd.x_ref) << '\n';
  }
  os << "\n[observer]\nmode = " << to_string(s.observers) << "\ngain = " << to_string(s.gain)
     << "\neta = " << format_double(s.eta) << "\nv_max = " << format_double(s.v_max)
     << "\ngain_scale = " << format_double(s.gain_scale) << "\ngrid_points = " << s.grid_points
     << '\n';
  os << "\n[hybrid]\nv_bar = " << format_double(s.hybrid.v_bar)
     << "\nsemantics = " << to_string(s.hybrid.semantics) << "\nr_min = " << s.hybrid.r_min
     << "\nr_guess = " << s.r_guess << '\n';
  os << "\n[simulation]\ndt = " << format_double(s.dt)
     << "\nt_final = " << format_double(s.t_final) << '\n';
}

}  // namespace redobs
