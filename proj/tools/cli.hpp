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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redobs/simulator.hpp"

namespace redobs::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kSimulationError = 2,
  kChecksFailed = 3,
  kIoError = 4,
};

/// Default output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "REDOBS_OUT_DIR";
/// Directory scanned for *.ini scenario files when --config-dir is absent.
inline constexpr const char* kScenarioDirEnv = "REDOBS_SCENARIO_DIR";

struct RunConfig {
  std::string scenario;
  std::optional<std::filesystem::path> config_file;
  std::optional<std::filesystem::path> config_dir;
  std::filesystem::path out_dir;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::string> observer;
  std::optional<std::string> gain;
  std::optional<std::string> jump_semantics;
  std::optional<double> gain_scale;
  bool report = false;
  bool plot = false;
};

struct ScenarioEntry {
  std::string name;
  std::string description;
  std::optional<std::filesystem::path> file;
};

/// Built-ins followed by the *.ini files of config_dir (sorted by file name).
std::vector<ScenarioEntry> list_scenarios(const std::optional<std::filesystem::path>& config_dir);

/// Resolves the scenario of a run and applies the overrides. Throws
/// std::invalid_argument or FormatError on bad input.
Scenario resolve_scenario(const RunConfig& config);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace redobs::cli
