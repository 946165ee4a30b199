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

// Trajectory CSV export/import and INI scenario files.
//
// Trajectory columns, one row per sample, 17 significant digits:
//
//   t, q1..qn, dq1..dqn, dq1_hat..dqn_hat, eps_norm, V, r, k_r,
//   tau1..taun, lower_bound, upper_bound
//
// Scenario files are INI with sections [model], [initial], [controller],
// [observer], [hybrid] and [simulation]; see scenarios/README.md.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "redobs/simulator.hpp"

namespace redobs {

/// Raised for malformed scenario files or trajectory CSVs.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> trajectory_csv_header(Eigen::Index n);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, ObserverKind which);

/// Reads samples back into the given observer slot. eps is recomputed as
/// x2 - xhat2; eps_norm and V are taken from the file. dt and t_final are
/// inferred from the time column.
Trajectory read_trajectory_csv(std::istream& is, ObserverKind slot = ObserverKind::reduced);

/// t, r_old, r_new, xhat2_norm
void write_jumps_csv(std::ostream& os, const std::vector<JumpEvent>& jumps);

/// Long-format plot data: t, series, value.
void write_tidy_csv(std::ostream& os, const Trajectory& traj);

Scenario load_scenario(std::istream& is);
Scenario load_scenario_file(const std::filesystem::path& path);
void save_scenario(std::ostream& os, const Scenario& scenario);

}  // namespace redobs
