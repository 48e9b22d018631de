// Copyright 2026 The driftlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Canonical desk-scale studies. Each one runs a fixed experiment, evaluates a
// list of pass/fail checks and keeps its raw tables for the CLI to persist.

#ifndef DRIFTLAB_STUDIES_HPP_
#define DRIFTLAB_STUDIES_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace driftlab {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct StudyResult {
  int criterion = 0;
  std::string name;
  std::vector<Check> checks;
  nlohmann::json data = nlohmann::json::object();
  std::map<std::string, std::string> tables;  // file name -> CSV text
  double seconds = 0.0;

  bool pass() const;
  nlohmann::json summary() const;
};

struct StudyOptions {
  std::uint64_t seed = 0;
  /// Skip wall-clock checks (useful under sanitizers or heavy load).
  bool check_runtime = true;
};

StudyResult study_linear_game(const StudyOptions& opt);         // 1
StudyResult study_quadratic_exact(const StudyOptions& opt);     // 2
StudyResult study_diracgan(const StudyOptions& opt);            // 3
StudyResult study_order_ladder(const StudyOptions& opt);        // 4
StudyResult study_sgd_modified_flow(const StudyOptions& opt);   // 5
StudyResult study_regime_fidelity(const StudyOptions& opt);     // 6
StudyResult study_dal(const StudyOptions& opt);                 // 7
StudyResult study_game_convergence(const StudyOptions& opt);    // 8
StudyResult study_geometric_complexity(const StudyOptions& opt);// 9
StudyResult study_edge_of_stability(const StudyOptions& opt);   // 10

struct StudyEntry {
  int criterion;
  std::string_view name;
  std::function<StudyResult(const StudyOptions&)> run;
};

const std::vector<StudyEntry>& study_catalog();
StudyResult run_study(int criterion, const StudyOptions& opt);

}  // namespace driftlab

#endif  // DRIFTLAB_STUDIES_HPP_
