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


// File-driven runs. A config is a JSON object whose keys are flat dotted
// paths ("optimizer.h", "problem.eigenvalues", ...); unknown keys are errors.

#ifndef DRIFTLAB_EXPERIMENT_HPP_
#define DRIFTLAB_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftlab/studies.hpp"

namespace driftlab {

enum class OutputFormat { kCsv, kJson };
OutputFormat ParseOutputFormat(std::string_view name);

struct ExperimentConfig {
  nlohmann::json raw = nlohmann::json::object();
  std::filesystem::path out_dir = "driftlab-out";
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::kCsv;
};

/// Reads a config file; throws ConfigError on unreadable or non-object JSON.
ExperimentConfig LoadConfig(const std::filesystem::path& path);

struct RunReport {
  nlohmann::json config;
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
  nlohmann::json summary;
  bool pass = true;
};

RunReport run(const ExperimentConfig& config);

/// Preset names: lineargame, quadratic-exact, diracgan, order-check,
/// sgd-flow, regimes, dal, game-convergence, gc, edge-of-stability.
RunReport reproduce(const std::string& name, const std::filesystem::path& out_dir,
                    std::uint64_t seed, OutputFormat format = OutputFormat::kCsv);
std::vector<std::string> PresetNames();

/// Runs one config per value of "sweep.key" (values from "sweep.values"),
/// each in its own subdirectory, at most "sweep.jobs" at a time.
std::vector<RunReport> sweep(const ExperimentConfig& config);

}  // namespace driftlab

#endif  // DRIFTLAB_EXPERIMENT_HPP_
