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


// driftlab command-line runner.
//
//   driftlab run --config cfg.json [--out DIR] [--seed N] [--format csv|json]
//   driftlab reproduce NAME [--out DIR] [--seed N] [--format csv|json]
//   driftlab sweep --config cfg.json [--out DIR] [--seed N] [--format csv|json]
//
// Exit codes: 0 pass, 1 acceptance failure or runtime error, 2 config error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "driftlab/common.hpp"
#include "driftlab/experiment.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "seed for every stochastic choice");
  cmd->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

driftlab::ExperimentConfig Resolve(const std::string& path, const Common& c) {
  driftlab::ExperimentConfig cfg = driftlab::LoadConfig(path);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.seed) cfg.seed = *c.seed;
  cfg.format = driftlab::ParseOutputFormat(c.format);
  return cfg;
}

void PrintReport(const driftlab::RunReport& r) {
  std::cout << r.summary.dump(2) << "\n";
  std::cout << "summary: " << r.summary_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftlab: discretisation drift experiments"};
  app.require_subcommand(1);

  Common common;
  std::string config_path;
  std::string preset;

  auto* run_cmd = app.add_subcommand("run", "run one config");
  run_cmd->add_option("--config", config_path, "JSON config with flat keys")->required();
  AddCommon(run_cmd, common);

  auto* repro_cmd = app.add_subcommand("reproduce", "run a canonical study and check it");
  repro_cmd->add_option("name", preset, "preset name")->required();
  AddCommon(repro_cmd, common);

  auto* sweep_cmd = app.add_subcommand("sweep", "run one config per sweep value");
  sweep_cmd->add_option("--config", config_path, "JSON config with sweep.key/sweep.values")
      ->required();
  AddCommon(sweep_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run_cmd) {
      PrintReport(driftlab::run(Resolve(config_path, common)));
      return kPass;
    }
    if (*sweep_cmd) {
      const auto cfg = Resolve(config_path, common);
      for (const auto& r : driftlab::sweep(cfg)) {
        std::cout << r.summary_path.string() << "\n";
      }
      return kPass;
    }
    const std::string out = common.out.empty() ? "driftlab-out/" + preset : common.out;
    const auto report = driftlab::reproduce(preset, out, common.seed.value_or(0),
                                            driftlab::ParseOutputFormat(common.format));
    for (const auto& c : report.summary["checks"]) {
      std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
                << " (" << c["detail"].get<std::string>() << ")\n";
    }
    std::cout << preset << ": " << (report.pass ? "PASS" : "FAIL") << "\n";
    std::cout << "summary: " << report.summary_path.string() << "\n";
    return report.pass ? kPass : kFail;
  } catch (const driftlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const auto k = e.kind();
    return k == driftlab::ErrorKind::kConfigError || k == driftlab::ErrorKind::kUnknownPreset
               ? kConfigError
               : kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
