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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <doctest.h>

#include "driftlab/common.hpp"
#include "driftlab/experiment.hpp"

using namespace driftlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("driftlab-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(Slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig Config(json raw, const fs::path& out) {
  ExperimentConfig c;
  c.raw = std::move(raw);
  c.out_dir = out;
  return c;
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST_CASE("quadratic GD run follows the contraction law") {
  TempDir dir("quad");
  const json raw = {{"problem.id", "quadratic"}, {"problem.eigenvalues", {1.0}},
                    {"problem.theta0", {1.0}}, {"optimizer.kind", "gd"},
                    {"optimizer.h", 0.5}, {"iterations", 10}};
  const RunReport rep = run(Config(raw, dir.path()));
  const auto rows = ReadCsv(rep.trace_path);
  REQUIRE(rows.size() == 12);  // header plus iterations 0..10
  CHECK(rows[0][0] == "iter");
  CHECK(rows[0][1] == "loss");
  for (int n = 0; n <= 10; ++n) {
    CHECK(std::stoi(rows[n + 1][0]) == n);
    CHECK(std::stod(rows[n + 1][1]) == doctest::Approx(0.5 * std::pow(0.5, 2 * n)).epsilon(1e-12));
  }
  const json s = json::parse(Slurp(rep.summary_path));
  CHECK(s["iterations_run"] == 10);
  CHECK(s["verdicts"][0] == "final loss below initial: true");
}

TEST_CASE("DiracGAN simultaneous run spirals outward") {
  TempDir dir("dirac");
  const json raw = {{"problem.id", "diracgan"}, {"optimizer.kind", "sim"},
                    {"optimizer.h", 0.01}, {"iterations", 1000}};
  const RunReport rep = run(Config(raw, dir.path()));
  CHECK(rep.summary["verdicts"][0] == "sim: radius increased 1000/1000 steps");
  CHECK(ReadCsv(rep.trace_path).size() == 1002);
}

TEST_CASE("objective runs record curvature and drift") {
  TempDir dir("drift");
  const json raw = {{"problem.id", "banana"}, {"optimizer.kind", "gd"}, {"optimizer.h", 0.001},
                    {"iterations", 5}, {"record.lambda0", true}, {"flows", {"ngf", "pf"}},
                    {"drift.substeps", 8}};
  const RunReport rep = run(Config(raw, dir.path()));
  CHECK(rep.summary["lambda0"].contains("first_above_2_over_h"));
  CHECK(rep.summary["drift"].contains("pf"));
  CHECK(ReadCsv(dir.path() / "drift.csv").size() == 11);
}

TEST_CASE("config errors name the offending key or id") {
  TempDir dir("errors");
  auto expect = [&](const json& raw, const std::string& needle) {
    try {
      run(Config(raw, dir.path()));
      FAIL("expected ConfigError for " << raw.dump());
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfigError);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect({{"problem.id", "himmelblau"}}, "himmelblau");
  expect({{"problem.id", "banana"}, {"optimizer.lr", 0.1}}, "optimizer.lr");
  expect({{"problem.id", "banana"}, {"optimizer.kind", "adam"}}, "adam");
  expect(json::object(), "problem.id");
}

TEST_CASE("divergent runs report the iteration") {
  TempDir dir("nonfinite");
  const json raw = {{"problem.id", "quadratic"}, {"problem.eigenvalues", {1.0}},
                    {"optimizer.h", 10.0}, {"iterations", 1000}};
  try {
    run(Config(raw, dir.path()));
    FAIL("expected Nonfinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNonfinite);
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("identical configs give identical bytes") {
  TempDir a("det-a"), b("det-b");
  const json raw = {{"problem.id", "mlp"}, {"mlp.widths", {2, 5, 3}}, {"data.n_per_class", 4},
                    {"optimizer.h", 0.1}, {"iterations", 20}, {"record.lambda0", true}};
  ExperimentConfig ca = Config(raw, a.path()), cb = Config(raw, b.path());
  ca.seed = cb.seed = 7;
  run(ca);
  run(cb);
  CHECK(Slurp(a.path() / "trace.csv") == Slurp(b.path() / "trace.csv"));
  ExperimentConfig cc = Config(raw, b.path());
  cc.seed = 8;
  run(cc);
  CHECK(Slurp(a.path() / "trace.csv") != Slurp(b.path() / "trace.csv"));
}

TEST_CASE("JSON output format") {
  TempDir dir("json");
  ExperimentConfig c = Config({{"problem.id", "cos1d"}, {"iterations", 3}}, dir.path());
  c.format = OutputFormat::kJson;
  const RunReport rep = run(c);
  CHECK(rep.trace_path.extension() == ".json");
  const json t = json::parse(Slurp(rep.trace_path));
  CHECK(t.size() == 4);
  CHECK_THROWS_AS(ParseOutputFormat("xml"), Error);
}

TEST_CASE("config files") {
  TempDir dir("load");
  const fs::path p = dir.path() / "c.json";
  std::ofstream(p) << R"({"problem.id": "banana", "seed": 5, "output": "elsewhere"})";
  const ExperimentConfig c = LoadConfig(p);
  CHECK(c.seed == 5);
  CHECK(c.out_dir == "elsewhere");
  std::ofstream(p) << "[1, 2]";
  CHECK(KindOf([&] { LoadConfig(p); }) == ErrorKind::kConfigError);
  CHECK(KindOf([&] { LoadConfig(dir.path() / "missing.json"); }) == ErrorKind::kConfigError);
}

TEST_CASE("presets") {
  const auto names = PresetNames();
  CHECK(names.size() == 10);
  TempDir dir("preset");
  CHECK(KindOf([&] { reproduce("nope", dir.path(), 0); }) == ErrorKind::kUnknownPreset);
  const RunReport rep = reproduce("regimes", dir.path(), 0);
  CHECK(rep.pass);
  CHECK(fs::exists(dir.path() / "summary.json"));
  CHECK(json::parse(Slurp(dir.path() / "summary.json"))["preset"] == "regimes");
}

TEST_CASE("sweeps run each value in its own directory") {
  TempDir dir("sweep");
  const json raw = {{"problem.id", "quadratic"}, {"problem.eigenvalues", {1.0, 3.0}},
                    {"iterations", 5}, {"sweep.key", "optimizer.h"},
                    {"sweep.values", {0.1, 0.2, 0.3}}, {"sweep.jobs", 2}};
  const auto reports = sweep(Config(raw, dir.path()));
  REQUIRE(reports.size() == 3);
  CHECK(fs::exists(dir.path() / "optimizer.h=0.2" / "trace.csv"));
  const json index = json::parse(Slurp(dir.path() / "sweep.json"));
  CHECK(index["runs"].size() == 3);
  CHECK(KindOf([&] { sweep(Config({{"problem.id", "banana"}}, dir.path())); }) ==
        ErrorKind::kConfigError);
}

#ifdef DRIFTLAB_CLI_PATH
TEST_CASE("command-line exit codes") {
  TempDir dir("cli");
  auto write = [&](const std::string& name, const std::string& body) {
    const fs::path p = dir.path() / name;
    std::ofstream(p) << body;
    return p.string();
  };
  auto status = [&](const std::string& args) {
    const std::string cmd = std::string(DRIFTLAB_CLI_PATH) + " " + args + " > " +
                            (dir.path() / "log.txt").string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string out = " --out " + (dir.path() / "out").string();
  const auto ok = write("ok.json", R"({"problem.id": "banana", "iterations": 3})");
  const auto bad = write("bad.json", R"({"problem.id": "banana", "optimizer.lr": 1})");
  const auto diverge = write("div.json",
                             R"({"problem.id": "quadratic", "problem.eigenvalues": [1],
                                 "optimizer.h": 10, "iterations": 1000})");
  CHECK(status("run --config " + ok + out) == 0);
  CHECK(status("run --config " + ok + out + " --format json") == 0);
  CHECK(status("run --config " + bad + out) == 2);
  CHECK(status("run --config " + diverge + out) == 1);
  CHECK(status("reproduce nope" + out) == 2);
  CHECK(status("reproduce regimes" + out) == 0);
  CHECK(status("run" + out) == 2);
  CHECK(status("frobnicate") == 2);
}
#endif
