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


#include "driftlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "driftlab/game_problem.hpp"
#include "driftlab/games.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/mlp.hpp"
#include "driftlab/optimizers.hpp"
#include "driftlab/problems.hpp"
#include "driftlab/stability.hpp"

namespace driftlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void ConfigFail(const std::string& what) { throw Error(ErrorKind::kConfigError, what); }

// Reads flat keys and remembers which ones were used, so leftovers can be
// reported as typos.
class Keys {
 public:
  explicit Keys(const json& raw) : raw_(raw) {
    if (!raw_.is_object()) ConfigFail("config must be a JSON object");
  }

  bool has(const std::string& key) const { return raw_.contains(key); }

  template <typename T>
  std::optional<T> opt(const std::string& key) {
    used_.insert(key);
    if (!raw_.contains(key)) return std::nullopt;
    try {
      return raw_.at(key).get<T>();
    } catch (const json::exception&) {
      ConfigFail("key '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    return opt<T>(key).value_or(std::move(fallback));
  }

  void finish() const {
    for (const auto& [key, value] : raw_.items()) {
      if (!used_.count(key)) ConfigFail("unknown config key '" + key + "'");
    }
  }

 private:
  const json& raw_;
  std::set<std::string> used_;
};

Vec ToVec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

Mat ToMat(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) ConfigFail("problem.matrix is empty");
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) ConfigFail("problem.matrix rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(Index(i), Index(j)) = rows[i][j];
  }
  return m;
}

Mat RandomSpd(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat g(d, d);
  for (Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  Mat a = g * g.transpose() / static_cast<double>(d) + 0.5 * Mat::Identity(d, d);
  return (0.5 * (a + a.transpose())).eval();
}

Activation ParseActivationOrFail(const std::string& s) {
  try {
    return ParseActivation(s);
  } catch (const Error& e) {
    ConfigFail(e.what());
  }
}

struct Objective {
  ProblemPtr problem;
  Vec theta0;
};

Objective BuildObjective(const std::string& id, Keys& k, std::uint64_t seed) {
  Objective o;
  std::optional<std::vector<double>> theta0 = k.opt<std::vector<double>>("problem.theta0");
  if (id == "quadratic") {
    Mat a;
    if (auto m = k.opt<std::vector<std::vector<double>>>("problem.matrix")) {
      a = ToMat(*m);
    } else if (auto ev = k.opt<std::vector<double>>("problem.eigenvalues")) {
      a = ToVec(*ev).asDiagonal();
    } else {
      a = RandomSpd(k.get<Index>("problem.dim", 2), seed);
    }
    const auto b_in = k.opt<std::vector<double>>("problem.b");
    const Vec b = b_in ? ToVec(*b_in) : Vec::Zero(a.rows());
    try {
      o.problem = quadratic_new(a, b, k.get<double>("problem.c", 0.0));
    } catch (const Error& e) {
      ConfigFail(e.what());
    }
    o.theta0 = theta0 ? ToVec(*theta0) : Vec::Ones(a.rows());
  } else if (id == "banana") {
    o.problem = banana_new();
    o.theta0 = theta0 ? ToVec(*theta0) : Vec(Eigen::Vector2d(-1.0, 1.0));
  } else if (id == "cos1d") {
    o.problem = cos1d_new();
    o.theta0 = theta0 ? ToVec(*theta0) : Vec::Constant(1, 0.5);
  } else if (id == "dirac-loss") {
    o.problem = dirac_gan_loss_new();
    o.theta0 = theta0 ? ToVec(*theta0) : Vec::Constant(2, 0.5);
  } else if (id == "mlp") {
    const auto widths = k.get<std::vector<Index>>("mlp.widths", {4, 10, 10, 10, 3});
    if (widths.size() < 2) ConfigFail("mlp.widths needs at least two entries");
    const Activation act = ParseActivationOrFail(k.get<std::string>("mlp.activation", "elu"));
    MlpSpec spec;
    try {
      spec.loss = ParseLoss(k.get<std::string>("mlp.loss", "mse"));
      spec.model = InitModel(widths, act, ParseInit(k.get<std::string>("mlp.init", "standard")),
                             seed + 1);
    } catch (const Error& e) {
      ConfigFail(e.what());
    }
    const Dataset ds = GaussianBlobs(k.get<Index>("data.n_per_class", 20), widths.back(),
                                     widths.front(), k.get<double>("data.spread", 1.0), seed);
    spec.inputs = ds.inputs;
    spec.targets = ds.targets;
    o.theta0 = theta0 ? ToVec(*theta0) : Flatten(spec.model);
    o.problem = mlp_new(std::move(spec));
  } else {
    ConfigFail("unknown problem id '" + id + "'");
  }
  if (o.theta0.size() != o.problem->dim()) ConfigFail("problem.theta0 has the wrong length");
  return o;
}

struct GameSetup {
  GamePtr game;
  Vec phi0, theta0;
};

GameSetup BuildGame(const std::string& id, Keys& k, std::uint64_t seed) {
  GameSetup g;
  if (id == "lineargame") {
    g.game = linear_game_new(k.get<double>("game.eps1", 0.09), k.get<double>("game.eps2", 0.09));
    g.phi0 = Vec::Ones(1);
    g.theta0 = Vec::Ones(1);
  } else if (id == "diracgan") {
    g.game = dirac_gan_new();
    g.phi0 = Vec::Constant(1, 0.5);
    g.theta0 = Vec::Constant(1, 0.5);
  } else if (id == "zero-sum-quadratic") {
    const Index dim = k.get<Index>("problem.dim", 4);
    const Index split = k.get<Index>("game.split", dim / 2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat a(dim, dim);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
    a = (0.5 * (a + a.transpose())).eval();
    Vec b(dim);
    for (Index i = 0; i < dim; ++i) b(i) = nd(rng);
    try {
      g.game = zero_sum_game_from_loss(quadratic_new(a, b), split);
    } catch (const Error& e) {
      ConfigFail(e.what());
    }
    g.phi0 = Vec::Ones(split);
    g.theta0 = Vec::Ones(dim - split);
  } else {
    ConfigFail("unknown problem id '" + id + "'");
  }
  if (auto p = k.opt<std::vector<double>>("game.phi0")) g.phi0 = ToVec(*p);
  if (auto t = k.opt<std::vector<double>>("game.theta0")) g.theta0 = ToVec(*t);

  if (auto scheme = k.opt<std::string>("regularizer.scheme")) {
    RegScheme rs;
    try {
      rs.kind = ParseRegScheme(*scheme);
    } catch (const Error& e) {
      ConfigFail(e.what());
    }
    rs.zeta = k.get<double>("regularizer.zeta", 0.0);
    g.game = regularized_game(g.game, rs, k.get<double>("optimizer.h", 0.1),
                              k.get<double>("game.v_phi", 1.0), k.get<double>("game.v_theta", 1.0));
  } else if (k.has("regularizer.c1") || k.has("regularizer.c2") || k.has("regularizer.s1") ||
             k.has("regularizer.s2")) {
    RegCoefficients c{k.get<double>("regularizer.c1", 0.0), k.get<double>("regularizer.c2", 0.0),
                      k.get<double>("regularizer.s1", 0.0), k.get<double>("regularizer.s2", 0.0)};
    g.game = regularized_game(g.game, c);
  }
  return g;
}

bool IsGameId(const std::string& id) {
  return id == "lineargame" || id == "diracgan" || id == "zero-sum-quadratic";
}

// Minimal CSV → JSON conversion for the tables produced here (no quoting).
json CsvToJson(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header;
  json rows = json::array();
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header.empty()) {
      header = split(line);
      continue;
    }
    const auto cells = split(line);
    json row = json::object();
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (!cells[i].empty() && end && *end == '\0') {
        row[header[i]] = v;
      } else {
        row[header[i]] = cells[i];
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

fs::path WriteTable(const fs::path& dir, const std::string& csv_name, const std::string& csv,
                    OutputFormat format) {
  fs::path path = dir / csv_name;
  if (format == OutputFormat::kJson) {
    path.replace_extension(".json");
    WriteText(path, CsvToJson(csv).dump(2) + "\n");
  } else {
    WriteText(path, csv);
  }
  return path;
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kInvalidArgument, "cannot create " + dir.string());
}

json Stats(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  double sum = 0.0;
  for (double x : v) sum += x;
  return {{"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())},
          {"mean", sum / static_cast<double>(v.size())}};
}

RunReport RunObjective(const ExperimentConfig& cfg, Keys& k, const std::string& id) {
  const Objective obj = BuildObjective(id, k, cfg.seed);
  const Problem& p = *obj.problem;
  const std::string kind = k.get<std::string>("optimizer.kind", "gd");
  const double h = k.get<double>("optimizer.h", 0.1);
  const double beta = k.get<double>("optimizer.beta", 0.9);
  DalConfig dal;
  dal.p = k.get<double>("dal.p", 1.0);
  dal.lr_cap = k.get<double>("dal.lr_cap", 5.0);
  const std::string proxy = k.get<std::string>("dal.proxy", "exact");
  if (proxy == "fd") {
    dal.proxy = DalProxy::kFdApprox;
  } else if (proxy != "exact") {
    ConfigFail("dal.proxy must be 'exact' or 'fd'");
  }
  const long iters = k.get<long>("iterations", 100);
  const bool record_lambda = k.get<bool>("record.lambda0", false);
  const auto flow_names = k.get<std::vector<std::string>>("flows", {});
  const long substeps = k.get<long>("drift.substeps", 64);
  k.finish();

  if (iters < 0) ConfigFail("iterations must be non-negative");
  if (!(h > 0.0)) ConfigFail("optimizer.h must be positive");
  const std::set<std::string> kinds{"gd", "momentum", "dal", "dal-momentum", "dal-per-parameter"};
  if (!kinds.count(kind)) ConfigFail("unknown optimizer '" + kind + "' for problem '" + id + "'");
  if (kind.rfind("dal", 0) == 0) {
    try {
      dal.validate();
    } catch (const Error& e) {
      ConfigFail(e.what());
    }
  }
  for (const auto& f : flow_names) ParseFlow(f, 1.0);  // name check only

  Vec theta = obj.theta0;
  Vec velocity = Vec::Zero(theta.size());
  std::vector<TrainRow> rows;
  std::ostringstream drift_csv;
  drift_csv << "iter,flow,h,drift\n";
  std::map<std::string, std::vector<double>> drifts;
  std::vector<double> lambdas;
  long first_above = -1;
  bool critical = false;
  for (long i = 0; i <= iters; ++i) {
    TrainRow row;
    row.iter = i;
    row.loss = p.eval(theta);
    const Vec g = p.grad(theta);
    row.grad_norm = g.norm();
    if (!std::isfinite(row.loss) || !g.allFinite()) {
      throw Error(ErrorKind::kNonfinite, "nonfinite loss at iteration " + std::to_string(i));
    }
    const bool dal_kind = kind.rfind("dal", 0) == 0;
    if (dal_kind && row.grad_norm < 1e-12) critical = true;
    if (critical) {
      row.lr = 0.0;
    } else if (kind == "dal" || kind == "dal-momentum") {
      row.lr = dal_lr(p, theta, dal);
    } else if (kind == "dal-per-parameter") {
      row.lr = dal_per_parameter_lr(p, theta, dal).mean();
    } else {
      row.lr = h;
    }
    if (record_lambda) {
      const auto rep = stability_report(p, theta, row.lr > 0 ? row.lr : h, 1);
      row.lambda0 = rep.records.front().lambda;
      lambdas.push_back(*row.lambda0);
      if (first_above < 0 && *row.lambda0 > 2.0 / (row.lr > 0 ? row.lr : h)) first_above = i;
    }
    rows.push_back(row);
    if (i == iters || critical) break;
    for (const auto& name : flow_names) {
      const FlowKind flow = ParseFlow(name, row.lr);
      const double d = per_iteration_drift(p, theta, row.lr, flow, DriftIntegrator(row.lr, substeps));
      drifts[name].push_back(d);
      drift_csv << i << ',' << name << ',' << FormatDouble(row.lr) << ',' << FormatDouble(d) << '\n';
    }
    if (kind == "gd") {
      theta = gd_step(p, theta, h);
    } else if (kind == "momentum") {
      std::tie(theta, velocity) = momentum_step(p, theta, velocity, h, beta);
    } else if (kind == "dal") {
      theta = dal_step(p, theta, dal);
    } else if (kind == "dal-momentum") {
      std::tie(theta, velocity) = dal_momentum_step(p, theta, velocity, beta, dal);
    } else {
      theta = dal_per_parameter_step(p, theta, dal);
    }
  }

  EnsureDir(cfg.out_dir);
  std::ostringstream trace;
  write_train_csv(trace, rows);
  RunReport rep;
  rep.config = cfg.raw;
  rep.trace_path = WriteTable(cfg.out_dir, "trace.csv", trace.str(), cfg.format);
  json s;
  s["config"] = cfg.raw;
  s["seed"] = cfg.seed;
  s["trace"] = rep.trace_path.filename().string();
  s["iterations_run"] = rows.back().iter;
  s["initial_loss"] = rows.front().loss;
  s["final_loss"] = rows.back().loss;
  s["stopped_at_critical_point"] = critical;
  s["verdicts"] = json::array({std::string("final loss below initial: ") +
                               (rows.back().loss < rows.front().loss ? "true" : "false")});
  if (record_lambda) {
    s["lambda0"] = Stats(lambdas);
    s["lambda0"]["first_above_2_over_h"] = first_above;
  }
  if (!flow_names.empty()) {
    s["drift_trace"] =
        WriteTable(cfg.out_dir, "drift.csv", drift_csv.str(), cfg.format).filename().string();
    for (const auto& [name, v] : drifts) s["drift"][name] = Stats(v);
  }
  rep.summary = s;
  rep.summary_path = cfg.out_dir / "summary.json";
  WriteText(rep.summary_path, s.dump(2) + "\n");
  return rep;
}

RunReport RunGame(const ExperimentConfig& cfg, Keys& k, const std::string& id) {
  const GameSetup gs = BuildGame(id, k, cfg.seed);
  const std::string kind = k.get<std::string>("optimizer.kind", "sim");
  GameStepConfig step;
  step.h = k.get<double>("optimizer.h", 0.1);
  step.v_phi = k.get<double>("game.v_phi", 1.0);
  step.v_theta = k.get<double>("game.v_theta", 1.0);
  step.m = k.get<int>("game.m", 1);
  step.k = k.get<int>("game.k", 1);
  const long iters = k.get<long>("iterations", 100);
  k.finish();
  if (kind != "sim" && kind != "alt" && kind != "rk4") {
    ConfigFail("unknown optimizer '" + kind + "' for game '" + id + "'");
  }
  if (kind == "alt") step.mode = GameMode::kAlternating;
  try {
    step.validate();
  } catch (const Error& e) {
    ConfigFail(e.what());
  }
  if (iters < 0) ConfigFail("iterations must be non-negative");
  if (gs.phi0.size() != gs.game->dim_phi() || gs.theta0.size() != gs.game->dim_theta()) {
    ConfigFail("initial player states have the wrong length");
  }

  std::ostringstream csv;
  csv << "iter";
  for (Index i = 0; i < gs.phi0.size(); ++i) csv << ",phi_" << i;
  for (Index i = 0; i < gs.theta0.size(); ++i) csv << ",theta_" << i;
  csv << ",norm\n";
  PlayerState s{gs.phi0, gs.theta0};
  auto norm = [](const PlayerState& x) {
    return std::sqrt(x.first.squaredNorm() + x.second.squaredNorm());
  };
  long increased = 0;
  double n0 = norm(s), prev = n0, max_norm = n0;
  for (long i = 0; i <= iters; ++i) {
    const double n = norm(s);
    if (!std::isfinite(n)) {
      throw Error(ErrorKind::kNonfinite, "nonfinite state at iteration " + std::to_string(i));
    }
    if (i > 0 && n > prev) ++increased;
    max_norm = std::max(max_norm, n);
    prev = n;
    csv << i;
    for (Index j = 0; j < s.first.size(); ++j) csv << ',' << FormatDouble(s.first(j));
    for (Index j = 0; j < s.second.size(); ++j) csv << ',' << FormatDouble(s.second(j));
    csv << ',' << FormatDouble(n) << '\n';
    if (i == iters) break;
    s = kind == "rk4" ? game_rk4_step(*gs.game, s.first, s.second, step)
                      : game_step(*gs.game, s.first, s.second, step);
  }

  EnsureDir(cfg.out_dir);
  RunReport rep;
  rep.config = cfg.raw;
  rep.trace_path = WriteTable(cfg.out_dir, "trace.csv", csv.str(), cfg.format);
  json sj;
  sj["config"] = cfg.raw;
  sj["seed"] = cfg.seed;
  sj["trace"] = rep.trace_path.filename().string();
  sj["iterations_run"] = iters;
  sj["initial_norm"] = n0;
  sj["final_norm"] = prev;
  sj["max_norm"] = max_norm;
  sj["verdicts"] = json::array({kind + ": radius increased " + std::to_string(increased) + "/" +
                                std::to_string(iters) + " steps"});
  rep.summary = sj;
  rep.summary_path = cfg.out_dir / "summary.json";
  WriteText(rep.summary_path, sj.dump(2) + "\n");
  return rep;
}

}  // namespace

OutputFormat ParseOutputFormat(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw Error(ErrorKind::kConfigError, "format must be csv or json");
}

ExperimentConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfigError, "cannot read config " + path.string());
  ExperimentConfig cfg;
  try {
    cfg.raw = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfigError, path.string() + ": " + e.what());
  }
  if (!cfg.raw.is_object()) throw Error(ErrorKind::kConfigError, "config must be a JSON object");
  // Optional in-file defaults; command-line flags override them.
  if (cfg.raw.contains("seed")) {
    if (!cfg.raw["seed"].is_number_unsigned()) {
      throw Error(ErrorKind::kConfigError, "seed must be a non-negative integer");
    }
    cfg.seed = cfg.raw["seed"].get<std::uint64_t>();
  }
  if (cfg.raw.contains("output")) {
    if (!cfg.raw["output"].is_string()) throw Error(ErrorKind::kConfigError, "output must be a string");
    cfg.out_dir = cfg.raw["output"].get<std::string>();
  }
  return cfg;
}

RunReport run(const ExperimentConfig& config) {
  Keys k(config.raw);
  k.opt<json>("seed");
  k.opt<json>("output");
  const auto id = k.opt<std::string>("problem.id");
  if (!id) ConfigFail("problem.id is required");
  return IsGameId(*id) ? RunGame(config, k, *id) : RunObjective(config, k, *id);
}

std::vector<std::string> PresetNames() {
  std::vector<std::string> out;
  for (const auto& e : study_catalog()) out.emplace_back(e.name);
  return out;
}

RunReport reproduce(const std::string& name, const fs::path& out_dir, std::uint64_t seed,
                    OutputFormat format) {
  const StudyEntry* entry = nullptr;
  for (const auto& e : study_catalog()) {
    if (e.name == name) entry = &e;
  }
  if (!entry) throw Error(ErrorKind::kUnknownPreset, "unknown preset '" + name + "'");
  StudyOptions opt;
  opt.seed = seed;
  const StudyResult result = entry->run(opt);

  EnsureDir(out_dir);
  RunReport rep;
  rep.config = {{"preset", name}, {"seed", seed}};
  for (const auto& [file, csv] : result.tables) {
    const fs::path p = WriteTable(out_dir, file, csv, format);
    if (rep.trace_path.empty()) rep.trace_path = p;
  }
  rep.summary = result.summary();
  rep.summary["preset"] = name;
  rep.summary_path = out_dir / "summary.json";
  WriteText(rep.summary_path, rep.summary.dump(2) + "\n");
  rep.pass = result.pass();
  return rep;
}

std::vector<RunReport> sweep(const ExperimentConfig& config) {
  if (!config.raw.is_object()) ConfigFail("config must be a JSON object");
  if (!config.raw.contains("sweep.key") || !config.raw["sweep.key"].is_string()) {
    ConfigFail("sweep.key (string) is required");
  }
  if (!config.raw.contains("sweep.values") || !config.raw["sweep.values"].is_array() ||
      config.raw["sweep.values"].empty()) {
    ConfigFail("sweep.values (non-empty array) is required");
  }
  const std::string key = config.raw["sweep.key"].get<std::string>();
  const json values = config.raw["sweep.values"];
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  if (config.raw.contains("sweep.jobs")) {
    if (!config.raw["sweep.jobs"].is_number_integer() || config.raw["sweep.jobs"].get<long>() < 1) {
      ConfigFail("sweep.jobs must be a positive integer");
    }
    jobs = config.raw["sweep.jobs"].get<std::size_t>();
  }

  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig c = config;
    c.raw.erase("sweep.key");
    c.raw.erase("sweep.values");
    c.raw.erase("sweep.jobs");
    c.raw.erase("output");
    c.raw[key] = v;
    std::string tag = key + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    std::replace_if(tag.begin(), tag.end(), [](char ch) { return ch == '/' || ch == ' ' || ch == '"'; }, '_');
    c.out_dir = config.out_dir / tag;
    configs.push_back(std::move(c));
  }
  std::vector<RunReport> reports(configs.size());
  for (std::size_t start = 0; start < configs.size(); start += jobs) {
    std::vector<std::future<RunReport>> batch;
    const std::size_t end = std::min(configs.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&configs, i] { return run(configs[i]); }));
    }
    for (std::size_t i = start; i < end; ++i) reports[i] = batch[i - start].get();
  }
  json index = json::array();
  for (const auto& r : reports) index.push_back(r.summary_path.lexically_relative(config.out_dir).string());
  EnsureDir(config.out_dir);
  WriteText(config.out_dir / "sweep.json", json{{"key", key}, {"runs", index}}.dump(2) + "\n");
  return reports;
}

}  // namespace driftlab
