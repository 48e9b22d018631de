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


#include "driftlab/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "driftlab/calculus.hpp"
#include "driftlab/flows.hpp"
#include "driftlab/game_problem.hpp"
#include "driftlab/games.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/mlp.hpp"
#include "driftlab/optimizers.hpp"
#include "driftlab/problems.hpp"
#include "driftlab/stability.hpp"

namespace driftlab {
namespace {

using Clock = std::chrono::steady_clock;

std::string Str(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

class Study {
 public:
  Study(int criterion, std::string name, const StudyOptions& opt) : opt_(opt) {
    r_.criterion = criterion;
    r_.name = std::move(name);
    r_.data["seed"] = opt.seed;
  }

  void check(std::string name, bool pass, std::string detail) {
    r_.checks.push_back({std::move(name), pass, std::move(detail)});
  }
  nlohmann::json& data() { return r_.data; }
  std::string& table(const std::string& file) { return r_.tables[file]; }

  StudyResult finish(double limit_seconds = 0.0) {
    r_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    if (limit_seconds > 0.0 && opt_.check_runtime) {
      check(Str("runtime < %g s", limit_seconds), r_.seconds < limit_seconds,
            Str("%.3f s", r_.seconds));
    }
    return std::move(r_);
  }

 private:
  StudyResult r_;
  StudyOptions opt_;
  Clock::time_point start_ = Clock::now();
};

Vec Gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

Mat GaussianMat(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

Mat RandomOrthogonal(std::mt19937_64& rng, Index n) {
  Eigen::HouseholderQR<Mat> qr(GaussianMat(rng, n, n));
  return qr.householderQ() * Mat::Identity(n, n);
}

double JointNorm(const PlayerState& s) {
  return std::sqrt(s.first.squaredNorm() + s.second.squaredNorm());
}

double JointDistance(const PlayerState& a, const PlayerState& b) {
  return std::sqrt((a.first - b.first).squaredNorm() + (a.second - b.second).squaredNorm());
}

}  // namespace

bool StudyResult::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json StudyResult::summary() const {
  nlohmann::json j;
  j["criterion"] = criterion;
  j["name"] = name;
  j["pass"] = pass();
  j["seconds"] = seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["data"] = data;
  return j;
}

// ---------------------------------------------------------------------------

StudyResult study_linear_game(const StudyOptions& opt) {
  Study s(1, "lineargame", opt);
  const auto game = linear_game_new(0.09, 0.09);
  GameStepConfig sim;
  sim.h = 0.2;
  GameStepConfig alt = sim;
  alt.mode = GameMode::kAlternating;

  const Vec origin = Vec::Zero(1);
  const auto js = game_modified_jacobian(*game, origin, origin, sim);
  const auto ja = game_modified_jacobian(*game, origin, origin, alt);
  s.data()["trace_sim"] = js.trace;
  s.data()["trace_alt"] = ja.trace;
  s.data()["det_alt"] = ja.det;
  s.data()["verdict_sim"] = VerdictName(js.verdict);
  s.data()["verdict_alt"] = VerdictName(ja.verdict);
  s.check("trace of simultaneous modified Jacobian = 0.198 +- 1e-3",
          std::abs(js.trace - 0.198) <= 1e-3, Str("%.6f", js.trace));
  s.check("trace of alternating modified Jacobian = -0.00162 +- 1e-4",
          std::abs(ja.trace + 0.00162) <= 1e-4, Str("%.6f", ja.trace));
  s.check("det of alternating modified Jacobian = 0.9819 +- 1e-3",
          std::abs(ja.det - 0.9819) <= 1e-3, Str("%.6f", ja.det));

  std::ostringstream csv;
  csv << "mode,iter,phi,theta,norm\n";
  const PlayerState start{Vec::Ones(1), Vec::Ones(1)};
  const double n0 = JointNorm(start);
  auto row = [&](const char* mode, long i, const PlayerState& p) {
    csv << mode << ',' << i << ',' << FormatDouble(p.first(0)) << ','
        << FormatDouble(p.second(0)) << ',' << FormatDouble(JointNorm(p)) << '\n';
  };

  PlayerState p = start;
  long grew_at = -1;
  double max_ratio = 1.0;
  row("sim", 0, p);
  for (long i = 1; i <= 500; ++i) {
    p = game_sim_step(*game, p.first, p.second, sim);
    row("sim", i, p);
    max_ratio = std::max(max_ratio, JointNorm(p) / n0);
    if (grew_at < 0 && JointNorm(p) >= 10.0 * n0) grew_at = i;
  }
  s.data()["sim_max_growth_500"] = max_ratio;
  s.data()["sim_steps_to_10x"] = grew_at;
  s.check("simultaneous run grows >= 10x within 500 steps", grew_at > 0,
          Str("max growth %.4g, first 10x at step %ld", max_ratio, grew_at));

  p = start;
  long below_at = -1;
  double norm_5000 = 0.0;
  row("alt", 0, p);
  // Run past the budget so the report says how far off a miss is.
  for (long i = 1; i <= 200000 && below_at < 0; ++i) {
    p = game_alt_step(*game, p.first, p.second, alt);
    if (i <= 5000) row("alt", i, p);
    if (i == 5000) norm_5000 = JointNorm(p);
    if (JointNorm(p) < 1e-3) below_at = i;
  }
  if (below_at > 0 && below_at < 5000) norm_5000 = JointNorm(p);
  s.data()["sim_diverged"] = grew_at > 0;
  s.data()["alt_converged"] = below_at > 0 && below_at <= 5000;
  s.data()["alt_norm_5000"] = norm_5000;
  s.data()["alt_steps_below_1e-3"] = below_at;
  s.check("alternating run falls below 1e-3 within 5000 steps", below_at > 0 && below_at <= 5000,
          Str("norm at 5000 = %.4g, first below 1e-3 at step %ld", norm_5000, below_at));
  s.table("lineargame_trajectory.csv") = csv.str();
  return s.finish(1.0);
}

// ---------------------------------------------------------------------------

StudyResult study_quadratic_exact(const StudyOptions& opt) {
  Study s(2, "quadratic-exact", opt);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> ud(0.2, 5.0);
  const double targets[3] = {0.8, 1.7, 2.1};  // h·λmax per regime
  const int iters = 50;
  const long substeps = 128;

  std::ostringstream csv;
  csv << "problem,dim,h,h_lambda_max,regime,closed_form_error,integrator_error,theta0_norm\n";
  double worst_cf = 0.0, worst_int = 0.0;
  bool cf_ok = true, int_ok = true;
  int regimes_seen[3] = {0, 0, 0};
  for (int q = 0; q < 20; ++q) {
    const Index d = 1 + q % 10;
    const double target = targets[q % 3];
    Vec lambda(d);
    double h = 0.0;
    for (;;) {
      for (Index i = 0; i < d; ++i) lambda(i) = ud(rng);
      h = target / lambda.maxCoeff();
      // Keep every direction off the singular point hλ = 1.
      if (((h * lambda).array() - 1.0).abs().minCoeff() > 1e-3) break;
    }
    const Mat qm = RandomOrthogonal(rng, d);
    Mat a = qm * lambda.asDiagonal() * qm.transpose();
    a = (0.5 * (a + a.transpose())).eval();
    const Vec b = Gaussian(rng, d);
    const Vec theta0 = Gaussian(rng, d);
    const auto problem = quadratic_new(a, b);
    regimes_seen[static_cast<int>(classify(target).regime)]++;

    IntegratorConfig cfg;
    cfg.scheme = Scheme::kRk4;
    cfg.delta = h / static_cast<double>(substeps);
    cfg.record_every = substeps;
    cfg.frozen_spectrum = true;  // constant Hessian: the frozen basis is exact
    const Trajectory traj =
        integrate(FlowKind::PF(h), *problem, theta0.cast<Complex>(), iters * h, cfg);

    Vec x = theta0;
    double err_cf = 0.0, err_int = 0.0;
    for (int n = 1; n <= iters; ++n) {
      x = gd_step(*problem, x, h);
      const CVec cf = pf_quadratic_closed_form(a, b, theta0, n * h, h);
      err_cf = std::max(err_cf, (x.cast<Complex>() - cf).norm());
      err_int = std::max(err_int, (x.cast<Complex>() - traj.states[n]).norm());
    }
    const double scale = 1.0 + theta0.norm();
    cf_ok = cf_ok && err_cf <= 1e-9 * scale;
    int_ok = int_ok && err_int <= 1e-4 * scale;
    worst_cf = std::max(worst_cf, err_cf / scale);
    worst_int = std::max(worst_int, err_int / scale);
    csv << q << ',' << d << ',' << FormatDouble(h) << ',' << FormatDouble(target) << ','
        << RegimeName(classify(target).regime) << ',' << FormatDouble(err_cf) << ','
        << FormatDouble(err_int) << ',' << FormatDouble(theta0.norm()) << '\n';
  }
  s.data()["worst_closed_form_error_scaled"] = worst_cf;
  s.data()["worst_integrator_error_scaled"] = worst_int;
  s.check("all three regimes covered",
          regimes_seen[0] > 0 && regimes_seen[1] > 0 && regimes_seen[2] > 0,
          Str("%d/%d/%d", regimes_seen[0], regimes_seen[1], regimes_seen[2]));
  s.check("closed-form PF matches GD to 1e-9(1+|theta0|)", cf_ok,
          Str("worst scaled error %.3g", worst_cf));
  s.check("integrated PF matches GD to 1e-4(1+|theta0|)", int_ok,
          Str("worst scaled error %.3g", worst_int));
  s.table("quadratic_exact.csv") = csv.str();
  return s.finish(5.0);
}

// ---------------------------------------------------------------------------

StudyResult study_diracgan(const StudyOptions& opt) {
  Study s(3, "diracgan", opt);
  const double h = 0.01;
  const auto game = dirac_gan_new();
  GameStepConfig cfg;
  cfg.h = h;

  std::ostringstream csv;
  csv << "run,iter,phi,theta,radius2\n";
  PlayerState p{Vec::Constant(1, 0.5), Vec::Constant(1, 0.5)};
  double r2 = JointNorm(p) * JointNorm(p);
  int increased = 0;
  csv << "sim,0," << FormatDouble(p.first(0)) << ',' << FormatDouble(p.second(0)) << ','
      << FormatDouble(r2) << '\n';
  for (int i = 1; i <= 1000; ++i) {
    p = game_sim_step(*game, p.first, p.second, cfg);
    const double next = p.first.squaredNorm() + p.second.squaredNorm();
    if (next > r2) ++increased;
    r2 = next;
    csv << "sim," << i << ',' << FormatDouble(p.first(0)) << ',' << FormatDouble(p.second(0))
        << ',' << FormatDouble(r2) << '\n';
  }
  s.data()["sim_radius_increases"] = increased;
  s.check("simultaneous GD increases the radius on every step", increased == 1000,
          Str("sim: radius increased %d/1000 steps", increased));

  int positive = 0, cells = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double phi = -1.0 + 0.1 * i, theta = -1.0 + 0.1 * j;
      if (i == 10 && j == 10) continue;
      ++cells;
      if (dirac_radius_derivative(phi, theta, h) > 0.0) ++positive;
    }
  }
  s.check("radius derivative positive on the 21x21 grid off equilibrium", positive == cells,
          Str("%d/%d cells", positive, cells));

  const double v = 1.0;
  const double strong = 2.0 * (h * v / 4.0);
  const auto reg = regularized_game(game, RegCoefficients{strong, strong, 0.0, 0.0});
  p = {Vec::Constant(1, 0.5), Vec::Constant(1, 0.5)};
  long below_at = -1;
  double radius_1e5 = 0.0;
  for (long i = 1; i <= 2'000'000 && below_at < 0; ++i) {
    p = game_sim_step(*reg, p.first, p.second, cfg);
    const double radius = JointNorm(p);
    if (i == 100000) radius_1e5 = radius;
    if (i % 1000 == 0 && i <= 100000) {
      csv << "regularized," << i << ',' << FormatDouble(p.first(0)) << ','
          << FormatDouble(p.second(0)) << ',' << FormatDouble(radius * radius) << '\n';
    }
    if (radius < 1e-4) below_at = i;
  }
  if (below_at > 0 && below_at < 100000) radius_1e5 = JointNorm(p);
  s.data()["regularized_coefficient"] = strong;
  s.data()["regularized_radius_1e5"] = radius_1e5;
  s.data()["regularized_steps_below_1e-4"] = below_at;
  s.check("regularized game converges below 1e-4 within 1e5 steps",
          below_at > 0 && below_at <= 100000,
          Str("radius at 1e5 = %.4g, first below 1e-4 at step %ld", radius_1e5, below_at));

  const double balanced = h * v / 4.0;
  const auto jr = dirac_regularized_jacobian(h, v, v, balanced, balanced, dirac::l1(0.0));
  s.data()["balanced_trace"] = jr.trace;
  s.check("balanced regularizer zeroes the modified-Jacobian trace", std::abs(jr.trace) <= 1e-12,
          Str("trace %.3g", jr.trace));
  s.table("diracgan.csv") = csv.str();
  return s.finish(5.0);
}

// ---------------------------------------------------------------------------

namespace {

OrderEstimate Ladder(const std::function<double(double)>& error, double h0) {
  std::vector<std::pair<double, double>> pairs;
  for (int k = 4; k <= 10; ++k) {
    const double h = h0 * std::ldexp(1.0, -k);
    pairs.emplace_back(h, error(h));
  }
  return order_estimate(pairs);
}

void LadderRows(std::ostringstream& csv, const std::string& name, const OrderEstimate& est) {
  for (std::size_t i = 0; i < est.h.size(); ++i) {
    csv << name << ',' << FormatDouble(est.h[i]) << ',' << FormatDouble(est.error[i]) << '\n';
  }
}

}  // namespace

StudyResult study_order_ladder(const StudyOptions& opt) {
  Study s(4, "order-check", opt);
  std::ostringstream csv;
  csv << "series,h,error\n";
  auto record = [&](const std::string& name, const OrderEstimate& est, double lo, double hi) {
    LadderRows(csv, name, est);
    s.data()["slopes"][name] = est.slope;
    s.data()["r2"][name] = est.r2;
    s.check(Str("%s slope in [%g, %g]", name.c_str(), lo, hi), est.slope >= lo && est.slope <= hi,
            Str("slope %.4f (r2 %.6f)", est.slope, est.r2));
  };

  // Banana at a generic point; the flow reference uses 64 RK4 substeps per h.
  const auto banana = banana_new();
  Vec x(2);
  x << 0.3, 0.2;
  const double h0 = 0.016;
  auto drift = [&](auto make_flow) {
    return [&, make_flow](double h) {
      return per_iteration_drift(*banana, x, h, make_flow(h), DriftIntegrator(h, 64));
    };
  };
  record("banana ngf", Ladder(drift([](double) { return FlowKind::NGF(); }), h0), 1.9, 2.1);
  record("banana igr", Ladder(drift([](double h) { return FlowKind::IGR(h); }), h0), 2.85, 3.15);
  record("banana third", Ladder(drift([](double h) { return FlowKind::ThirdOrder(h); }), h0),
         3.8, 4.2);

  // Random zero-sum quadratic game, scaled to unit spectral radius.
  std::mt19937_64 rng(opt.seed);
  Mat a = GaussianMat(rng, 4, 4);
  a = (0.5 * (a + a.transpose())).eval();
  a /= eig_sym(a).values.cwiseAbs().maxCoeff();
  const Vec b = Gaussian(rng, 4);
  const auto game = zero_sum_game_from_loss(quadratic_new(a, b), 2);
  Vec phi(2), theta(2);
  phi << 0.3, -0.7;
  theta << 0.5, 0.2;
  s.data()["game_loss_matrix"] = std::vector<double>(a.data(), a.data() + a.size());

  using Step = std::function<PlayerState(const GameStepConfig&)>;
  using Field = std::function<PlayerState(const GameStepConfig&, const Vec&, const Vec&)>;
  auto game_ladder = [&](const Step& step, const Field& field, GameMode mode, double vp,
                         double vt, double g0) {
    return Ladder(
        [&, mode, vp, vt](double h) {
          GameStepConfig c;
          c.h = h;
          c.v_phi = vp;
          c.v_theta = vt;
          c.mode = mode;
          const PlayerState discrete = step(c);
          const PlayerState flow = integrate_game_flow(
              [&](const Vec& p, const Vec& t) { return field(c, p, t); }, phi, theta, vp * h,
              vt * h, 64, h);
          return JointDistance(discrete, flow);
        },
        g0);
  };
  const Step sim = [&](const GameStepConfig& c) { return game_sim_step(*game, phi, theta, c); };
  const Step alt = [&](const GameStepConfig& c) { return game_alt_step(*game, phi, theta, c); };
  const Step rk4 = [&](const GameStepConfig& c) { return game_rk4_step(*game, phi, theta, c); };
  const Field plain = [&](const GameStepConfig&, const Vec& p, const Vec& t) {
    return PlayerState{game->f(p, t), game->g(p, t)};
  };
  const Field modified = [&](const GameStepConfig& c, const Vec& p, const Vec& t) {
    return modified_game_field(*game, p, t, c);
  };
  const Field rk4_modified = [&](const GameStepConfig& c, const Vec& p, const Vec& t) {
    return rk4_modified_game_field(*game, p, t, c);
  };
  const auto sm = GameMode::kSimultaneous, am = GameMode::kAlternating;
  record("game sim vs flow", game_ladder(sim, plain, sm, 1, 1, 0.1), 1.9, 2.1);
  record("game alt vs flow", game_ladder(alt, plain, am, 1, 1, 0.1), 1.9, 2.1);
  record("game sim vs modified", game_ladder(sim, modified, sm, 1, 1, 0.1), 2.85, 3.15);
  record("game alt vs modified", game_ladder(alt, modified, am, 1, 1, 0.1), 2.85, 3.15);
  // The equal-rate RK4 local error is fifth order, so this ladder starts at
  // h = 0.5 to stay clear of the roundoff floor.
  const auto rk4_equal = game_ladder(rk4, plain, sm, 1, 1, 8.0);
  LadderRows(csv, "game rk4 equal rates", rk4_equal);
  s.data()["slopes"]["game rk4 equal rates"] = rk4_equal.slope;
  s.check("game rk4 equal rates slope >= 4.8", rk4_equal.slope >= 4.8,
          Str("slope %.4f (r2 %.6f)", rk4_equal.slope, rk4_equal.r2));
  record("game rk4 unequal rates", game_ladder(rk4, rk4_modified, sm, 1, 2, 0.1), 2.8, 3.2);

  s.table("order_ladder.csv") = csv.str();
  return s.finish(30.0);
}

// ---------------------------------------------------------------------------

StudyResult study_sgd_modified_flow(const StudyOptions& opt) {
  Study s(5, "sgd-flow", opt);
  std::mt19937_64 rng(opt.seed);
  const Index d = 3;
  std::vector<ProblemPtr> batches;
  for (int mu = 0; mu < 2; ++mu) {
    const Mat m = GaussianMat(rng, d, d);
    const Mat a = (m * m.transpose() / 3.0 + 0.5 * Mat::Identity(d, d)).eval();
    batches.push_back(quadratic_new(0.5 * (a + a.transpose()), Gaussian(rng, d)));
  }
  const Vec theta = Gaussian(rng, d);

  const double n = static_cast<double>(batches.size());
  const auto est = Ladder(
      [&](double h) {
        const Vec discrete = sgd_steps(batches, theta, h);
        auto field = [&](const Vec& y) {
          return sgd_modified_flow_field(SgdModifiedLossInput{batches, y, theta, h});
        };
        const Vec flow = integrate_field(field, theta, n * h, 128, Scheme::kRk4);
        return (discrete - flow).norm();
      },
      0.5);
  std::ostringstream csv;
  csv << "series,h,error\n";
  LadderRows(csv, "two-batch sgd", est);
  s.data()["slope"] = est.slope;
  s.data()["r2"] = est.r2;
  s.check("two-step SGD local error slope in [2.85, 3.15]", est.slope >= 2.85 && est.slope <= 3.15,
          Str("slope %.4f (r2 %.6f)", est.slope, est.r2));

  // One batch: the field must coincide with the IGR field.
  const auto banana = banana_new();
  std::uniform_real_distribution<double> ud(-1.5, 1.5), uh(0.001, 0.1);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Vec y(2);
    y << ud(rng), ud(rng);
    const double h = uh(rng);
    const Vec sgd = sgd_modified_flow_field(SgdModifiedLossInput{{banana}, y, y, h});
    const Vec igr = flow_field(FlowKind::IGR(h), *banana, y).real();
    worst = std::max(worst, (sgd - igr).norm() / std::max(1.0, igr.norm()));
  }
  s.data()["single_batch_vs_igr"] = worst;
  s.check("single batch reduces to the IGR field (1e-12)", worst <= 1e-12,
          Str("worst relative difference %.3g", worst));
  s.table("sgd_ladder.csv") = csv.str();
  return s.finish();
}

// ---------------------------------------------------------------------------

namespace {

enum class Observed { kMonotone, kAlternatingDecay, kGrowth, kOther };

const char* ObservedName(Observed o) {
  switch (o) {
    case Observed::kMonotone: return "monotone";
    case Observed::kAlternatingDecay: return "alternating-decay";
    case Observed::kGrowth: return "growth";
    case Observed::kOther: return "other";
  }
  return "?";
}

Observed Observe(const std::vector<double>& xs) {
  bool same_sign = true, alternating = true, shrinking = true, growing = true;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double a = xs[i - 1], b = xs[i];
    same_sign = same_sign && a * b > 0.0;
    alternating = alternating && a * b < 0.0;
    shrinking = shrinking && std::abs(b) < std::abs(a);
    growing = growing && std::abs(b) > std::abs(a);
  }
  if (growing) return Observed::kGrowth;
  if (same_sign && shrinking) return Observed::kMonotone;
  if (alternating && shrinking) return Observed::kAlternatingDecay;
  return Observed::kOther;
}

Observed Expected(Regime r) {
  switch (r) {
    case Regime::kRealStable: return Observed::kMonotone;
    case Regime::kComplexStable: return Observed::kAlternatingDecay;
    case Regime::kUnstableComplex: return Observed::kGrowth;
  }
  return Observed::kOther;
}

}  // namespace

StudyResult study_regime_fidelity(const StudyOptions& opt) {
  Study s(6, "regimes", opt);
  const int nl = 41, nh = 41;
  std::ostringstream csv;
  csv << "lambda,h,h_lambda,regime,expected,observed,boundary,match\n";
  int cells = 0, matched = 0, excluded = 0;
  for (int i = 0; i < nl; ++i) {
    const double lambda = 0.05 * std::pow(400.0, i / double(nl - 1));  // 0.05 .. 20
    Mat a(1, 1);
    a(0, 0) = lambda;
    const auto problem = quadratic_new(a, Vec::Zero(1));
    for (int j = 0; j < nh; ++j) {
      const double h = 0.01 * std::pow(100.0, j / double(nh - 1));  // 0.01 .. 1
      const double x = h * lambda;
      const bool boundary = std::abs(x - 1.0) < 1e-3 || std::abs(x - 2.0) < 1e-3;
      std::vector<double> xs{1.0};
      Vec theta = Vec::Ones(1);
      for (int n = 0; n < 50; ++n) {
        theta = gd_step(*problem, theta, h);
        xs.push_back(theta(0));
      }
      const Regime regime = classify(x).regime;
      const Observed seen = Observe(xs), want = Expected(regime);
      if (boundary) {
        ++excluded;
      } else {
        ++cells;
        if (seen == want) ++matched;
      }
      csv << FormatDouble(lambda) << ',' << FormatDouble(h) << ',' << FormatDouble(x) << ','
          << RegimeName(regime) << ',' << ObservedName(want) << ',' << ObservedName(seen) << ','
          << (boundary ? 1 : 0) << ',' << (seen == want ? 1 : 0) << '\n';
    }
  }
  s.data()["cells"] = cells;
  s.data()["matched"] = matched;
  s.data()["boundary_excluded"] = excluded;
  s.check("observed behaviour matches classify() on every non-boundary cell",
          cells > 0 && matched == cells, Str("%d/%d cells (%d excluded)", matched, cells, excluded));
  s.table("regimes.csv") = csv.str();
  return s.finish();
}

// ---------------------------------------------------------------------------

StudyResult study_dal(const StudyOptions& opt) {
  Study s(7, "dal", opt);
  std::mt19937_64 rng(opt.seed);
  DalConfig cfg;

  // h·‖Hĝ‖ = 2 wherever the cap is inactive.
  std::vector<std::pair<ProblemPtr, Vec>> samples;
  std::uniform_real_distribution<double> ev(0.5, 4.0), coord(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const Index d = 5;
    Vec lambda(d);
    for (Index k = 0; k < d; ++k) lambda(k) = ev(rng);
    const Mat q = RandomOrthogonal(rng, d);
    const Mat a = q * lambda.asDiagonal() * q.transpose();
    samples.emplace_back(quadratic_new(0.5 * (a + a.transpose()), Gaussian(rng, d)),
                         Gaussian(rng, d));
    Vec y(2);
    y << coord(rng), coord(rng);
    samples.emplace_back(banana_new(), y);
  }
  int below_cap = 0;
  double worst = 0.0;
  for (const auto& [problem, theta] : samples) {
    const double hg = drift_proxy_normalized(*problem, theta);
    if (2.0 / hg >= cfg.lr_cap) continue;
    ++below_cap;
    worst = std::max(worst, std::abs(dal_lr(*problem, theta, cfg) * hg - 2.0));
  }
  s.data()["identity_samples_below_cap"] = below_cap;
  s.data()["identity_worst_error"] = worst;
  s.check("h * |H g_hat| = 2 below the cap (1e-12)", below_cap > 0 && worst <= 1e-12,
          Str("%d samples, worst |h*n - 2| = %.3g", below_cap, worst));

  // p ↦ h_p ordering, with the cap lifted so it cannot tie the values.
  Mat a = Mat::Zero(2, 2);
  a.diagonal() << 0.5, 3.0;
  const auto q = quadratic_new(a, Vec::Zero(2));
  const std::vector<double> ps{0.25, 0.5, 0.75, 1.0};
  auto lrs = [&](const Problem& problem, const Vec& theta) {
    std::vector<double> out;
    for (double p : ps) {
      DalConfig c;
      c.p = p;
      c.lr_cap = 1e12;
      out.push_back(dal_lr(problem, theta, c));
    }
    return out;
  };
  auto ordered = [](const std::vector<double>& v, bool decreasing) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (decreasing ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1])) return false;
    }
    return true;
  };
  int sharp_ok = 0, sharp_n = 0, flat_ok = 0, flat_n = 0;
  std::vector<std::pair<ProblemPtr, Vec>> probes{{q, Vec::Unit(2, 1)}, {q, Vec::Unit(2, 0)}};
  Mat flat_a = Mat::Zero(2, 2);
  flat_a.diagonal() << 0.2, 0.9;
  const auto flat = quadratic_new(flat_a, Vec::Zero(2));
  for (int i = 0; i < 20; ++i) {
    Vec y(2);
    y << coord(rng), coord(rng);
    probes.emplace_back(banana_new(), y);
    probes.emplace_back(q, Gaussian(rng, 2));
    probes.emplace_back(flat, Gaussian(rng, 2));
  }
  for (const auto& [problem, theta] : probes) {
    const double n = drift_proxy_normalized(*problem, theta);
    if (std::abs(n - 1.0) < 1e-9) continue;
    const auto v = lrs(*problem, theta);
    if (n > 1.0) {
      ++sharp_n;
      sharp_ok += ordered(v, true);
    } else {
      ++flat_n;
      flat_ok += ordered(v, false);
    }
  }
  s.check("h_p strictly decreasing in p where |H g_hat| > 1", sharp_n > 0 && sharp_ok == sharp_n,
          Str("%d/%d probes", sharp_ok, sharp_n));
  s.check("h_p strictly increasing in p where |H g_hat| < 1", flat_n > 0 && flat_ok == flat_n,
          Str("%d/%d probes", flat_ok, flat_n));

  // DAL training on banana.
  const auto banana = banana_new();
  Vec theta(2);
  theta << -1.0, 1.0;
  const double initial = banana->eval(theta);
  std::vector<TrainRow> rows;
  bool finite = std::isfinite(initial);
  for (long i = 0; i <= 500; ++i) {
    const double loss = banana->eval(theta);
    finite = finite && std::isfinite(loss);
    TrainRow row;
    row.iter = i;
    row.loss = loss;
    row.grad_norm = banana->grad(theta).norm();
    row.lr = row.grad_norm > 1e-12 ? dal_lr(*banana, theta, cfg) : 0.0;
    rows.push_back(row);
    if (i == 500 || !finite || row.grad_norm <= 1e-12) break;
    theta = dal_step(*banana, theta, cfg);
  }
  const double final_loss = rows.back().loss;
  s.data()["banana_initial_loss"] = initial;
  s.data()["banana_final_loss"] = final_loss;
  s.data()["banana_steps"] = rows.back().iter;
  s.check("DAL on banana stays finite for 500 steps", finite && rows.back().iter == 500,
          Str("%ld steps", rows.back().iter));
  s.check("DAL on banana ends below its initial loss", final_loss < initial,
          Str("initial %.6g, final %.6g", initial, final_loss));
  std::ostringstream csv;
  write_train_csv(csv, rows);
  s.table("dal_banana.csv") = csv.str();
  return s.finish();
}

// ---------------------------------------------------------------------------

StudyResult study_game_convergence(const StudyOptions& opt) {
  Study s(8, "game-convergence", opt);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> ux(-0.5, 3.0), uy(0.05, 3.0), uh(0.05, 1.0), coin(0, 1);
  const long steps = 10000;
  std::ostringstream csv;
  csv << "sample,h,lambda1_re,lambda1_im,lambda2_re,lambda2_im,band,predicted,h_bound,"
         "steps_below_1e-6,simulated,spectral_radius\n";
  int included = 0, agree = 0, bound_agree = 0, radius_agree = 0, excluded = 0;
  for (int i = 0; i < 200; ++i) {
    Mat core(2, 2);
    if (coin(rng) < 0.5) {
      const double x = ux(rng), y = uy(rng);
      core << x, -y, y, x;
    } else {
      core << ux(rng), 0.0, 0.0, ux(rng);
    }
    Mat basis;
    do {
      basis = GaussianMat(rng, 2, 2);
    } while (std::abs(basis.determinant()) < 0.2);
    const Mat hm = basis * core * basis.inverse();
    const double h = uh(rng);
    const Spectrum sp = eig_general(hm);

    bool band = false, predicted = true, bound = true;
    for (Index k = 0; k < 2; ++k) {
      const Complex l = sp.values(k);
      const double lhs = std::norm(1.0 - h * l);
      band = band || std::abs(lhs - 1.0) < 1e-3;
      predicted = predicted && linear_game_converges(l, h);
      bound = bound && linear_game_converges_h_bound(l, h);
    }

    // Brute force from a unit start: converged once the norm drops below
    // 1e-6 within the step budget. Blow-up stops the run early.
    const Mat m = Mat::Identity(2, 2) - h * hm;
    Vec v = Vec::Ones(2).normalized();
    long below_at = -1;
    for (long t = 1; t <= steps; ++t) {
      v = m * v;
      const double nv = v.norm();
      if (nv < 1e-6) {
        below_at = t;
        break;
      }
      if (!(nv < 1e100)) break;
    }
    const bool simulated = below_at > 0;
    // Spectral radius of the iteration, for reporting near-band misses.
    const double radius = (Mat::Identity(2, 2) - h * hm).eigenvalues().cwiseAbs().maxCoeff();
    if (band) {
      ++excluded;
    } else {
      ++included;
      agree += simulated == predicted;
      radius_agree += (radius < 1.0) == predicted;
      bound_agree += bound == predicted;
    }
    csv << i << ',' << FormatDouble(h) << ',' << FormatDouble(sp.values(0).real()) << ','
        << FormatDouble(sp.values(0).imag()) << ',' << FormatDouble(sp.values(1).real()) << ','
        << FormatDouble(sp.values(1).imag()) << ',' << band << ',' << predicted << ',' << bound
        << ',' << below_at << ',' << simulated << ',' << FormatDouble(radius) << '\n';
  }
  s.data()["included"] = included;
  s.data()["excluded_band"] = excluded;
  s.data()["agree"] = agree;
  s.data()["agree_with_spectral_radius"] = radius_agree;
  s.check("convergence test agrees with simulation outside the band",
          included > 0 && agree == included, Str("%d/%d samples", agree, included));
  s.check("rearranged h-bound agrees with the convergence test",
          included > 0 && bound_agree == included, Str("%d/%d samples", bound_agree, included));
  s.table("game_convergence.csv") = csv.str();
  return s.finish();
}

// ---------------------------------------------------------------------------

StudyResult study_geometric_complexity(const StudyOptions& opt) {
  Study s(9, "gc", opt);
  std::mt19937_64 rng(opt.seed);

  // Linear network: the Jacobian is the weight product everywhere.
  MlpModel lin = InitModel({4, 6, 5, 3}, Activation::kIdentity, InitKind::kGlorot, opt.seed);
  for (auto& bias : lin.biases) bias = 0.1 * Gaussian(rng, bias.size());
  Mat prod = Mat::Identity(4, 4);
  for (const auto& w : lin.weights) prod = (w * prod).eval();
  const double closed = prod.squaredNorm();
  const double gc_lin = geometric_complexity(lin, GaussianMat(rng, 20, 4));
  const double lin_err = std::abs(gc_lin - closed) / std::max(1.0, closed);
  s.data()["linear_gc"] = gc_lin;
  s.data()["linear_closed_form"] = closed;
  s.check("linear network GC equals |prod W|_F^2 (1e-10)", lin_err <= 1e-10,
          Str("relative error %.3g", lin_err));

  // Relu nets against the activation-pattern oracle.
  std::uniform_int_distribution<int> width(2, 6), layers(1, 3);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<Index> widths{width(rng)};
    const int hidden = layers(rng);
    for (int k = 0; k < hidden; ++k) widths.push_back(width(rng));
    widths.push_back(width(rng));
    MlpModel net = InitModel(widths, Activation::kRelu, InitKind::kStandardTruncated,
                             opt.seed * 1000 + static_cast<std::uint64_t>(i));
    for (auto& bias : net.biases) bias = 0.2 * Gaussian(rng, bias.size());
    const Mat inputs = GaussianMat(rng, 50, widths.front());
    const double gc = geometric_complexity(net, inputs);
    const double oracle = gc_relu_piecewise(net, inputs);
    worst = std::max(worst, std::abs(gc - oracle));
  }
  s.data()["relu_worst_abs_error"] = worst;
  s.check("relu GC equals the piecewise-linear oracle on 20 nets (1e-8)", worst <= 1e-8,
          Str("worst |difference| %.3g", worst));

  GcStudyConfig cfg;
  for (auto& seed : cfg.seeds) seed += opt.seed * cfg.seeds.size();
  const GcStudy study = gc_init_depth_study(cfg);
  std::ostringstream csv;
  csv << "depth,mean_gc,std_gc\n";
  std::string means;
  for (const auto& row : study.rows) {
    csv << row.depth << ',' << FormatDouble(row.mean) << ',' << FormatDouble(row.std) << '\n';
    s.data()["depth_means"].push_back(row.mean);
    means += Str("%s%.4g", means.empty() ? "" : " > ", row.mean);
  }
  s.check("mean GC strictly decreasing over depths 2-6", study.strictly_decreasing, means);
  s.table("gc_depth.csv") = csv.str();
  return s.finish();
}

// ---------------------------------------------------------------------------

StudyResult study_edge_of_stability(const StudyOptions& opt) {
  Study s(10, "edge-of-stability", opt);
  const double h = 0.2;
  const long iters = 600;
  const Dataset ds = GaussianBlobs(20, 3, 4, 1.0, opt.seed);
  MlpSpec spec;
  spec.model = InitModel({4, 10, 10, 10, 3}, Activation::kElu, InitKind::kStandardTruncated,
                         opt.seed + 1);
  spec.inputs = ds.inputs;
  spec.targets = ds.targets;
  spec.loss = LossKind::kMse;
  const auto problem = mlp_new(spec);
  Vec theta = Flatten(spec.model);

  std::ostringstream csv;
  csv << "iter,loss,grad_norm,lr,lambda0,sc0_re,sc0_im,drift,hg_hat\n";
  std::vector<double> drift, hg_hat;
  double loss = problem->eval(theta);
  double lambda_start = 0.0, lambda_max = 0.0;
  long crossed = -1, increases = 0, flagged = 0;
  for (long i = 0; i < iters; ++i) {
    const StabilityReport rep = stability_report(*problem, theta, h, 1);
    const EigenRecord& top = rep.records.front();
    if (i == 0) lambda_start = top.lambda;
    lambda_max = std::max(lambda_max, top.lambda);
    if (crossed < 0 && top.lambda > 2.0 / h) crossed = i;
    drift.push_back(per_iteration_drift(*problem, theta, h, FlowKind::NGF(), DriftIntegrator(h, 20)));
    hg_hat.push_back(drift_proxy(*problem, theta).hg_hat_norm.value_or(0.0));
    const double gn = problem->grad(theta).norm();
    csv << i << ',' << FormatDouble(loss) << ',' << FormatDouble(gn) << ',' << FormatDouble(h)
        << ',' << FormatDouble(top.lambda) << ',' << FormatDouble(top.sc.real()) << ','
        << FormatDouble(top.sc.imag()) << ',' << FormatDouble(drift.back()) << ','
        << FormatDouble(hg_hat.back()) << '\n';
    theta = gd_step(*problem, theta, h);
    const double next = problem->eval(theta);
    if (!std::isfinite(next)) throw Error(ErrorKind::kNonfinite, Str("loss diverged at iteration %ld", i + 1));
    if (next > loss) {
      ++increases;
      if (top.sc.real() > 0.0) ++flagged;
    }
    loss = next;
  }
  const double rho = spearman(drift, hg_hat);
  const double frac = increases > 0 ? double(flagged) / double(increases) : 0.0;
  s.data()["h"] = h;
  s.data()["lambda0_start"] = lambda_start;
  s.data()["lambda0_max"] = lambda_max;
  s.data()["crossing_iteration"] = crossed;
  s.data()["loss_increases"] = increases;
  s.data()["increases_with_positive_sc0"] = flagged;
  s.data()["spearman_drift_hg_hat"] = rho;
  s.data()["final_loss"] = loss;
  s.check("lambda0 starts below 2/h and crosses it", lambda_start < 2.0 / h && crossed > 0,
          Str("lambda0 %.4g at start, 2/h = %.4g, first crossing at %ld", lambda_start, 2.0 / h,
              crossed));
  s.check(">= 80% of loss increases follow Re(sc0) > 0", increases > 0 && frac >= 0.8,
          Str("%ld/%ld = %.3f", flagged, increases, frac));
  s.check("Spearman(drift, |H g_hat|) >= 0.8", rho >= 0.8, Str("%.4f", rho));
  s.table("edge_of_stability.csv") = csv.str();
  return s.finish(120.0);
}

// ---------------------------------------------------------------------------

const std::vector<StudyEntry>& study_catalog() {
  static const std::vector<StudyEntry> catalog{
      {1, "lineargame", study_linear_game},
      {2, "quadratic-exact", study_quadratic_exact},
      {3, "diracgan", study_diracgan},
      {4, "order-check", study_order_ladder},
      {5, "sgd-flow", study_sgd_modified_flow},
      {6, "regimes", study_regime_fidelity},
      {7, "dal", study_dal},
      {8, "game-convergence", study_game_convergence},
      {9, "gc", study_geometric_complexity},
      {10, "edge-of-stability", study_edge_of_stability},
  };
  return catalog;
}

StudyResult run_study(int criterion, const StudyOptions& opt) {
  for (const auto& e : study_catalog()) {
    if (e.criterion == criterion) return e.run(opt);
  }
  throw Error(ErrorKind::kInvalidArgument, Str("no study for criterion %d", criterion));
}

}  // namespace driftlab
