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


#include "driftlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftlab/calculus.hpp"

namespace driftlab {
namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kVerdictBand = 1e-10;
constexpr double kEquilibriumTol = 1e-8;

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

std::string_view RegimeName(Regime r) {
  switch (r) {
    case Regime::kRealStable: return "RealStable";
    case Regime::kComplexStable: return "ComplexStable";
    case Regime::kUnstableComplex: return "UnstableComplex";
  }
  return "?";
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kStable: return "stable";
    case Verdict::kUnstable: return "unstable";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

Classification classify(double x) {
  Classification c;
  c.boundary = std::abs(x - 1.0) < kBoundaryTol || std::abs(x - 2.0) < kBoundaryTol;
  if (x <= 1.0 + kBoundaryTol) {
    c.regime = Regime::kRealStable;
  } else if (x <= 2.0 + kBoundaryTol) {
    c.regime = Regime::kComplexStable;
  } else {
    c.regime = Regime::kUnstableComplex;
  }
  return c;
}

StabilityReport stability_report(const Problem& problem, const Vec& theta, double h,
                                 std::optional<Index> top_k) {
  if (!(h > 0.0)) throw Error(ErrorKind::kInvalidArgument, "h must be positive");
  const Vec g = problem.grad(theta);
  const Index dim = theta.size();
  Index count = dim;
  if (count > 256) count = std::min(count, top_k.value_or(16));
  if (top_k) count = std::min(count, *top_k);
  // Large problems with few requested directions go through Hessian-vector
  // products instead of a dense Hessian.
  const Spectrum s =
      (dim > 256 || (top_k && 4 * count <= dim && dim > 64))
          ? lanczos_top([&](const Vec& v) { return problem.hvp(theta, v); }, dim, count, g)
          : eig_sym(problem.hess(theta), g);

  StabilityReport report;
  report.h = h;
  const FlowKind pf = FlowKind::PF(h);
  for (Index i = 0; i < count; ++i) {
    EigenRecord r;
    r.lambda = s.values(i).real();
    r.g_dot_u = g.dot(s.vectors.col(i).real());
    r.cls = classify(h * r.lambda);
    if (std::abs(1.0 - h * r.lambda) < kBoundaryTol) {
      r.sc = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    } else {
      r.sc = alpha(pf, h * r.lambda) * r.g_dot_u;
    }
    report.records.push_back(r);
  }
  return report;
}

CVec critical_jacobian_eigs(FlowType flow, const Vec& lambda_star, double h) {
  CVec out(lambda_star.size());
  for (Index i = 0; i < lambda_star.size(); ++i) {
    const double l = lambda_star(i);
    switch (flow) {
      case FlowType::kNGF: out(i) = -l; break;
      case FlowType::kIGR: out(i) = -(l + 0.5 * h * l * l); break;
      case FlowType::kPF:
        // λ·α(hλ) = log(1 − hλ)/h, with the removable point λ = 0.
        out(i) = l == 0.0 ? Complex(0.0) : l * alpha(FlowKind::PF(h), h * l);
        break;
      default:
        throw Error(ErrorKind::kInvalidArgument, "critical-point spectra exist for NGF, IGR and PF only");
    }
  }
  return out;
}

Verdict exp_stable(const Mat& j) {
  const Spectrum s = eig_general(j, false);
  if (s.values.size() == 0) return Verdict::kInconclusive;
  const double top = s.values(0).real();
  if (top < -kVerdictBand) return Verdict::kStable;
  if (top > kVerdictBand) return Verdict::kUnstable;
  return Verdict::kInconclusive;
}

namespace {

void finish_report(GameJacobianReport& r) {
  r.spectrum = eig_general(r.j_mod, false).values;
  r.trace = r.j_mod.trace();
  r.det = r.j_mod.determinant();
  r.verdict = exp_stable(r.j_mod);
}

}  // namespace

GameJacobianReport game_modified_jacobian(const GameProblem& game, const Vec& phi,
                                          const Vec& theta, const GameStepConfig& cfg) {
  cfg.validate();
  GameJacobianReport r;
  r.equilibrium_residual = std::max(game.f(phi, theta).norm(), game.g(phi, theta).norm());
  if (r.equilibrium_residual > kEquilibriumTol) {
    throw Error(ErrorKind::kNotEquilibrium,
                "modified Jacobian requires an equilibrium; residual " +
                    FormatDouble(r.equilibrium_residual));
  }
  const Mat a = game.jac_phi_f(phi, theta), b = game.jac_theta_f(phi, theta);
  const Mat c = game.jac_phi_g(phi, theta), d = game.jac_theta_g(phi, theta);
  const Index np = a.rows(), nt = d.rows();
  r.j.resize(np + nt, np + nt);
  r.j << a, b, c, d;

  double self_phi = 1.0, self_theta = 1.0, cross_theta = 1.0;
  if (cfg.mode == GameMode::kAlternating) {
    self_phi = 1.0 / cfg.m;
    self_theta = 1.0 / cfg.k;
    cross_theta = 1.0 - 2.0 * cfg.v_phi / cfg.v_theta;
  }
  r.k.resize(np + nt, np + nt);
  r.k.topLeftCorner(np, np) = cfg.v_phi * (self_phi * a * a + b * c);
  r.k.topRightCorner(np, nt) = cfg.v_phi * (self_phi * a * b + b * d);
  r.k.bottomLeftCorner(nt, np) = cfg.v_theta * (cross_theta * c * a + self_theta * d * c);
  r.k.bottomRightCorner(nt, nt) = cfg.v_theta * (cross_theta * c * b + self_theta * d * d);
  r.j_mod = r.j - 0.5 * cfg.h * r.k;
  finish_report(r);
  return r;
}

GameJacobianReport dirac_regularized_jacobian(double h, double v_phi, double v_theta,
                                              double gamma, double zeta, double l_prime_0) {
  const double l1 = l_prime_0, l2 = l1 * l1;
  GameJacobianReport r;
  r.j = Mat{{0.0, l1}, {-l1, 0.0}};
  r.j_mod = Mat{{(0.5 * h * v_phi - 2.0 * gamma) * l2, l1},
                {-l1, (0.5 * h * v_theta - 2.0 * zeta) * l2}};
  r.k = (r.j - r.j_mod) * (2.0 / h);
  finish_report(r);
  return r;
}

bool linear_game_converges(Complex lambda, double h) {
  const double a = 1.0 - h * lambda.real(), b = h * lambda.imag();
  return a * a + b * b < 1.0;
}

bool linear_game_converges_h_bound(Complex lambda, double h) {
  const double x = lambda.real(), y = lambda.imag();
  if (!(x > 0.0)) return false;
  const double r = y / x;
  return h < (1.0 / x) * 2.0 / (1.0 + r * r);
}

nlohmann::json ToJson(const StabilityReport& report) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json sc = std::isfinite(r.sc.real()) ? complex_json(r.sc) : nlohmann::json(nullptr);
    recs.push_back({{"lambda", r.lambda},
                    {"g_dot_u", r.g_dot_u},
                    {"sc", sc},
                    {"regime", RegimeName(r.cls.regime)},
                    {"boundary", r.cls.boundary}});
  }
  return {{"h", report.h}, {"records", recs}};
}

nlohmann::json ToJson(const GameJacobianReport& report) {
  nlohmann::json spec = nlohmann::json::array();
  for (Index i = 0; i < report.spectrum.size(); ++i) spec.push_back(complex_json(report.spectrum(i)));
  return {{"J", matrix_json(report.j)},
          {"K", matrix_json(report.k)},
          {"J_mod", matrix_json(report.j_mod)},
          {"spectrum", spec},
          {"trace", report.trace},
          {"det", report.det},
          {"verdict", VerdictName(report.verdict)},
          {"equilibrium_residual", report.equilibrium_residual}};
}

}  // namespace driftlab
