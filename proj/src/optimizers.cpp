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


#include "driftlab/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "driftlab/flows.hpp"

namespace driftlab {
namespace {

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorKind::kNonfinite, std::string(what) + " produced a non-finite value");
}

Vec unit_grad(const Problem& problem, const Vec& theta, double* norm) {
  const Vec g = problem.grad(theta);
  const double n = g.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::kZeroGradient, "drift-adjusted rate needs a non-zero gradient");
  if (norm != nullptr) *norm = n;
  return g;
}

}  // namespace

Vec gd_step(const Problem& problem, const Vec& theta, double h) {
  Vec out = theta - h * problem.grad(theta);
  check_finite(out, "gd_step");
  return out;
}

std::pair<Vec, Vec> momentum_step(const Problem& problem, const Vec& theta, const Vec& v,
                                  double h, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorKind::kInvalidArgument, "momentum needs 0 <= beta < 1");
  Vec v_new = beta * v - h * problem.grad(theta);
  Vec out = theta + v_new;
  check_finite(out, "momentum_step");
  return {out, v_new};
}

void DalConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "DAL power must lie in (0, 1]");
  if (!(lr_cap > 0.0)) throw Error(ErrorKind::kInvalidArgument, "DAL cap must be positive");
}

Vec dal_curvature(const Problem& problem, const Vec& theta, DalProxy proxy) {
  double gnorm = 0.0;
  const Vec g = unit_grad(problem, theta, &gnorm);
  if (proxy == DalProxy::kExactHvp) return problem.hvp(theta, g / gnorm);
  const double eps = gnorm > 1e4 ? 1e-6 : 0.01 / gnorm;
  // (∇E(θ + ε∇E) − ∇E(θ))/ε approximates H∇E; dividing by ‖∇E‖ gives Hĝ.
  return (problem.grad(theta + eps * g) - g) / (eps * gnorm);
}

double dal_lr(const Problem& problem, const Vec& theta, const DalConfig& cfg) {
  cfg.validate();
  const double n = dal_curvature(problem, theta, cfg.proxy).norm();
  if (!(n > 0.0)) return cfg.lr_cap;
  return std::min(cfg.lr_cap, 2.0 / std::pow(n, cfg.p));
}

Vec dal_step(const Problem& problem, const Vec& theta, const DalConfig& cfg) {
  return gd_step(problem, theta, dal_lr(problem, theta, cfg));
}

std::pair<Vec, Vec> dal_momentum_step(const Problem& problem, const Vec& theta, const Vec& v,
                                      double beta, const DalConfig& cfg) {
  cfg.validate();
  const double n = dal_curvature(problem, theta, cfg.proxy).norm();
  const double c = n > 0.0 ? std::min(cfg.lr_cap, 1.0 / (2.0 * std::pow(n, cfg.p))) : cfg.lr_cap;
  return momentum_step(problem, theta, v, c, beta);
}

Vec dal_per_parameter_lr(const Problem& problem, const Vec& theta, const DalConfig& cfg) {
  cfg.validate();
  const Vec hg = dal_curvature(problem, theta, cfg.proxy);
  const double root_d = std::sqrt(static_cast<double>(theta.size()));
  Vec lr(theta.size());
  for (Index i = 0; i < lr.size(); ++i) {
    const double a = std::abs(hg(i));
    lr(i) = a < 1e-12 ? cfg.lr_cap : std::min(cfg.lr_cap, 2.0 / std::pow(a / root_d, cfg.p));
  }
  return lr;
}

Vec dal_per_parameter_step(const Problem& problem, const Vec& theta, const DalConfig& cfg) {
  const Vec lr = dal_per_parameter_lr(problem, theta, cfg);
  Vec out = theta - lr.cwiseProduct(problem.grad(theta));
  check_finite(out, "dal_per_parameter_step");
  return out;
}

Vec sgd_steps(const std::vector<ProblemPtr>& batches, const Vec& theta, double h) {
  if (batches.empty()) throw Error(ErrorKind::kInvalidArgument, "sgd needs at least one batch");
  Vec x = theta;
  for (const auto& b : batches) x = gd_step(*b, x, h);
  return x;
}

void GameStepConfig::validate() const {
  if (!(h > 0.0) || !(v_phi > 0.0) || !(v_theta > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "game rates must be positive");
  }
  if (m < 1 || k < 1) throw Error(ErrorKind::kInvalidArgument, "sub-update counts must be >= 1");
}

PlayerState game_sim_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                          const GameStepConfig& cfg) {
  cfg.validate();
  Vec p = phi + cfg.v_phi * cfg.h * game.f(phi, theta);
  Vec t = theta + cfg.v_theta * cfg.h * game.g(phi, theta);
  check_finite(p, "game_sim_step");
  check_finite(t, "game_sim_step");
  return {p, t};
}

PlayerState game_alt_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                          const GameStepConfig& cfg) {
  cfg.validate();
  Vec p = phi;
  for (int i = 0; i < cfg.m; ++i) p += (cfg.v_phi * cfg.h / cfg.m) * game.f(p, theta);
  Vec t = theta;
  for (int i = 0; i < cfg.k; ++i) t += (cfg.v_theta * cfg.h / cfg.k) * game.g(p, t);
  check_finite(p, "game_alt_step");
  check_finite(t, "game_alt_step");
  return {p, t};
}

PlayerState game_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                      const GameStepConfig& cfg) {
  return cfg.mode == GameMode::kSimultaneous ? game_sim_step(game, phi, theta, cfg)
                                             : game_alt_step(game, phi, theta, cfg);
}

PlayerState game_rk4_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                          const GameStepConfig& cfg) {
  cfg.validate();
  const double a = cfg.v_phi * cfg.h, b = cfg.v_theta * cfg.h;
  const Vec f1 = game.f(phi, theta), g1 = game.g(phi, theta);
  const Vec p2 = phi + 0.5 * a * f1, t2 = theta + 0.5 * b * g1;
  const Vec f2 = game.f(p2, t2), g2 = game.g(p2, t2);
  const Vec p3 = phi + 0.5 * a * f2, t3 = theta + 0.5 * b * g2;
  const Vec f3 = game.f(p3, t3), g3 = game.g(p3, t3);
  const Vec p4 = phi + a * f3, t4 = theta + b * g3;
  const Vec f4 = game.f(p4, t4), g4 = game.g(p4, t4);
  Vec p = phi + (a / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
  Vec t = theta + (b / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
  check_finite(p, "game_rk4_step");
  check_finite(t, "game_rk4_step");
  return {p, t};
}

void write_train_csv(std::ostream& out, const std::vector<TrainRow>& rows) {
  const bool lam = !rows.empty() && rows.front().lambda0.has_value();
  out << "iter,loss,grad_norm,lr" << (lam ? ",lambda0" : "") << "\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << FormatDouble(r.loss) << ',' << FormatDouble(r.grad_norm) << ','
        << FormatDouble(r.lr);
    if (lam) out << ',' << FormatDouble(r.lambda0.value_or(NAN));
    out << "\n";
  }
}

}  // namespace driftlab
