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


#include "driftlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "driftlab/flows.hpp"

namespace driftlab {
namespace {

Vec join(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

void check_split(const Problem& e, Index split, const Vec& psi) {
  if (split <= 0 || split >= e.dim()) {
    throw Error(ErrorKind::kBadSplit, "split must leave both players at least one coordinate");
  }
  if (psi.size() != e.dim()) throw Error(ErrorKind::kShapeMismatch, "point has the wrong length");
}

Vec mask(const Vec& v, Index begin, Index len) {
  Vec out = Vec::Zero(v.size());
  out.segment(begin, len) = v.segment(begin, len);
  return out;
}

// Matrix with columns third(ψ, w, e_j): the derivative of ψ ↦ H(ψ)w.
Mat third_matrix(const Problem& e, const Vec& psi, const Vec& w) {
  const Index n = e.dim();
  Mat out(n, n);
  for (Index j = 0; j < n; ++j) out.col(j) = e.third(psi, w, Vec::Unit(n, j));
  return out;
}

class RegularizedGame final : public GameProblem {
 public:
  RegularizedGame(GamePtr base, RegCoefficients c)
      : base_(std::move(base)), loss_(base_->zero_sum_loss()), c_(c) {}

  Index dim_phi() const override { return base_->dim_phi(); }
  Index dim_theta() const override { return base_->dim_theta(); }
  std::string id() const override { return "regularized(" + base_->id() + ")"; }

  Vec f(const Vec& phi, const Vec& theta) const override {
    return -loss_grad_phi(join(phi, theta)).head(dim_phi());
  }
  Vec g(const Vec& phi, const Vec& theta) const override {
    return -loss_grad_theta(join(phi, theta)).tail(dim_theta());
  }
  Mat jac_phi_f(const Vec& phi, const Vec& theta) const override {
    return -hess_phi(join(phi, theta)).topLeftCorner(dim_phi(), dim_phi());
  }
  Mat jac_theta_f(const Vec& phi, const Vec& theta) const override {
    return -hess_phi(join(phi, theta)).topRightCorner(dim_phi(), dim_theta());
  }
  Mat jac_phi_g(const Vec& phi, const Vec& theta) const override {
    return -hess_theta(join(phi, theta)).bottomLeftCorner(dim_theta(), dim_phi());
  }
  Mat jac_theta_g(const Vec& phi, const Vec& theta) const override {
    return -hess_theta(join(phi, theta)).bottomRightCorner(dim_theta(), dim_theta());
  }

 private:
  // ∇ψ of E_φ and E_θ over the joint coordinates.
  Vec loss_grad_phi(const Vec& psi) const {
    const Vec g = loss_->grad(psi);
    return -g + 2.0 * loss_->hvp(psi, c_.c1 * theta_part(g) + c_.s1 * phi_part(g));
  }
  Vec loss_grad_theta(const Vec& psi) const {
    const Vec g = loss_->grad(psi);
    return g + 2.0 * loss_->hvp(psi, c_.c2 * phi_part(g) + c_.s2 * theta_part(g));
  }
  Mat hess_phi(const Vec& psi) const { return reg_hessian(psi, -1.0, c_.s1, c_.c1); }
  Mat hess_theta(const Vec& psi) const { return reg_hessian(psi, 1.0, c_.c2, c_.s2); }

  // Hessian of sign·E + a‖∇_φE‖² + b‖∇_θE‖².
  Mat reg_hessian(const Vec& psi, double sign, double a, double b) const {
    const Vec g = loss_->grad(psi);
    const Mat h = loss_->hess(psi);
    const Vec w = a * phi_part(g) + b * theta_part(g);
    Mat mh = h;
    mh.topRows(dim_phi()) *= a;
    mh.bottomRows(dim_theta()) *= b;
    return sign * h + 2.0 * (third_matrix(*loss_, psi, w) + h * mh);
  }

  Vec phi_part(const Vec& v) const { return mask(v, 0, dim_phi()); }
  Vec theta_part(const Vec& v) const { return mask(v, dim_phi(), dim_theta()); }

  GamePtr base_;
  ProblemPtr loss_;
  RegCoefficients c_;
};

}  // namespace

PlayerState modified_game_field(const GameProblem& game, const Vec& phi, const Vec& theta,
                                const GameStepConfig& cfg) {
  const Vec f = game.f(phi, theta), g = game.g(phi, theta);
  const Mat a = game.jac_phi_f(phi, theta), b = game.jac_theta_f(phi, theta);
  const Mat c = game.jac_phi_g(phi, theta), d = game.jac_theta_g(phi, theta);
  const double hp = 0.5 * cfg.v_phi * cfg.h, ht = 0.5 * cfg.v_theta * cfg.h;
  if (cfg.mode == GameMode::kSimultaneous) {
    return {f - hp * (a * f + b * g), g - ht * (c * f + d * g)};
  }
  const double cross = 1.0 - 2.0 * cfg.v_phi / cfg.v_theta;
  return {f - hp * ((a * f) / cfg.m + b * g), g - ht * (cross * (c * f) + (d * g) / cfg.k)};
}

PlayerState modified_game_field_same_time(const GameProblem& game, const Vec& phi,
                                          const Vec& theta, double h, double v_phi,
                                          double v_theta, GameMode mode, int m, int k) {
  const Vec f = game.f(phi, theta), g = game.g(phi, theta);
  const Mat a = game.jac_phi_f(phi, theta), b = game.jac_theta_f(phi, theta);
  const Mat c = game.jac_phi_g(phi, theta), d = game.jac_theta_g(phi, theta);
  const double pp = v_phi * v_phi, pt = v_phi * v_theta, tt = v_theta * v_theta;
  if (mode == GameMode::kSimultaneous) {
    return {v_phi * f - 0.5 * h * (pp * (a * f) + pt * (b * g)),
            v_theta * g - 0.5 * h * (pt * (c * f) + tt * (d * g))};
  }
  // Alternating with unit relative rates: the cross factor (1 − 2·1/1) = −1.
  return {v_phi * f - 0.5 * h * (pp * (a * f) / m + pt * (b * g)),
          v_theta * g - 0.5 * h * (-pt * (c * f) + tt * (d * g) / k)};
}

PlayerState rk4_modified_game_field(const GameProblem& game, const Vec& phi, const Vec& theta,
                                    const GameStepConfig& cfg) {
  const Vec f = game.f(phi, theta), g = game.g(phi, theta);
  const double s = 0.5 * cfg.h * (cfg.v_theta - cfg.v_phi);
  return {f + s * (game.jac_theta_f(phi, theta) * g), g - s * (game.jac_phi_g(phi, theta) * f)};
}

PlayerState integrate_game_flow(const GameField& field, const Vec& phi, const Vec& theta,
                                double t_phi, double t_theta, long steps_per_unit_h, double h) {
  const Index np = phi.size();
  auto joint = [&](const Vec& psi) -> Vec {
    const auto [fp, ft] = field(psi.head(np), psi.tail(psi.size() - np));
    return join(fp, ft);
  };
  auto steps_for = [&](double span) {
    return std::max(1L, static_cast<long>(std::ceil(span / h * steps_per_unit_h - 1e-9)));
  };
  const double t1 = std::min(t_phi, t_theta), t2 = std::max(t_phi, t_theta);
  Vec psi = integrate_field(joint, join(phi, theta), t1, steps_for(t1), Scheme::kRk4);
  Vec at_t1 = psi;
  if (t2 > t1) psi = integrate_field(joint, psi, t2 - t1, steps_for(t2 - t1), Scheme::kRk4);
  const Vec& src_phi = t_phi <= t_theta ? at_t1 : psi;
  const Vec& src_theta = t_theta <= t_phi ? at_t1 : psi;
  return {src_phi.head(np), src_theta.tail(psi.size() - np)};
}

ModifiedLosses zero_sum_modified_losses(const Problem& e, Index split, const Vec& psi,
                                        const GameStepConfig& cfg, Payoff payoff) {
  check_split(e, split, psi);
  const double ev = e.eval(psi);
  const Vec g = e.grad(psi);
  const double a = g.head(split).squaredNorm(), b = g.tail(e.dim() - split).squaredNorm();
  const double qp = cfg.v_phi * cfg.h / 4.0, qt = cfg.v_theta * cfg.h / 4.0;
  const bool alt = cfg.mode == GameMode::kAlternating;
  const double inv_m = alt ? 1.0 / cfg.m : 1.0, inv_k = alt ? 1.0 / cfg.k : 1.0;
  const double cross = alt ? 1.0 - 2.0 * cfg.v_phi / cfg.v_theta : 1.0;
  if (payoff == Payoff::kZeroSum) {
    return {-ev + qp * inv_m * a - qp * b, ev - qt * cross * a + qt * inv_k * b};
  }
  return {ev + qp * (inv_m * a + b), ev + qt * (cross * a + inv_k * b)};
}

PlayerState modified_loss_gradients(const Problem& e, Index split, const Vec& psi,
                                    const GameStepConfig& cfg, Payoff payoff) {
  check_split(e, split, psi);
  const Index nt = e.dim() - split;
  const Vec g = e.grad(psi);
  // ∇ψ‖∇_φE‖² = 2H M_φ∇E and likewise for θ.
  const Vec da = 2.0 * e.hvp(psi, mask(g, 0, split));
  const Vec db = 2.0 * e.hvp(psi, mask(g, split, nt));
  const double qp = cfg.v_phi * cfg.h / 4.0, qt = cfg.v_theta * cfg.h / 4.0;
  const bool alt = cfg.mode == GameMode::kAlternating;
  const double inv_m = alt ? 1.0 / cfg.m : 1.0, inv_k = alt ? 1.0 / cfg.k : 1.0;
  const double cross = alt ? 1.0 - 2.0 * cfg.v_phi / cfg.v_theta : 1.0;
  Vec gp, gt;
  if (payoff == Payoff::kZeroSum) {
    gp = -g + qp * inv_m * da - qp * db;
    gt = g - qt * cross * da + qt * inv_k * db;
  } else {
    gp = g + qp * (inv_m * da + db);
    gt = g + qt * (cross * da + inv_k * db);
  }
  return {gp.head(split), gt.tail(nt)};
}

RegSchemeKind ParseRegScheme(std::string_view name) {
  if (name == "dd-cancel-sim") return RegSchemeKind::kDDCancelSim;
  if (name == "dd-cancel-alt") return RegSchemeKind::kDDCancelAlt;
  if (name == "dd-cancel-alt-disc") return RegSchemeKind::kDDCancelAltDiscOnly;
  if (name == "sga") return RegSchemeKind::kSGA;
  if (name == "co") return RegSchemeKind::kCO;
  if (name == "strengthen-self") return RegSchemeKind::kStrengthenSelf;
  throw Error(ErrorKind::kConfigError, "unknown regularization scheme '" + std::string(name) + "'");
}

RegCoefficients resolve(const RegScheme& scheme, double h, double v_phi, double v_theta) {
  RegCoefficients c;
  switch (scheme.kind) {
    case RegSchemeKind::kDDCancelSim:
      c.c1 = v_phi * h / 4.0;
      c.c2 = v_theta * h / 4.0;
      break;
    case RegSchemeKind::kDDCancelAlt:
      c.c1 = v_phi * h / 4.0;
      c.c2 = (v_theta * h / 4.0) * (1.0 - 2.0 * v_phi / v_theta);
      break;
    case RegSchemeKind::kDDCancelAltDiscOnly:
      c.c1 = v_phi * h / 4.0;
      break;
    case RegSchemeKind::kSGA:
      c.c1 = c.c2 = -scheme.zeta;
      break;
    case RegSchemeKind::kCO:
      c.c1 = c.c2 = c.s1 = c.s2 = scheme.zeta;
      break;
    case RegSchemeKind::kStrengthenSelf:
      c.s1 = v_phi * h / 4.0;
      c.s2 = v_theta * h / 4.0;
      break;
  }
  return c;
}

GamePtr regularized_game(const GamePtr& base, const RegCoefficients& coeffs) {
  if (!base || !base->zero_sum_loss()) {
    throw Error(ErrorKind::kSchemeRequiresZeroSum, "regularizers need a zero-sum loss");
  }
  return std::make_shared<RegularizedGame>(base, coeffs);
}

GamePtr regularized_game(const GamePtr& base, const RegScheme& scheme, double h, double v_phi,
                         double v_theta) {
  return regularized_game(base, resolve(scheme, h, v_phi, v_theta));
}

double dirac_radius_derivative(double phi, double theta, double h) {
  const double l1 = dirac::l1(phi * theta);
  return h * l1 * l1 * (theta * theta + phi * phi);
}

namespace {

void check_sgd_input(const SgdModifiedLossInput& in) {
  if (in.batches.empty()) throw Error(ErrorKind::kInvalidArgument, "need at least one batch");
  if (in.theta.size() != in.theta_ref.size()) {
    throw Error(ErrorKind::kShapeMismatch, "theta and theta_ref differ in length");
  }
}

}  // namespace

double sgd_modified_loss(const SgdModifiedLossInput& in) {
  check_sgd_input(in);
  const double n = static_cast<double>(in.batches.size());
  double e = 0.0;
  Vec g = Vec::Zero(in.theta.size());
  for (const auto& b : in.batches) {
    e += b->eval(in.theta) / n;
    g += b->grad(in.theta) / n;
  }
  double align = 0.0;
  Vec past = Vec::Zero(in.theta.size());
  for (std::size_t mu = 0; mu < in.batches.size(); ++mu) {
    if (mu > 0) align += in.batches[mu]->grad(in.theta).dot(past);
    past += in.batches[mu]->grad(in.theta_ref);
  }
  return e + (n * in.h / 4.0) * g.squaredNorm() - (in.h / n) * align;
}

Vec sgd_modified_flow_field(const SgdModifiedLossInput& in) {
  check_sgd_input(in);
  const double n = static_cast<double>(in.batches.size());
  Vec g = Vec::Zero(in.theta.size());
  for (const auto& b : in.batches) g += b->grad(in.theta) / n;
  Vec hg = Vec::Zero(in.theta.size());
  for (const auto& b : in.batches) hg += b->hvp(in.theta, g) / n;
  Vec align = Vec::Zero(in.theta.size());
  Vec past = Vec::Zero(in.theta.size());
  for (std::size_t mu = 0; mu < in.batches.size(); ++mu) {
    if (mu > 0) align += in.batches[mu]->hvp(in.theta, past);
    past += in.batches[mu]->grad(in.theta_ref);
  }
  return -g - (n * in.h / 2.0) * hg + (in.h / n) * align;
}

nlohmann::json ToJson(const RegCoefficients& c) {
  return {{"c1", c.c1}, {"c2", c.c2}, {"s1", c.s1}, {"s2", c.s2}};
}

}  // namespace driftlab
