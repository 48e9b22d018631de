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


#include "driftlab/game_problem.hpp"

#include <utility>

namespace driftlab {

CVec GameProblem::field_c(const CVec& psi) const {
  if (!IsReal(psi)) {
    throw Error(ErrorKind::kComplexUnsupported, id() + " has no complex extension");
  }
  return joint_field(*this, psi.real()).cast<Complex>();
}

Vec joint_field(const GameProblem& game, const Vec& psi) {
  if (psi.size() != game.dim()) {
    throw Error(ErrorKind::kShapeMismatch, game.id() + ": joint state has wrong length");
  }
  const Vec phi = psi.head(game.dim_phi()), theta = psi.tail(game.dim_theta());
  Vec out(game.dim());
  out << game.f(phi, theta), game.g(phi, theta);
  return out;
}

Mat joint_jacobian(const GameProblem& game, const Vec& psi) {
  if (psi.size() != game.dim()) {
    throw Error(ErrorKind::kShapeMismatch, game.id() + ": joint state has wrong length");
  }
  const Vec phi = psi.head(game.dim_phi()), theta = psi.tail(game.dim_theta());
  Mat out(game.dim(), game.dim());
  out << game.jac_phi_f(phi, theta), game.jac_theta_f(phi, theta),
      game.jac_phi_g(phi, theta), game.jac_theta_g(phi, theta);
  return out;
}

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

class LinearGame final : public GameProblem {
 public:
  LinearGame(double eps1, double eps2) : eps1_(eps1), eps2_(eps2) {}

  Index dim_phi() const override { return 1; }
  Index dim_theta() const override { return 1; }
  std::string id() const override { return "lineargame"; }

  Vec f(const Vec& phi, const Vec& theta) const override {
    return Vec::Constant(1, -eps1_ * phi(0) + theta(0));
  }
  Vec g(const Vec& phi, const Vec& theta) const override {
    return Vec::Constant(1, eps2_ * theta(0) - phi(0));
  }
  Mat jac_phi_f(const Vec&, const Vec&) const override { return scalar(-eps1_); }
  Mat jac_theta_f(const Vec&, const Vec&) const override { return scalar(1.0); }
  Mat jac_phi_g(const Vec&, const Vec&) const override { return scalar(-1.0); }
  Mat jac_theta_g(const Vec&, const Vec&) const override { return scalar(eps2_); }

  bool supports_complex() const override { return true; }
  CVec field_c(const CVec& psi) const override {
    if (psi.size() != 2) throw Error(ErrorKind::kShapeMismatch, "lineargame: need 2 coordinates");
    CVec out(2);
    out(0) = -eps1_ * psi(0) + psi(1);
    out(1) = eps2_ * psi(1) - psi(0);
    return out;
  }

 private:
  double eps1_, eps2_;
};

class DiracGame final : public GameProblem {
 public:
  DiracGame() : loss_(dirac_gan_loss_new()) {}

  Index dim_phi() const override { return 1; }
  Index dim_theta() const override { return 1; }
  std::string id() const override { return "diracgan"; }

  Vec f(const Vec& phi, const Vec& theta) const override {
    return Vec::Constant(1, dirac::l1(phi(0) * theta(0)) * theta(0));
  }
  Vec g(const Vec& phi, const Vec& theta) const override {
    return Vec::Constant(1, -dirac::l1(phi(0) * theta(0)) * phi(0));
  }
  Mat jac_phi_f(const Vec& phi, const Vec& theta) const override {
    return scalar(dirac::l2(phi(0) * theta(0)) * theta(0) * theta(0));
  }
  Mat jac_theta_f(const Vec& phi, const Vec& theta) const override {
    const double z = phi(0) * theta(0);
    return scalar(dirac::l2(z) * z + dirac::l1(z));
  }
  Mat jac_phi_g(const Vec& phi, const Vec& theta) const override {
    const double z = phi(0) * theta(0);
    return scalar(-(dirac::l2(z) * z + dirac::l1(z)));
  }
  Mat jac_theta_g(const Vec& phi, const Vec& theta) const override {
    return scalar(-dirac::l2(phi(0) * theta(0)) * phi(0) * phi(0));
  }
  ProblemPtr zero_sum_loss() const override { return loss_; }

 private:
  ProblemPtr loss_;
};

class ZeroSumLossGame final : public GameProblem {
 public:
  ZeroSumLossGame(ProblemPtr loss, Index split) : loss_(std::move(loss)), split_(split) {}

  Index dim_phi() const override { return split_; }
  Index dim_theta() const override { return loss_->dim() - split_; }
  std::string id() const override { return "zerosum(" + loss_->id() + ")"; }

  Vec f(const Vec& phi, const Vec& theta) const override {
    return loss_->grad(join(phi, theta)).head(split_);
  }
  Vec g(const Vec& phi, const Vec& theta) const override {
    return -loss_->grad(join(phi, theta)).tail(dim_theta());
  }
  Mat jac_phi_f(const Vec& phi, const Vec& theta) const override {
    return loss_->hess(join(phi, theta)).topLeftCorner(split_, split_);
  }
  Mat jac_theta_f(const Vec& phi, const Vec& theta) const override {
    return loss_->hess(join(phi, theta)).topRightCorner(split_, dim_theta());
  }
  Mat jac_phi_g(const Vec& phi, const Vec& theta) const override {
    return -loss_->hess(join(phi, theta)).bottomLeftCorner(dim_theta(), split_);
  }
  Mat jac_theta_g(const Vec& phi, const Vec& theta) const override {
    return -loss_->hess(join(phi, theta)).bottomRightCorner(dim_theta(), dim_theta());
  }
  ProblemPtr zero_sum_loss() const override { return loss_; }

  bool supports_complex() const override { return loss_->supports_complex(); }
  CVec field_c(const CVec& psi) const override {
    CVec out = loss_->grad_c(psi);
    out.tail(dim_theta()) *= -1.0;
    return out;
  }

 private:
  Vec join(const Vec& phi, const Vec& theta) const {
    if (phi.size() != split_ || theta.size() != dim_theta()) {
      throw Error(ErrorKind::kShapeMismatch, id() + ": player block has wrong length");
    }
    Vec psi(loss_->dim());
    psi << phi, theta;
    return psi;
  }

  ProblemPtr loss_;
  Index split_;
};

}  // namespace

GamePtr linear_game_new(double eps1, double eps2) {
  return std::make_shared<LinearGame>(eps1, eps2);
}

GamePtr dirac_gan_new() { return std::make_shared<DiracGame>(); }

GamePtr zero_sum_game_from_loss(ProblemPtr loss, Index split) {
  if (!loss || split <= 0 || split >= loss->dim()) {
    throw Error(ErrorKind::kBadSplit, "split must leave both players at least one coordinate");
  }
  return std::make_shared<ZeroSumLossGame>(std::move(loss), split);
}

}  // namespace driftlab
