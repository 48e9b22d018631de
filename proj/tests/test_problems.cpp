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
#include <vector>

#include <doctest.h>

#include "driftlab/game_problem.hpp"
#include "driftlab/problems.hpp"
#include "oracles.hpp"

using namespace driftlab;
using doctest::Approx;

namespace {

Vec V(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Checks every derivative level against central differences of the level
// below, using only eval as the base oracle.
void CheckDerivatives(const Problem& p, const Vec& x, const Vec& v, const Vec& w, double tol) {
  const double eps = 1e-5;
  auto eval = [&](const Vec& y) { return p.eval(y); };
  auto grad = [&](const Vec& y) { return p.grad(y); };
  auto hvp_v = [&](const Vec& y) { return p.hvp(y, v); };

  CHECK(oracle::RelErr(p.grad(x), oracle::Gradient(eval, x, eps)) <= tol);
  const Mat h = p.hess(x);
  CHECK(oracle::RelErr(h, oracle::Jacobian(grad, x, eps)) <= tol);
  CHECK((h - h.transpose()).norm() <= 1e-10 * std::max(1.0, h.norm()));
  CHECK(oracle::RelErr(p.hvp(x, v), h * v) <= 1e-10);
  CHECK(oracle::RelErr(p.third(x, v, w), oracle::Directional(hvp_v, x, w, eps)) <= tol);
}

}  // namespace

TEST_CASE("identity quadratic value and gradient") {
  auto q = quadratic_new(Mat::Identity(2, 2), Vec::Zero(2));
  CHECK(q->eval(V({1, 1})) == Approx(1.0));
  CHECK(q->grad(V({1, 1})).isApprox(V({1, 1})));
  CHECK(q->dim() == 2);
}

TEST_CASE("diagonal quadratic Hessian action") {
  Mat a = Mat::Zero(2, 2);
  a.diagonal() << 1, 4;
  auto q = quadratic_new(a, Vec::Zero(2));
  CHECK(q->hvp(V({1, 0}), V({0, 1})).isApprox(V({0, 4})));
}

TEST_CASE("one-dimensional quadratic minimum") {
  Mat a(1, 1);
  a << 2;
  auto q = quadratic_new(a, V({-2}));
  CHECK(q->grad(V({0}))(0) == Approx(-2.0));
  CHECK(std::abs(q->grad(V({1}))(0)) < 1e-15);
}

TEST_CASE("quadratic rejects an asymmetric matrix") {
  Mat a(2, 2);
  a << 1, 2, 0, 1;
  CHECK_THROWS_AS(quadratic_new(a, Vec::Zero(2)), Error);
  try {
    quadratic_new(a, Vec::Zero(2));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNonSymmetric);
  }
  Mat ok = Mat::Identity(2, 2);
  ok(0, 1) = 1e-12;
  CHECK_NOTHROW(quadratic_new(ok, Vec::Zero(2)));
}

TEST_CASE("shape mismatches are reported") {
  auto q = quadratic_new(Mat::Identity(2, 2), Vec::Zero(2));
  CHECK_THROWS_AS(q->eval(Vec::Zero(3)), Error);
  CHECK_THROWS_AS(quadratic_new(Mat::Identity(2, 2), Vec::Zero(3)), Error);
}

TEST_CASE("quadratic third derivative vanishes") {
  oracle::Gen gen(11);
  auto q = quadratic_new(gen.symmetric(4), gen.vec(4));
  for (int i = 0; i < 5; ++i) {
    CHECK(q->third(gen.vec(4), gen.vec(4), gen.vec(4)).norm() == 0.0);
  }
}

TEST_CASE("banana reference values") {
  auto b = banana_new();
  CHECK(b->eval(V({1, 1})) == 0.0);
  CHECK(b->grad(V({1, 1})).norm() == 0.0);
  CHECK(b->eval(V({0, 0})) == Approx(1.0));
  CHECK(b->grad(V({0, 0})).isApprox(V({-2, 0})));

  // Closed-form 2x2 eigenvalues of [[802, -400], [-400, 200]].
  const Mat h = b->hess(V({1, 1}));
  CHECK(h(0, 0) == Approx(802));
  CHECK(h(0, 1) == Approx(-400));
  CHECK(h(1, 1) == Approx(200));
  const double tr = h.trace(), det = h.determinant();
  const double disc = std::sqrt(tr * tr / 4 - det);
  CHECK(tr / 2 + disc == Approx(1001.6).epsilon(1e-4));
  CHECK(tr / 2 - disc == Approx(0.39936).epsilon(1e-3));
}

TEST_CASE("piecewise cosine branches") {
  auto c = cos1d_new();
  CHECK(c->eval(V({-1})) == Approx(std::cos(-1.0) - 1.0));
  CHECK(c->eval(V({3})) == Approx(2.0 + 1.0 + 1.0));
  CHECK(c->eval(V({0})) == Approx(1.0));
  // Right-hand derivatives at the kink.
  CHECK(c->grad(V({0}))(0) == Approx(1.0 / 3.0));
  CHECK(c->hess(V({0}))(0, 0) == Approx(4.0 / 9.0));
  CHECK(c->grad(V({-0.5}))(0) == Approx(-std::sin(-0.5) + 1.0));
}

TEST_CASE("derivative chain matches finite differences at random points") {
  oracle::Gen gen(2024);
  std::vector<ProblemPtr> problems{banana_new(), cos1d_new(), dirac_gan_loss_new()};
  problems.push_back(weighted_sum_new({banana_new(), dirac_gan_loss_new()}, {0.3, 2.0}));
  for (const auto& p : problems) {
    CAPTURE(p->id());
    for (int i = 0; i < 10; ++i) {
      Vec x = gen.vec(p->dim());
      if (p->id() == "cos1d" && std::abs(x(0)) < 1e-2) x(0) += 0.1;  // stay off the kink
      CheckDerivatives(*p, x, gen.vec(p->dim()), gen.vec(p->dim()), 1e-5);
    }
  }
}

TEST_CASE("quadratic derivatives are exact") {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = gen.integer(1, 6);
    auto q = quadratic_new(gen.symmetric(d), gen.vec(d), gen.uniform(-1, 1));
    CheckDerivatives(*q, gen.vec(d), gen.vec(d), gen.vec(d), 1e-9);
  }
}

TEST_CASE("complex evaluators agree with real ones on real inputs") {
  oracle::Gen gen(8);
  std::vector<ProblemPtr> problems{banana_new(), cos1d_new(),
                                   quadratic_new(gen.symmetric(3), gen.vec(3))};
  for (const auto& p : problems) {
    CAPTURE(p->id());
    CHECK(p->supports_complex());
    const Vec x = gen.vec(p->dim());
    const CVec xc = x.cast<Complex>();
    CHECK(std::abs(p->eval_c(xc).imag()) <= 1e-12);
    CHECK(p->eval_c(xc).real() == Approx(p->eval(x)));
    CHECK(p->grad_c(xc).imag().norm() <= 1e-12);
    CHECK(oracle::RelErr(p->grad_c(xc).real(), p->grad(x)) <= 1e-12);
    CHECK(oracle::RelErr(p->hess_c(xc).real(), p->hess(x)) <= 1e-12);
  }
}

TEST_CASE("complex banana matches the polynomial at complex points") {
  auto b = banana_new();
  const Complex x(0.3, 0.2), y(-0.1, 0.4);
  CVec z(2);
  z << x, y;
  const Complex want = (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  CHECK(std::abs(b->eval_c(z) - want) < 1e-12);
  // Holomorphic gradient by complex-step free formula.
  CVec g(2);
  g << -2.0 * (1.0 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x);
  CHECK((b->grad_c(z) - g).norm() < 1e-12);
}

TEST_CASE("real-only problems refuse complex arguments") {
  auto d = dirac_gan_loss_new();
  CHECK_FALSE(d->supports_complex());
  CVec z(2);
  z << Complex(0.1, 0.1), 0.2;
  CHECK_THROWS_AS(d->grad_c(z), Error);
  CHECK_NOTHROW(d->grad_c(CVec(Vec::Ones(2).cast<Complex>())));
}

TEST_CASE("dirac loss helpers") {
  CHECK(dirac::l1(0.0) == Approx(0.5));
  CHECK(dirac::l1(1.0) == Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0))));
  CHECK(dirac::l(0.0) == Approx(-std::log(2.0)));
  // Stable for large arguments.
  CHECK(std::isfinite(dirac::l(-800.0)));
  CHECK(dirac::l(-800.0) == Approx(-800.0));
}

TEST_CASE("dirac game fields") {
  auto g = dirac_gan_new();
  const Vec zero = Vec::Zero(1), one = Vec::Ones(1);
  CHECK(g->f(zero, zero)(0) == 0.0);
  CHECK(g->g(zero, zero)(0) == 0.0);
  CHECK(g->f(one, one)(0) == Approx(0.26894).epsilon(1e-5));
  CHECK(g->g(one, one)(0) == Approx(-0.26894).epsilon(1e-5));
  // Jacobian at the origin is [[0, 0.5], [-0.5, 0]]: eigenvalues ±0.5i.
  const Mat j = joint_jacobian(*g, Vec::Zero(2));
  CHECK(j(0, 1) == Approx(0.5));
  CHECK(j(1, 0) == Approx(-0.5));
  CHECK(j(0, 0) == 0.0);
  CHECK(j(1, 1) == 0.0);
}

TEST_CASE("linear game fields") {
  const Vec one = Vec::Ones(1), zero = Vec::Zero(1);
  auto g0 = linear_game_new(0.0, 0.0);
  CHECK(g0->f(one, one)(0) == Approx(1.0));
  CHECK(g0->g(one, one)(0) == Approx(-1.0));
  auto g = linear_game_new(0.09, 0.09);
  CHECK(g->f(one, one)(0) == Approx(0.91));
  CHECK(g->g(one, one)(0) == Approx(-0.91));
  CHECK(joint_field(*g, Vec::Zero(2)).norm() == 0.0);
  // Unique equilibrium: the joint Jacobian is nonsingular.
  CHECK(std::abs(joint_jacobian(*g, Vec::Zero(2)).determinant()) > 0.5);
}

TEST_CASE("zero-sum games from losses") {
  Mat a(2, 2);
  a << 0, 1, 1, 0;  // E = φθ
  auto bilinear = zero_sum_game_from_loss(quadratic_new(a, Vec::Zero(2)), 1);
  const Vec phi = Vec::Constant(1, 0.7), theta = Vec::Constant(1, -0.4);
  CHECK(bilinear->f(phi, theta)(0) == Approx(-0.4));
  CHECK(bilinear->g(phi, theta)(0) == Approx(-0.7));

  Mat s = Mat::Zero(2, 2);
  s.diagonal() << 1, -1;  // E = ½φ² − ½θ²
  auto saddle = zero_sum_game_from_loss(quadratic_new(s, Vec::Zero(2)), 1);
  CHECK(saddle->f(phi, theta)(0) == Approx(0.7));
  CHECK(saddle->g(phi, theta)(0) == Approx(-0.4));

  CHECK_THROWS_AS(zero_sum_game_from_loss(quadratic_new(a, Vec::Zero(2)), 0), Error);
  CHECK_THROWS_AS(zero_sum_game_from_loss(quadratic_new(a, Vec::Zero(2)), 2), Error);
}

TEST_CASE("loss-derived DiracGAN equals the direct construction") {
  auto direct = dirac_gan_new();
  auto derived = zero_sum_game_from_loss(dirac_gan_loss_new(), 1);
  oracle::Gen gen(3);
  for (int i = 0; i < 20; ++i) {
    const Vec p = gen.vec(1), t = gen.vec(1);
    CHECK((direct->f(p, t) - derived->f(p, t)).norm() <= 1e-12);
    CHECK((direct->g(p, t) - derived->g(p, t)).norm() <= 1e-12);
    const Vec psi = (Vec(2) << p, t).finished();
    CHECK((joint_jacobian(*direct, psi) - joint_jacobian(*derived, psi)).norm() <= 1e-12);
  }
}

TEST_CASE("game Jacobian blocks match finite differences") {
  oracle::Gen gen(17);
  std::vector<GamePtr> games{dirac_gan_new(), linear_game_new(0.2, -0.1),
                             zero_sum_game_from_loss(quadratic_new(gen.symmetric(5), gen.vec(5)), 2),
                             zero_sum_game_from_loss(banana_new(), 1)};
  for (const auto& game : games) {
    CAPTURE(game->id());
    for (int i = 0; i < 10; ++i) {
      const Vec psi = gen.vec(game->dim(), 0.7);
      auto field = [&](const Vec& y) { return joint_field(*game, y); };
      CHECK(oracle::RelErr(joint_jacobian(*game, psi), oracle::Jacobian(field, psi, 1e-5)) <= 1e-7);
      if (game->zero_sum_loss()) {
        const Vec p = psi.head(game->dim_phi()), t = psi.tail(game->dim_theta());
        CHECK((game->jac_theta_f(p, t) + game->jac_phi_g(p, t).transpose()).norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("weighted sum validates its terms") {
  CHECK_THROWS_AS(weighted_sum_new({banana_new(), cos1d_new()}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(weighted_sum_new({banana_new()}, {1.0, 2.0}), Error);
  auto w = weighted_sum_new({banana_new(), banana_new()}, {0.25, 0.75});
  CHECK(w->eval(Vec::Zero(2)) == Approx(1.0));
}
