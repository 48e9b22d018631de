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
#include <numbers>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "driftlab/flows.hpp"
#include "oracles.hpp"

using namespace driftlab;
using doctest::Approx;

namespace {

ProblemPtr HalfSquare() { return quadratic_new(Mat::Identity(1, 1), Vec::Zero(1)); }

Vec Real(const CVec& v) { return v.real(); }

// Plain GD iterate used as the reference for closed forms.
Vec GdIterate(const Mat& a, const Vec& b, Vec theta, double h, int n) {
  for (int i = 0; i < n; ++i) theta -= h * (a * theta + b);
  return theta;
}

}  // namespace

TEST_CASE("alpha reference values") {
  const auto pf = FlowKind::PF(1.0);
  CHECK(std::abs(alpha(pf, 0.0) - Complex(-1.0, 0.0)) < 1e-15);
  const Complex two = alpha(pf, 2.0);
  CHECK(two.real() == 0.0);
  CHECK(two.imag() == Approx(std::numbers::pi / 2).epsilon(1e-14));
  const Complex three = alpha(pf, 3.0);
  CHECK(three.real() == Approx(std::log(2.0) / 3.0).epsilon(1e-14));
  CHECK(three.imag() == Approx(std::numbers::pi / 3.0).epsilon(1e-14));
  CHECK(alpha(FlowKind::NGF(), 0.7) == Complex(-1.0, 0.0));
  CHECK(alpha(FlowKind::IGR(0.1), 0.4).real() == Approx(-1.2));
  CHECK(alpha(FlowKind::PositiveGradient(), 0.4) == Complex(1.0, 0.0));
}

TEST_CASE("alpha near zero joins the series smoothly") {
  const auto pf = FlowKind::PF(1.0);
  for (double x : {1e-7, -1e-7, 2e-6, -2e-6}) {
    const double series = -1.0 - x / 2 - x * x / 3;
    CHECK(alpha(pf, x).real() == Approx(series).epsilon(1e-12));
  }
}

TEST_CASE("alpha refuses the singular argument") {
  CHECK_THROWS_AS(alpha(FlowKind::PF(1.0), 1.0), Error);
  CHECK_THROWS_AS(alpha(FlowKind::PFNonPrincipal(1.0), 1.0 + 1e-13), Error);
  CHECK_NOTHROW(alpha(FlowKind::PF(1.0), 1.0 + 1e-9));
}

TEST_CASE("alpha sign regimes") {
  oracle::Gen gen(1);
  const auto pf = FlowKind::PF(1.0);
  for (int i = 0; i < 500; ++i) {
    const double below = gen.uniform(-50.0, 0.999);
    CHECK(alpha(pf, below).imag() == 0.0);
    CHECK(alpha(pf, below).real() < 0.0);
    CHECK(alpha(pf, gen.uniform(1.001, 1.999)).real() < 0.0);
    CHECK(alpha(pf, gen.uniform(2.001, 50.0)).real() > 0.0);
  }
}

TEST_CASE("flow kinds validate h and parse names") {
  CHECK_THROWS_AS(FlowKind::PF(0.0), Error);
  CHECK_THROWS_AS(FlowKind::IGR(-1.0), Error);
  CHECK(ParseFlow("pf+np", 0.1).type == FlowType::kPFNonPrincipal);
  CHECK(ParseFlow("signswap", 0.1).type == FlowType::kSignSwapLeading);
  CHECK_THROWS_AS(ParseFlow("heavy-ball", 0.1), Error);
}

TEST_CASE("scalar PF field") {
  const CVec f = flow_field(FlowKind::PF(0.5), *HalfSquare(), Vec(Vec::Ones(1)));
  CHECK(f(0).real() == Approx(std::log(0.5) / 0.5).epsilon(1e-14));
  CHECK(f(0).imag() == 0.0);
}

TEST_CASE("stable quadratic PF field is real and anti-parallel to the gradient direction") {
  const Mat a = Vec(Vec::LinSpaced(4, 0.5, 3.0)).asDiagonal();
  auto q = quadratic_new(a, Vec::Zero(4));
  const Vec theta = (Vec(4) << 1.0, -2.0, 0.5, 0.3).finished();
  const double h = 0.3;
  const CVec f = flow_field(FlowKind::PF(h), *q, theta);
  CHECK(f.imag().norm() == 0.0);
  for (Index i = 0; i < 4; ++i) {
    const double x = h * a(i, i);
    CHECK(f(i).real() == Approx(std::log(1 - x) / x * a(i, i) * theta(i)).epsilon(1e-12));
  }
}

TEST_CASE("flow fields on quadratics match their matrix formulas") {
  oracle::Gen gen(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = gen.spectrum(5, -1.0, 4.0);
    const Vec b = gen.vec(5), theta = gen.vec(5);
    auto q = quadratic_new(a, b);
    const double h = 0.15;
    const Vec g = a * theta + b;
    CHECK((Real(flow_field(FlowKind::NGF(), *q, theta)) + g).norm() <= 1e-12);
    CHECK((Real(flow_field(FlowKind::PositiveGradient(), *q, theta)) - g).norm() <= 1e-12);
    const Vec igr = -g - h / 2 * a * g;
    CHECK(oracle::RelErr(Real(flow_field(FlowKind::IGR(h), *q, theta)), igr) <= 1e-12);
    const Vec third = igr - h * h / 3 * a * a * g;
    CHECK(oracle::RelErr(Real(flow_field(FlowKind::ThirdOrder(h), *q, theta)), third) <= 1e-12);
    // PF via the matrix logarithm series: −Σ_k (hA)^k/(k+1) g.
    Vec series = Vec::Zero(5), term = g;
    for (int k = 0; k < 200; ++k) {
      series -= term / (k + 1.0);
      term = h * a * term;
    }
    CHECK(oracle::RelErr(Real(flow_field(FlowKind::PF(h), *q, theta)), series) <= 1e-10);
    CHECK(oracle::RelErr(Real(flow_field(FlowKind::PFNonPrincipal(h), *q, theta)), series) <= 1e-10);
  }
}

TEST_CASE("third-order field includes the non-principal term on banana") {
  auto p = banana_new();
  const Vec theta = (Vec(2) << 0.3, 0.2).finished();
  const double h = 0.01;
  const Vec g = p->grad(theta);
  const Mat hs = p->hess(theta);
  const Vec want = -g - h / 2 * hs * g - h * h * (hs * hs * g / 3 + p->third(theta, g, g) / 12);
  CHECK(oracle::RelErr(Real(flow_field(FlowKind::ThirdOrder(h), *p, theta)), want) <= 1e-12);
  const Vec diff = Real(flow_field(FlowKind::PF(h), *p, theta)) -
                   Real(flow_field(FlowKind::PFNonPrincipal(h), *p, theta));
  CHECK(oracle::RelErr(diff, h * h / 12 * p->third(theta, g, g)) <= 1e-10);
}

TEST_CASE("PF equals NGF where the gradient lies in the Hessian kernel") {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    Vec ev;
    Mat a = gen.spectrum(4, 0.5, 3.0, &ev);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    Vec lam = es.eigenvalues();
    lam(0) = 0.0;
    a = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    a = (0.5 * (a + a.transpose())).eval();
    // θ chosen so g = Aθ + b is the null eigenvector.
    const Vec theta = gen.vec(4);
    const Vec b = es.eigenvectors().col(0) - a * theta;
    auto q = quadratic_new(a, b);
    const CVec pf = flow_field(FlowKind::PF(0.4), *q, theta);
    const CVec ngf = flow_field(FlowKind::NGF(), *q, theta);
    CHECK((pf - ngf).norm() <= 1e-10);
  }
}

TEST_CASE("sign-swap field") {
  auto q = quadratic_new(Vec(Vec::LinSpaced(2, 3.0, 1.0)).asDiagonal(), Vec::Zero(2));
  const CVec f = flow_field(FlowKind::SignSwapLeading(), *q, Vec(Vec::Ones(2)));
  CHECK(f(0).real() == Approx(3.0));
  CHECK(f(1).real() == Approx(-1.0));
}

TEST_CASE("complex states need a complex extension") {
  auto q = quadratic_new(Mat::Identity(2, 2), Vec::Zero(2));
  CVec z(2);
  z << Complex(1, 1), Complex(0, 0);
  CHECK_NOTHROW(flow_field(FlowKind::PF(0.1), *q, z));
  CHECK_THROWS_AS(flow_field(FlowKind::IGR(0.1), *dirac_gan_loss_new(), z), Error);
}

TEST_CASE("integrator examples") {
  auto p = HalfSquare();
  IntegratorConfig cfg;
  cfg.delta = 1e-5;
  cfg.record_every = 1000;
  const CVec one = CVec::Ones(1);
  const Trajectory ngf = integrate(FlowKind::NGF(), *p, one, 1.0, cfg);
  CHECK(std::abs(ngf.final_state()(0) - std::exp(-1.0)) < 1e-4);
  CHECK(ngf.times.back() == Approx(1.0).epsilon(1e-9));
  CHECK(ngf.states.front() == one);
  for (std::size_t i = 1; i < ngf.times.size(); ++i) CHECK(ngf.times[i] > ngf.times[i - 1]);
  const Trajectory pf = integrate(FlowKind::PF(0.5), *p, one, 0.5, cfg);
  CHECK(std::abs(pf.final_state()(0) - 0.5) < 1e-4);
  const Trajectory pos = integrate(FlowKind::PositiveGradient(), *p, one, 1.0, cfg);
  CHECK(std::abs(pos.final_state()(0) - std::exp(1.0)) < 1e-3 * std::exp(1.0));
}

TEST_CASE("integrator reports nonfinite states") {
  auto p = HalfSquare();
  IntegratorConfig cfg;
  cfg.delta = 0.5;
  CHECK_THROWS_AS(integrate(FlowKind::PositiveGradient(), *p, CVec::Constant(1, 1e300), 200.0, cfg),
                  Error);
}

TEST_CASE("trajectory CSV has one row per record") {
  auto p = HalfSquare();
  IntegratorConfig cfg;
  cfg.delta = 0.01;
  cfg.record_every = 10;
  cfg.diagnostics = true;
  const Trajectory t = integrate(FlowKind::NGF(), *p, CVec::Ones(1), 1.0, cfg);
  std::ostringstream out;
  t.write_csv(out);
  const std::string s = out.str();
  CHECK(s.rfind("t,re_0,im_0,loss,grad_norm", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(t.times.size()) + 1);
}

TEST_CASE("closed-form PF examples") {
  const Mat one = Mat::Identity(1, 1), five = 5.0 * Mat::Identity(1, 1);
  const Vec z = Vec::Zero(1), th = Vec::Ones(1);
  CHECK(std::abs(pf_quadratic_closed_form(one, z, th, 0.5, 0.5)(0) - 0.5) < 1e-14);
  const CVec sq = pf_quadratic_closed_form(five, z, th, 1.0, 0.5);
  CHECK(sq(0).real() == Approx(2.25).epsilon(1e-13));
  CHECK(std::abs(sq(0).imag()) < 1e-13);
  CHECK((pf_quadratic_closed_form(five, z, 3.0 * th, 0.0, 0.5) - 3.0 * th.cast<Complex>()).norm() == 0.0);
  CHECK_THROWS_AS(pf_quadratic_closed_form(2.0 * one, z, th, 1.0, 0.5), Error);
}

TEST_CASE("closed form reproduces gradient descent on random quadratics") {
  oracle::Gen gen(4);
  for (int trial = 0; trial < 25; ++trial) {
    const Index d = gen.integer(1, 10);
    Vec ev;
    const Mat a = gen.spectrum(d, -2.0, 6.0, &ev);
    const Vec b = gen.vec(d), th = gen.vec(d);
    double h = gen.uniform(0.05, 0.6);
    if (((h * ev.array() - 1.0).abs() < 1e-3).any()) h *= 0.9;
    const double scale = 1.0 + GdIterate(a, b, th, h, 50).norm();
    for (int n : {1, 2, 7, 20, 50}) {
      const CVec cf = pf_quadratic_closed_form(a, b, th, n * h, h);
      const Vec gd = GdIterate(a, b, th, h, n);
      CHECK((cf.real() - gd).norm() <= 1e-9 * std::max(scale, 1.0 + gd.norm()));
      CHECK(cf.imag().norm() <= 1e-9 * std::max(scale, 1.0 + gd.norm()));
    }
  }
}

TEST_CASE("PF integration follows gradient descent on a quadratic") {
  const Mat a = (Mat(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const Vec b = (Vec(2) << 0.3, -0.2).finished();
  const Vec th = (Vec(2) << 1.0, -1.0).finished();
  auto q = quadratic_new(a, b);
  const double h = 0.6;  // largest hλ ≈ 1.28, so the flow is complex in between
  IntegratorConfig cfg;
  cfg.delta = h / 128;
  cfg.scheme = Scheme::kRk4;
  cfg.record_every = 128;
  const Trajectory t = integrate(FlowKind::PF(h), *q, th.cast<Complex>(), 5 * h, cfg);
  const Vec gd = GdIterate(a, b, th, h, 5);
  CHECK((t.final_state() - gd.cast<Complex>()).norm() <= 1e-4 * (1 + th.norm()));
}

TEST_CASE("gradient-eigenvector prediction examples") {
  const double h = 0.1;
  CHECK(std::abs(grad_dot_u_prediction(0.7, 2 / h, h, 3.3)) == Approx(0.7).epsilon(1e-12));
  const Complex half = grad_dot_u_prediction(0.8, 1 / (2 * h), h, h);
  CHECK(half.real() == Approx(0.4).epsilon(1e-12));
  CHECK(std::abs(half.imag()) < 1e-14);
  const Complex grow = grad_dot_u_prediction(0.8, 3 / h, h, h);
  CHECK(grow.real() == Approx(-1.6).epsilon(1e-12));
  CHECK(std::abs(grow.imag()) < 1e-12);
  CHECK_THROWS_AS(grad_dot_u_prediction(1.0, 1 / h, h, 1.0), Error);
}

TEST_CASE("prediction magnitude is monotone by regime") {
  oracle::Gen gen(5);
  const double h = 0.2;
  for (int i = 0; i < 200; ++i) {
    const double lam = gen.uniform(-5.0, 25.0);
    if (std::abs(h * lam - 1) < 1e-6 || std::abs(h * lam - 2) < 1e-6) continue;
    const double a = std::abs(grad_dot_u_prediction(1.0, lam, h, 0.5));
    const double b = std::abs(grad_dot_u_prediction(1.0, lam, h, 1.5));
    if (lam > 0 && lam < 2 / h) {
      CHECK(b < a);
    } else {
      CHECK(b > a);
    }
  }
}

TEST_CASE("local error order of GD against the modified flows on banana") {
  auto p = banana_new();
  const Vec th = (Vec(2) << 0.3, 0.2).finished();
  const double h0 = 0.016;
  struct Case {
    FlowType type;
    double lo, hi;
  };
  for (const Case c : {Case{FlowType::kNGF, 1.9, 2.1}, Case{FlowType::kIGR, 2.85, 3.15},
                       Case{FlowType::kThirdOrder, 3.8, 4.2}}) {
    std::vector<double> xs, ys;
    for (int k = 4; k <= 10; ++k) {
      const double h = h0 * std::ldexp(1.0, -k);
      const FlowKind kind{c.type, c.type == FlowType::kNGF ? 0.0 : h};
      const Vec gd = th - h * p->grad(th);
      const Vec flow = integrate_field(
          [&](const Vec& x) { return Vec(flow_field(kind, *p, x).real()); }, th, h, 64, Scheme::kRk4);
      xs.push_back(std::log(h));
      ys.push_back(std::log((gd - flow).norm()));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double s = sxy / sxx;
    CHECK(s >= c.lo);
    CHECK(s <= c.hi);
  }
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123}) {
    CHECK(std::stod(FormatDouble(v)) == v);
  }
}
