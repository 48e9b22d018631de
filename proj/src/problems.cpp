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


#include "driftlab/problems.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "driftlab/game_problem.hpp"

namespace driftlab {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNonSymmetric: return "NonSymmetric";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kBadSplit: return "BadSplit";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kDefective: return "Defective";
    case ErrorKind::kSingularArgument: return "SingularArgument";
    case ErrorKind::kComplexUnsupported: return "ComplexUnsupported";
    case ErrorKind::kNonfinite: return "Nonfinite";
    case ErrorKind::kZeroGradient: return "ZeroGradient";
    case ErrorKind::kNotEquilibrium: return "NotEquilibrium";
    case ErrorKind::kSchemeRequiresZeroSum: return "SchemeRequiresZeroSum";
    case ErrorKind::kDegenerateFit: return "DegenerateFit";
    case ErrorKind::kNotPiecewiseLinear: return "NotPiecewiseLinear";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kUnknownPreset: return "UnknownPreset";
  }
  return "Unknown";
}

void Problem::check_dim(Index n, const char* what) const {
  if (n != dim()) {
    std::ostringstream msg;
    msg << id() << ": " << what << " has length " << n << ", expected " << dim();
    throw Error(ErrorKind::kShapeMismatch, msg.str());
  }
}

namespace {

Vec real_or_throw(const Problem& p, const CVec& x) {
  if (!IsReal(x)) {
    throw Error(ErrorKind::kComplexUnsupported,
                p.id() + " is only defined on real arguments");
  }
  return x.real();
}

}  // namespace

Complex Problem::eval_c(const CVec& x) const { return eval(real_or_throw(*this, x)); }

CVec Problem::grad_c(const CVec& x) const {
  return grad(real_or_throw(*this, x)).cast<Complex>();
}

CMat Problem::hess_c(const CVec& x) const {
  return hess(real_or_throw(*this, x)).cast<Complex>();
}

CVec Problem::hvp_c(const CVec& x, const CVec& v) const {
  const Vec xr = real_or_throw(*this, x);
  if (IsReal(v)) return hvp(xr, v.real()).cast<Complex>();
  return hess(xr).cast<Complex>() * v;
}

CVec Problem::third_c(const CVec& x, const CVec& v, const CVec& w) const {
  const Vec xr = real_or_throw(*this, x);
  // Bilinear in (v, w): split into real and imaginary parts.
  const Vec vr = v.real(), vi = v.imag(), wr = w.real(), wi = w.imag();
  const Vec rr = third(xr, vr, wr), ii = third(xr, vi, wi);
  const Vec ri = third(xr, vr, wi), ir = third(xr, vi, wr);
  CVec out(dim());
  out.real() = rr - ii;
  out.imag() = ri + ir;
  return out;
}

namespace {

// Analytic problems implement templated evaluators once and get both the
// real and the complex overrides from this adapter.
template <typename Derived>
class AnalyticProblem : public Problem {
 public:
  bool supports_complex() const override { return true; }

  double eval(const Vec& x) const override {
    check_dim(x.size(), "argument");
    return self().template eval_t<double>(x);
  }
  Vec grad(const Vec& x) const override {
    check_dim(x.size(), "argument");
    return self().template grad_t<double>(x);
  }
  Mat hess(const Vec& x) const override {
    check_dim(x.size(), "argument");
    return self().template hess_t<double>(x);
  }
  Vec third(const Vec& x, const Vec& v, const Vec& w) const override {
    check_dim(x.size(), "argument");
    return self().template third_t<double>(x, v, w);
  }
  Complex eval_c(const CVec& x) const override {
    check_dim(x.size(), "argument");
    return self().template eval_t<Complex>(x);
  }
  CVec grad_c(const CVec& x) const override {
    check_dim(x.size(), "argument");
    return self().template grad_t<Complex>(x);
  }
  CMat hess_c(const CVec& x) const override {
    check_dim(x.size(), "argument");
    return self().template hess_t<Complex>(x);
  }
  CVec hvp_c(const CVec& x, const CVec& v) const override { return hess_c(x) * v; }
  CVec third_c(const CVec& x, const CVec& v, const CVec& w) const override {
    check_dim(x.size(), "argument");
    return self().template third_t<Complex>(x, v, w);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

template <typename T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Eigen's dot() conjugates its first argument; the complex extension must
// stay bilinear.
template <typename T>
T bilinear_dot(const VecT<T>& a, const VecT<T>& b) {
  return (a.transpose() * b)(0, 0);
}

class Quadratic final : public AnalyticProblem<Quadratic> {
 public:
  Quadratic(Mat a, Vec b, double c) : a_(std::move(a)), b_(std::move(b)), c_(c) {}

  Index dim() const override { return a_.rows(); }
  std::string id() const override { return "quadratic"; }

  Vec hvp(const Vec& x, const Vec& v) const override {
    check_dim(x.size(), "argument");
    return a_ * v;
  }

  template <typename T>
  T eval_t(const VecT<T>& x) const {
    const MatT<T> a = a_.cast<T>();
    const VecT<T> b = b_.cast<T>();
    return T(0.5) * bilinear_dot<T>(x, a * x) + bilinear_dot<T>(b, x) + T(c_);
  }
  template <typename T>
  VecT<T> grad_t(const VecT<T>& x) const {
    return a_.cast<T>() * x + b_.cast<T>();
  }
  template <typename T>
  MatT<T> hess_t(const VecT<T>&) const {
    return a_.cast<T>();
  }
  template <typename T>
  VecT<T> third_t(const VecT<T>&, const VecT<T>&, const VecT<T>&) const {
    return VecT<T>::Zero(dim());
  }

 private:
  Mat a_;
  Vec b_;
  double c_;
};

class Banana final : public AnalyticProblem<Banana> {
 public:
  Index dim() const override { return 2; }
  std::string id() const override { return "banana"; }

  template <typename T>
  T eval_t(const VecT<T>& p) const {
    const T x = p(0), y = p(1);
    const T r = T(1) - x, s = y - x * x;
    return r * r + T(100) * s * s;
  }
  template <typename T>
  VecT<T> grad_t(const VecT<T>& p) const {
    const T x = p(0), y = p(1);
    const T s = y - x * x;
    VecT<T> out(2);
    out(0) = T(-2) * (T(1) - x) - T(400) * x * s;
    out(1) = T(200) * s;
    return out;
  }
  template <typename T>
  MatT<T> hess_t(const VecT<T>& p) const {
    const T x = p(0), y = p(1);
    MatT<T> h(2, 2);
    h(0, 0) = T(2) - T(400) * y + T(1200) * x * x;
    h(0, 1) = h(1, 0) = T(-400) * x;
    h(1, 1) = T(200);
    return h;
  }
  // Non-zero third derivatives: E_xxx = 2400x, E_xxy = −400 (and permutations).
  template <typename T>
  VecT<T> third_t(const VecT<T>& p, const VecT<T>& v, const VecT<T>& w) const {
    const T x = p(0);
    VecT<T> out(2);
    out(0) = T(2400) * x * v(0) * w(0) - T(400) * (v(0) * w(1) + v(1) * w(0));
    out(1) = T(-400) * v(0) * w(0);
    return out;
  }
};

class Cos1d final : public AnalyticProblem<Cos1d> {
 public:
  Index dim() const override { return 1; }
  std::string id() const override { return "cos1d"; }

  template <typename T>
  static bool left(const T& t) {
    return std::real(t) < 0.0;
  }
  template <typename T>
  T eval_t(const VecT<T>& p) const {
    const T t = p(0);
    if (left(t)) return std::cos(t) + t;
    return T(2) * (t / T(3)) * (t / T(3)) + T(1) + t / T(3);
  }
  template <typename T>
  VecT<T> grad_t(const VecT<T>& p) const {
    const T t = p(0);
    VecT<T> out(1);
    out(0) = left(t) ? T(-1) * std::sin(t) + T(1) : T(4) * t / T(9) + T(1) / T(3);
    return out;
  }
  template <typename T>
  MatT<T> hess_t(const VecT<T>& p) const {
    const T t = p(0);
    MatT<T> out(1, 1);
    out(0, 0) = left(t) ? T(-1) * std::cos(t) : T(4) / T(9);
    return out;
  }
  template <typename T>
  VecT<T> third_t(const VecT<T>& p, const VecT<T>& v, const VecT<T>& w) const {
    const T t = p(0);
    VecT<T> out(1);
    out(0) = (left(t) ? std::sin(t) : T(0)) * v(0) * w(0);
    return out;
  }
};

class DiracLoss final : public Problem {
 public:
  Index dim() const override { return 2; }
  std::string id() const override { return "diracgan-loss"; }

  double eval(const Vec& x) const override {
    check_dim(x.size(), "argument");
    return dirac::l(x(0) * x(1)) + dirac::l(0.0);
  }
  Vec grad(const Vec& x) const override {
    check_dim(x.size(), "argument");
    const double d = dirac::l1(x(0) * x(1));
    return Vec{{d * x(1), d * x(0)}};
  }
  Mat hess(const Vec& x) const override {
    check_dim(x.size(), "argument");
    const double phi = x(0), theta = x(1), z = phi * theta;
    const double d1 = dirac::l1(z), d2 = dirac::l2(z);
    Mat h(2, 2);
    h(0, 0) = d2 * theta * theta;
    h(0, 1) = h(1, 0) = d2 * z + d1;
    h(1, 1) = d2 * phi * phi;
    return h;
  }
  Vec third(const Vec& x, const Vec& v, const Vec& w) const override {
    check_dim(x.size(), "argument");
    const double phi = x(0), theta = x(1), z = phi * theta;
    const double d2 = dirac::l2(z), d3 = dirac::l3(z);
    // Symmetric tensor entries indexed by the number of θ derivatives.
    const double t0 = d3 * theta * theta * theta;
    const double t1 = d3 * phi * theta * theta + 2.0 * d2 * theta;
    const double t2 = d3 * phi * phi * theta + 2.0 * d2 * phi;
    const double t3 = d3 * phi * phi * phi;
    Vec out(2);
    out(0) = t0 * v(0) * w(0) + t1 * (v(0) * w(1) + v(1) * w(0)) + t2 * v(1) * w(1);
    out(1) = t1 * v(0) * w(0) + t2 * (v(0) * w(1) + v(1) * w(0)) + t3 * v(1) * w(1);
    return out;
  }
};

class WeightedSum final : public Problem {
 public:
  WeightedSum(std::vector<ProblemPtr> terms, std::vector<double> weights)
      : terms_(std::move(terms)), weights_(std::move(weights)) {}

  Index dim() const override { return terms_.front()->dim(); }
  std::string id() const override { return "weighted-sum"; }
  bool supports_complex() const override {
    for (const auto& t : terms_) {
      if (!t->supports_complex()) return false;
    }
    return true;
  }

  double eval(const Vec& x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->eval(x);
    return s;
  }
  Vec grad(const Vec& x) const override {
    Vec s = Vec::Zero(dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->grad(x);
    return s;
  }
  Mat hess(const Vec& x) const override {
    Mat s = Mat::Zero(dim(), dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->hess(x);
    return s;
  }
  Vec hvp(const Vec& x, const Vec& v) const override {
    Vec s = Vec::Zero(dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->hvp(x, v);
    return s;
  }
  Vec third(const Vec& x, const Vec& v, const Vec& w) const override {
    Vec s = Vec::Zero(dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      s += weights_[i] * terms_[i]->third(x, v, w);
    }
    return s;
  }
  Complex eval_c(const CVec& x) const override {
    Complex s = 0.0;
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->eval_c(x);
    return s;
  }
  CVec grad_c(const CVec& x) const override {
    CVec s = CVec::Zero(dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->grad_c(x);
    return s;
  }
  CMat hess_c(const CVec& x) const override {
    CMat s = CMat::Zero(dim(), dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->hess_c(x);
    return s;
  }
  CVec hvp_c(const CVec& x, const CVec& v) const override {
    CVec s = CVec::Zero(dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) s += weights_[i] * terms_[i]->hvp_c(x, v);
    return s;
  }
  CVec third_c(const CVec& x, const CVec& v, const CVec& w) const override {
    CVec s = CVec::Zero(dim());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      s += weights_[i] * terms_[i]->third_c(x, v, w);
    }
    return s;
  }

 private:
  std::vector<ProblemPtr> terms_;
  std::vector<double> weights_;
};

}  // namespace

namespace dirac {

double l(double z) {
  // −log(1 + e^{−z}) evaluated without overflow for large |z|.
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double l1(double z) {
  return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

double l2(double z) { return -l1(z) * l1(-z); }

double l3(double z) {
  const double sm = l1(z), sp = l1(-z);  // σ(−z), σ(z)
  return sm * sp * (sp - sm);
}

}  // namespace dirac

ProblemPtr quadratic_new(const Mat& a, const Vec& b, double c) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
    throw Error(ErrorKind::kShapeMismatch, "quadratic: A must be square and match b");
  }
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::kNonSymmetric, "quadratic: A is not symmetric");
  }
  return std::make_shared<Quadratic>(a, b, c);
}

ProblemPtr banana_new() { return std::make_shared<Banana>(); }

ProblemPtr cos1d_new() { return std::make_shared<Cos1d>(); }

ProblemPtr dirac_gan_loss_new() { return std::make_shared<DiracLoss>(); }

ProblemPtr weighted_sum_new(std::vector<ProblemPtr> terms, std::vector<double> weights) {
  if (terms.empty() || terms.size() != weights.size()) {
    throw Error(ErrorKind::kShapeMismatch, "weighted_sum: need one weight per term");
  }
  for (const auto& t : terms) {
    if (t->dim() != terms.front()->dim()) {
      throw Error(ErrorKind::kShapeMismatch, "weighted_sum: terms differ in dimension");
    }
  }
  return std::make_shared<WeightedSum>(std::move(terms), std::move(weights));
}

}  // namespace driftlab
