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


#ifndef DRIFTLAB_PROBLEMS_HPP_
#define DRIFTLAB_PROBLEMS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "driftlab/common.hpp"

namespace driftlab {

/// A twice (thrice) differentiable scalar objective E(θ).
///
/// The real evaluators are mandatory. The complex ones default to accepting
/// only arguments whose imaginary part is exactly zero and throw
/// kComplexUnsupported otherwise; problems whose formulas are analytic
/// override them and report supports_complex() == true.
///
/// third(x, v, w) is the vector with k-th entry
/// sum_{i,j} d^3E / (dθ_i dθ_k dθ_j) v_i w_j.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Index dim() const = 0;
  virtual std::string id() const = 0;
  virtual bool supports_complex() const { return false; }

  virtual double eval(const Vec& x) const = 0;
  virtual Vec grad(const Vec& x) const = 0;
  virtual Mat hess(const Vec& x) const = 0;
  virtual Vec hvp(const Vec& x, const Vec& v) const { return hess(x) * v; }
  virtual Vec third(const Vec& x, const Vec& v, const Vec& w) const = 0;

  virtual Complex eval_c(const CVec& x) const;
  virtual CVec grad_c(const CVec& x) const;
  virtual CMat hess_c(const CVec& x) const;
  virtual CVec hvp_c(const CVec& x, const CVec& v) const;
  virtual CVec third_c(const CVec& x, const CVec& v, const CVec& w) const;

 protected:
  void check_dim(Index n, const char* what) const;
};

using ProblemPtr = std::shared_ptr<const Problem>;

/// E(θ) = ½ θᵀAθ + bᵀθ + c. Throws kNonSymmetric if ‖A − Aᵀ‖∞ > 1e-10.
ProblemPtr quadratic_new(const Mat& a, const Vec& b, double c = 0.0);

/// Rosenbrock's banana (1 − x)² + 100 (y − x²)².
ProblemPtr banana_new();

/// The 1-D piecewise objective cos(θ) + θ for θ < 0 and
/// 2(θ/3)² + 1 + θ/3 otherwise. Derivatives at 0 are the right-hand ones;
/// complex arguments pick the branch by their real part.
ProblemPtr cos1d_new();

/// E(φ, θ) = l(φθ) + l(0) with l(z) = −log(1 + e^{−z}); coordinates are
/// ordered (φ, θ).
ProblemPtr dirac_gan_loss_new();

/// Sum of weighted problems sharing one dimension: Σ wᵢ Eᵢ.
ProblemPtr weighted_sum_new(std::vector<ProblemPtr> terms, std::vector<double> weights);

/// Scalar helpers for the saturating DiracGAN loss l(z) = −log(1 + e^{−z}).
namespace dirac {
double l(double z);
double l1(double z);  // l′(z) = σ(−z)
double l2(double z);
double l3(double z);
}  // namespace dirac

}  // namespace driftlab

#endif  // DRIFTLAB_PROBLEMS_HPP_
