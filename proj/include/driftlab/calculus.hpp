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


#ifndef DRIFTLAB_CALCULUS_HPP_
#define DRIFTLAB_CALCULUS_HPP_

#include <functional>
#include <optional>

#include "driftlab/common.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

/// Eigenpairs sorted by descending real part, then descending imaginary part,
/// then original index. Columns of `vectors` have unit 2-norm. When a
/// reference gradient is supplied each column is flipped so Re(gᵀu) ≥ 0.
struct Spectrum {
  CVec values;
  CMat vectors;
  bool has_vectors = true;

  /// Real parts of the eigenvalues (exact for symmetric input).
  Vec real_values() const { return values.real(); }
};

/// Symmetric eigensolve. Throws kNonSymmetric when
/// max|H − Hᵀ| > 1e-8·(1 + max|H|), kNoConvergence if the solver fails.
Spectrum eig_sym(const Mat& h, const std::optional<Vec>& ref_grad = std::nullopt);

/// General eigensolve. With require_vectors, a matrix whose eigenvector
/// basis is numerically singular throws kDefective; otherwise the spectrum is
/// returned with has_vectors = false.
Spectrum eig_general(const Mat& j, bool require_vectors = true,
                     const std::optional<CVec>& ref_grad = std::nullopt);

/// Leading `k` eigenpairs (largest algebraic value first) of the symmetric
/// operator `op` by Lanczos with full reorthogonalization.
Spectrum lanczos_top(const std::function<Vec(const Vec&)>& op, Index dim, Index k,
                     const std::optional<Vec>& ref_grad = std::nullopt, Index iterations = 0);
Spectrum eig_general(const CMat& j, bool require_vectors = true,
                     const std::optional<CVec>& ref_grad = std::nullopt);

/// Central-difference oracles.
Vec fd_grad(const Problem& p, const Vec& x, double eps);
Vec fd_hvp(const Problem& p, const Vec& x, const Vec& v, double eps);
Vec fd_third(const Problem& p, const Vec& x, const Vec& v, const Vec& w, double eps);

/// Central-difference Jacobian of an arbitrary vector map.
template <typename F>
Mat fd_jacobian(F&& fn, const Vec& x, double eps) {
  const Index n = x.size();
  Mat jac;
  for (Index i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp(i) += eps;
    xm(i) -= eps;
    const Vec col = (fn(xp) - fn(xm)) / (2.0 * eps);
    if (i == 0) jac.resize(col.size(), n);
    jac.col(i) = col;
  }
  return jac;
}

}  // namespace driftlab

#endif  // DRIFTLAB_CALCULUS_HPP_
