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


#include "driftlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace driftlab {
namespace {

// Condition number above which an eigenvector basis is treated as singular.
constexpr double kDefectiveCond = 1e10;

std::vector<Index> sorted_order(const CVec& values) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
    return values(a).imag() > values(b).imag();
  });
  return order;
}

void fix_signs(CMat& vectors, const CVec& ref) {
  for (Index i = 0; i < vectors.cols(); ++i) {
    const Complex proj = (ref.transpose() * vectors.col(i))(0, 0);
    if (proj.real() < 0.0) vectors.col(i) *= -1.0;
  }
}

Spectrum finish(const CVec& values, const CMat& vectors, bool has_vectors,
                const std::optional<CVec>& ref) {
  const auto order = sorted_order(values);
  Spectrum s;
  s.values.resize(values.size());
  s.has_vectors = has_vectors;
  if (has_vectors) s.vectors.resize(vectors.rows(), vectors.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s.values(i) = values(order[i]);
    if (has_vectors) s.vectors.col(i) = vectors.col(order[i]).normalized();
  }
  if (has_vectors && ref) fix_signs(s.vectors, *ref);
  return s;
}

bool singular_basis(const CMat& v) {
  if (v.size() == 0) return false;
  Eigen::JacobiSVD<CMat> svd(v);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return !(smin > 0.0) || sv(0) / smin > kDefectiveCond;
}

void check_square(Index rows, Index cols) {
  if (rows != cols) throw Error(ErrorKind::kShapeMismatch, "eigensolve needs a square matrix");
}

}  // namespace

Spectrum eig_sym(const Mat& h, const std::optional<Vec>& ref_grad) {
  check_square(h.rows(), h.cols());
  if (h.size() > 0) {
    const double scale = 1.0 + h.cwiseAbs().maxCoeff();
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
      throw Error(ErrorKind::kNonSymmetric, "eig_sym: matrix is not symmetric");
    }
  }
  const Mat sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNoConvergence, "eig_sym: solver did not converge");
  }
  std::optional<CVec> ref;
  if (ref_grad) ref = ref_grad->cast<Complex>();
  return finish(solver.eigenvalues().cast<Complex>(), solver.eigenvectors().cast<Complex>(),
                true, ref);
}

Spectrum lanczos_top(const std::function<Vec(const Vec&)>& op, Index dim, Index k,
                     const std::optional<Vec>& ref_grad, Index iterations) {
  if (dim <= 0 || k <= 0 || k > dim) throw Error(ErrorKind::kInvalidArgument, "lanczos_top: bad k");
  const Index m = std::min(dim, iterations > 0 ? iterations : std::max<Index>(3 * k + 30, 60));
  Mat q(dim, m);
  Vec alpha_diag(m), beta(m);
  // Deterministic start with every coordinate populated.
  Vec v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = 1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + 0.5);
  v.normalize();
  Index steps = 0;
  for (Index j = 0; j < m; ++j) {
    q.col(j) = v;
    Vec w = op(v);
    alpha_diag(j) = v.dot(w);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
    steps = j + 1;
    beta(j) = w.norm();
    if (beta(j) < 1e-12 * (1.0 + std::abs(alpha_diag(j)))) break;
    v = w / beta(j);
  }
  Mat t = Mat::Zero(steps, steps);
  for (Index j = 0; j < steps; ++j) {
    t(j, j) = alpha_diag(j);
    if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(t);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNoConvergence, "lanczos_top: tridiagonal solve failed");
  }
  const Index kk = std::min(k, steps);
  CVec values(kk);
  CMat vectors(dim, kk);
  for (Index i = 0; i < kk; ++i) {
    const Index src = steps - 1 - i;  // ascending order from the solver
    values(i) = solver.eigenvalues()(src);
    vectors.col(i) = (q.leftCols(steps) * solver.eigenvectors().col(src)).cast<Complex>();
  }
  std::optional<CVec> ref;
  if (ref_grad) ref = ref_grad->cast<Complex>();
  return finish(values, vectors, true, ref);
}

Spectrum eig_general(const Mat& j, bool require_vectors, const std::optional<CVec>& ref_grad) {
  check_square(j.rows(), j.cols());
  Eigen::EigenSolver<Mat> solver(j, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNoConvergence, "eig_general: solver did not converge");
  }
  const CMat vectors = solver.eigenvectors();
  const bool defective = singular_basis(vectors);
  if (defective && require_vectors) {
    throw Error(ErrorKind::kDefective, "eig_general: matrix is not diagonalizable");
  }
  return finish(solver.eigenvalues(), vectors, !defective, ref_grad);
}

Spectrum eig_general(const CMat& j, bool require_vectors, const std::optional<CVec>& ref_grad) {
  check_square(j.rows(), j.cols());
  Eigen::ComplexEigenSolver<CMat> solver(j, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNoConvergence, "eig_general: solver did not converge");
  }
  const CMat vectors = solver.eigenvectors();
  const bool defective = singular_basis(vectors);
  if (defective && require_vectors) {
    throw Error(ErrorKind::kDefective, "eig_general: matrix is not diagonalizable");
  }
  return finish(solver.eigenvalues(), vectors, !defective, ref_grad);
}

Vec fd_grad(const Problem& p, const Vec& x, double eps) {
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += eps;
    xm(i) -= eps;
    out(i) = (p.eval(xp) - p.eval(xm)) / (2.0 * eps);
  }
  return out;
}

Vec fd_hvp(const Problem& p, const Vec& x, const Vec& v, double eps) {
  return (p.grad(x + eps * v) - p.grad(x - eps * v)) / (2.0 * eps);
}

Vec fd_third(const Problem& p, const Vec& x, const Vec& v, const Vec& w, double eps) {
  return (p.hvp(x + eps * w, v) - p.hvp(x - eps * w, v)) / (2.0 * eps);
}

}  // namespace driftlab
