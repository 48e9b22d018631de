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

#ifndef DRIFTLAB_COMMON_HPP_
#define DRIFTLAB_COMMON_HPP_

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace driftlab {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class ErrorKind {
  kNonSymmetric,
  kShapeMismatch,
  kBadSplit,
  kNoConvergence,
  kDefective,
  kSingularArgument,
  kComplexUnsupported,
  kNonfinite,
  kZeroGradient,
  kNotEquilibrium,
  kSchemeRequiresZeroSum,
  kDegenerateFit,
  kNotPiecewiseLinear,
  kInvalidArgument,
  kConfigError,
  kUnknownPreset,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure surfaced by the library carries one of the kinds above so
// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline bool IsReal(const CVec& v, double tol = 0.0) {
  return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() <= tol;
}

inline bool AllFinite(const CVec& v) { return v.allFinite(); }

}  // namespace driftlab

#endif  // DRIFTLAB_COMMON_HPP_
