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


#ifndef DRIFTLAB_STABILITY_HPP_
#define DRIFTLAB_STABILITY_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "driftlab/common.hpp"
#include "driftlab/flows.hpp"
#include "driftlab/game_problem.hpp"
#include "driftlab/optimizers.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

enum class Regime { kRealStable, kComplexStable, kUnstableComplex };

std::string_view RegimeName(Regime r);

/// hλ ≤ 1 is real stable, 1 < hλ ≤ 2 complex stable, beyond that unstable.
/// `boundary` marks hλ within 1e-12 of 1 or 2.
struct Classification {
  Regime regime = Regime::kRealStable;
  bool boundary = false;
};

Classification classify(double h_lambda);

struct EigenRecord {
  double lambda = 0.0;
  double g_dot_u = 0.0;
  Complex sc;  // NaN at hλ = 1 where the coefficient is singular
  Classification cls;
};

struct StabilityReport {
  double h = 0.0;
  std::vector<EigenRecord> records;
};

/// Full spectrum for dim ≤ 256, otherwise the leading `top_k` directions
/// (default 16).
StabilityReport stability_report(const Problem& problem, const Vec& theta, double h,
                                 std::optional<Index> top_k = std::nullopt);

/// Eigenvalues of the flow's Jacobian at a critical point with Hessian
/// eigenvalues λ*. Only NGF, IGR and PF are defined.
CVec critical_jacobian_eigs(FlowType flow, const Vec& lambda_star, double h);

enum class Verdict { kStable, kUnstable, kInconclusive };

std::string_view VerdictName(Verdict v);

/// Sign of the largest real part with a ±1e-10 dead band.
Verdict exp_stable(const Mat& j);

struct GameJacobianReport {
  Mat j;
  Mat k;
  Mat j_mod;
  CVec spectrum;
  double trace = 0.0;
  double det = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  double equilibrium_residual = 0.0;
};

/// J̃ = J − (h/2)K at an equilibrium (max(‖f‖, ‖g‖) ≤ 1e-8, else
/// kNotEquilibrium) for the simultaneous or alternating update.
GameJacobianReport game_modified_jacobian(const GameProblem& game, const Vec& phi,
                                          const Vec& theta, const GameStepConfig& cfg);

/// Modified Jacobian of the explicitly regularized DiracGAN at the origin.
GameJacobianReport dirac_regularized_jacobian(double h, double v_phi, double v_theta,
                                              double gamma, double zeta, double l_prime_0);

/// (1 − hx)² + (hy)² < 1 for λ = x + iy.
bool linear_game_converges(Complex lambda, double h);
/// The same test rearranged as h < (1/x)·2/(1 + (y/x)²) (false when x ≤ 0).
bool linear_game_converges_h_bound(Complex lambda, double h);

nlohmann::json ToJson(const StabilityReport& report);
nlohmann::json ToJson(const GameJacobianReport& report);

}  // namespace driftlab

#endif  // DRIFTLAB_STABILITY_HPP_
