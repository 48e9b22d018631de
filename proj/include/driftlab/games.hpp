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


#ifndef DRIFTLAB_GAMES_HPP_
#define DRIFTLAB_GAMES_HPP_

#include <functional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "driftlab/common.hpp"
#include "driftlab/game_problem.hpp"
#include "driftlab/optimizers.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

/// Backward-error corrected fields (f̃, g̃) of the simultaneous or
/// alternating Euler update in cfg.
PlayerState modified_game_field(const GameProblem& game, const Vec& phi, const Vec& theta,
                                const GameStepConfig& cfg);

/// Corrected fields when both players share physical time and the rates υ
/// scale the fields: the step-h update of (υ_φ f, υ_θ g).
PlayerState modified_game_field_same_time(const GameProblem& game, const Vec& phi,
                                          const Vec& theta, double h, double v_phi,
                                          double v_theta, GameMode mode, int m = 1, int k = 1);

/// Leading drift of the two-player RK4 update: zero for equal rates,
/// f + (h/2)(υ_θ − υ_φ)J_θf g and g + (h/2)(υ_φ − υ_θ)J_φg f otherwise.
PlayerState rk4_modified_game_field(const GameProblem& game, const Vec& phi, const Vec& theta,
                                    const GameStepConfig& cfg);

/// Integrates φ̇ = F_φ, θ̇ = F_θ jointly with RK4 and returns φ read at
/// time t_phi and θ read at time t_theta.
using GameField = std::function<PlayerState(const Vec&, const Vec&)>;
PlayerState integrate_game_flow(const GameField& field, const Vec& phi, const Vec& theta,
                                double t_phi, double t_theta, long steps_per_unit_h, double h);

enum class Payoff { kZeroSum, kCommon };

struct ModifiedLosses {
  double e_phi = 0.0;
  double e_theta = 0.0;
};

/// Modified losses at ψ = (φ, θ). Zero-sum: E_φ = −E, E_θ = E; common
/// payoff: both players minimise E. Throws kBadSplit for an invalid split.
ModifiedLosses zero_sum_modified_losses(const Problem& e, Index split, const Vec& psi,
                                        const GameStepConfig& cfg,
                                        Payoff payoff = Payoff::kZeroSum);

/// Gradients (∇_φẼ_φ, ∇_θẼ_θ) of the modified losses.
PlayerState modified_loss_gradients(const Problem& e, Index split, const Vec& psi,
                                    const GameStepConfig& cfg, Payoff payoff = Payoff::kZeroSum);

enum class RegSchemeKind {
  kDDCancelSim,
  kDDCancelAlt,
  kDDCancelAltDiscOnly,
  kSGA,
  kCO,
  kStrengthenSelf,
};

struct RegScheme {
  RegSchemeKind kind = RegSchemeKind::kDDCancelSim;
  double zeta = 0.0;  // SGA(ζ) resolves to c₁ = c₂ = −ζ; CO(ζ) to all four = ζ
};

RegSchemeKind ParseRegScheme(std::string_view name);

/// Weights in E_φ = −E + c₁‖∇_θE‖² + s₁‖∇_φE‖², E_θ = E + c₂‖∇_φE‖² + s₂‖∇_θE‖².
struct RegCoefficients {
  double c1 = 0.0, c2 = 0.0, s1 = 0.0, s2 = 0.0;
};

RegCoefficients resolve(const RegScheme& scheme, double h, double v_phi, double v_theta);

/// Game whose fields are the negative gradients of the regularized losses.
/// The base game must expose its zero-sum loss (kSchemeRequiresZeroSum).
GamePtr regularized_game(const GamePtr& base, const RegCoefficients& coeffs);
GamePtr regularized_game(const GamePtr& base, const RegScheme& scheme, double h, double v_phi,
                         double v_theta);

/// d(θ² + φ²)/dt under the DiracGAN modified simultaneous flow.
double dirac_radius_derivative(double phi, double theta, double h);

struct SgdModifiedLossInput {
  std::vector<ProblemPtr> batches;
  Vec theta;
  Vec theta_ref;
  double h = 0.0;
};

/// E + (nh/4)‖∇E‖² − (h/n)Σ_μ ∇E_μ(θ)ᵀ Σ_{τ<μ} ∇E_τ(θ_ref), with E the
/// batch average.
double sgd_modified_loss(const SgdModifiedLossInput& in);
/// −∇ of the above with θ_ref held fixed.
Vec sgd_modified_flow_field(const SgdModifiedLossInput& in);

nlohmann::json ToJson(const RegCoefficients& c);

}  // namespace driftlab

#endif  // DRIFTLAB_GAMES_HPP_
