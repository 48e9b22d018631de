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


#ifndef DRIFTLAB_OPTIMIZERS_HPP_
#define DRIFTLAB_OPTIMIZERS_HPP_

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/game_problem.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

Vec gd_step(const Problem& problem, const Vec& theta, double h);

/// v' = βv − h∇E(θ); θ' = θ + v'. Returns (θ', v').
std::pair<Vec, Vec> momentum_step(const Problem& problem, const Vec& theta, const Vec& v,
                                  double h, double beta);

enum class DalProxy { kExactHvp, kFdApprox };

struct DalConfig {
  double p = 1.0;
  double lr_cap = 5.0;
  DalProxy proxy = DalProxy::kExactHvp;

  void validate() const;
};

/// H ĝ at θ, exact or by a forward difference along the gradient.
/// Throws kZeroGradient when ∇E(θ) = 0.
Vec dal_curvature(const Problem& problem, const Vec& theta, DalProxy proxy);

/// min(cap, 2 / ‖Hĝ‖^p).
double dal_lr(const Problem& problem, const Vec& theta, const DalConfig& cfg);
Vec dal_step(const Problem& problem, const Vec& theta, const DalConfig& cfg);
/// v' = βv − c∇E with c = min(cap, 1 / (2‖Hĝ‖^p)); θ' = θ + v'.
std::pair<Vec, Vec> dal_momentum_step(const Problem& problem, const Vec& theta, const Vec& v,
                                      double beta, const DalConfig& cfg);
/// Coordinate-wise rate min(cap, 2 / (|(Hĝ)ᵢ|/√D)^p); coordinates with
/// |(Hĝ)ᵢ| < 1e-12 use the cap.
Vec dal_per_parameter_lr(const Problem& problem, const Vec& theta, const DalConfig& cfg);
Vec dal_per_parameter_step(const Problem& problem, const Vec& theta, const DalConfig& cfg);

/// Sequential GD steps, one per batch loss, in order.
Vec sgd_steps(const std::vector<ProblemPtr>& batches, const Vec& theta, double h);

enum class GameMode { kSimultaneous, kAlternating };

struct GameStepConfig {
  double h = 0.1;
  double v_phi = 1.0;
  double v_theta = 1.0;
  GameMode mode = GameMode::kSimultaneous;
  int m = 1;
  int k = 1;

  void validate() const;
};

using PlayerState = std::pair<Vec, Vec>;  // (φ, θ)

PlayerState game_sim_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                          const GameStepConfig& cfg);
PlayerState game_alt_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                          const GameStepConfig& cfg);
/// Dispatches on cfg.mode.
PlayerState game_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                      const GameStepConfig& cfg);
/// Four-stage Runge-Kutta update in which each player advances with its own
/// rate υh at every stage.
PlayerState game_rk4_step(const GameProblem& game, const Vec& phi, const Vec& theta,
                          const GameStepConfig& cfg);

/// One row of a training log.
struct TrainRow {
  long iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
  std::optional<double> lambda0;
};

void write_train_csv(std::ostream& out, const std::vector<TrainRow>& rows);

}  // namespace driftlab

#endif  // DRIFTLAB_OPTIMIZERS_HPP_
