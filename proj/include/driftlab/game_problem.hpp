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


#ifndef DRIFTLAB_GAME_PROBLEM_HPP_
#define DRIFTLAB_GAME_PROBLEM_HPP_

#include <memory>
#include <string>

#include "driftlab/common.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

/// Two-player dynamics φ̇ = f(φ, θ), θ̇ = g(φ, θ) with the four Jacobian
/// blocks. Loss-derived zero-sum games expose their loss E over (φ, θ) and
/// use the convention f = ∇_φ E, g = −∇_θ E.
class GameProblem {
 public:
  virtual ~GameProblem() = default;

  virtual Index dim_phi() const = 0;
  virtual Index dim_theta() const = 0;
  virtual std::string id() const = 0;

  virtual Vec f(const Vec& phi, const Vec& theta) const = 0;
  virtual Vec g(const Vec& phi, const Vec& theta) const = 0;
  virtual Mat jac_phi_f(const Vec& phi, const Vec& theta) const = 0;
  virtual Mat jac_theta_f(const Vec& phi, const Vec& theta) const = 0;
  virtual Mat jac_phi_g(const Vec& phi, const Vec& theta) const = 0;
  virtual Mat jac_theta_g(const Vec& phi, const Vec& theta) const = 0;

  /// The zero-sum loss E over (φ, θ) when the fields derive from one.
  virtual ProblemPtr zero_sum_loss() const { return nullptr; }

  virtual bool supports_complex() const { return false; }
  /// Joint field (f, g) at a complex point ψ = (φ, θ).
  virtual CVec field_c(const CVec& psi) const;

  Index dim() const { return dim_phi() + dim_theta(); }
};

using GamePtr = std::shared_ptr<const GameProblem>;

/// Stacked (f, g) at ψ = (φ, θ).
Vec joint_field(const GameProblem& game, const Vec& psi);
/// [[J_φf, J_θf], [J_φg, J_θg]] at ψ = (φ, θ).
Mat joint_jacobian(const GameProblem& game, const Vec& psi);

/// f = −ε₁φ + θ, g = ε₂θ − φ.
GamePtr linear_game_new(double eps1, double eps2);

/// DiracGAN with the saturating loss: f = l′(θφ)θ, g = −l′(θφ)φ.
GamePtr dirac_gan_new();

/// Zero-sum game from a loss over (φ, θ); φ is the first `split` coordinates.
/// Throws kBadSplit unless 0 < split < E.dim().
GamePtr zero_sum_game_from_loss(ProblemPtr loss, Index split);

}  // namespace driftlab

#endif  // DRIFTLAB_GAME_PROBLEM_HPP_
