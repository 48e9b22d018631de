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


#ifndef DRIFTLAB_FLOWS_HPP_
#define DRIFTLAB_FLOWS_HPP_

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/calculus.hpp"
#include "driftlab/common.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

enum class FlowType {
  kNGF,
  kIGR,
  kThirdOrder,
  kPF,
  kPFNonPrincipal,
  kPositiveGradient,
  kSignSwapLeading,
};

/// A flow together with the learning rate it models (unused by NGF,
/// PositiveGradient and SignSwapLeading).
struct FlowKind {
  FlowType type = FlowType::kNGF;
  double h = 0.0;

  static FlowKind NGF() { return {FlowType::kNGF, 0.0}; }
  static FlowKind IGR(double h) { return Checked(FlowType::kIGR, h); }
  static FlowKind ThirdOrder(double h) { return Checked(FlowType::kThirdOrder, h); }
  static FlowKind PF(double h) { return Checked(FlowType::kPF, h); }
  static FlowKind PFNonPrincipal(double h) { return Checked(FlowType::kPFNonPrincipal, h); }
  static FlowKind PositiveGradient() { return {FlowType::kPositiveGradient, 0.0}; }
  static FlowKind SignSwapLeading() { return {FlowType::kSignSwapLeading, 0.0}; }

  std::string name() const;

 private:
  static FlowKind Checked(FlowType t, double h);
};

/// Parses "ngf", "igr", "third", "pf", "pf+np", "positive", "signswap".
FlowKind ParseFlow(std::string_view name, double h);

/// Coefficient on (∇E·uᵢ)uᵢ for an eigendirection with hλ = x.
/// PF uses the principal branch of log(1 − x)/x.
Complex alpha(const FlowKind& kind, Complex x);

/// Vector field of the flow at θ (complex states need supports_complex()).
CVec flow_field(const FlowKind& kind, const Problem& problem, const CVec& theta);
CVec flow_field(const FlowKind& kind, const Problem& problem, const Vec& theta);

/// PF field with a fixed eigenbasis and the gradient evaluated at θ.
CVec pf_frozen_field(const Spectrum& spectrum, double h, const CVec& grad);

enum class Scheme { kEuler, kRk4 };

struct IntegratorConfig {
  double delta = 5e-5;
  Scheme scheme = Scheme::kEuler;
  long max_steps = 50'000'000;
  long record_every = 1;
  bool diagnostics = false;     // loss and gradient norm per record
  bool record_lambda0 = false;  // also λ₀ and sc₀ (real states only)
  /// Hold the PF eigenbasis from θ0 over the horizon. Always on for
  /// problems without a complex extension.
  bool frozen_spectrum = false;
};

struct TrajectoryDiagnostics {
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> lambda0;
  std::optional<Complex> sc0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CVec> states;
  std::vector<TrajectoryDiagnostics> diagnostics;

  const CVec& final_state() const { return states.back(); }
  /// Columns: t, re_i/im_i per coordinate, then loss, grad_norm, lambda0
  /// when present.
  void write_csv(std::ostream& out) const;
};

Trajectory integrate(const FlowKind& kind, const Problem& problem, const CVec& theta0,
                     double horizon, const IntegratorConfig& config = {});

/// Fixed-step integration of an arbitrary field, returning the final state.
/// Uses `steps` equal substeps over `horizon`.
template <typename V, typename F>
V integrate_field(F&& field, V x, double horizon, long steps, Scheme scheme) {
  const double dt = horizon / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) {
    if (scheme == Scheme::kEuler) {
      x += dt * field(x);
    } else {
      const V k1 = field(x);
      const V k2 = field(V(x + 0.5 * dt * k1));
      const V k3 = field(V(x + 0.5 * dt * k2));
      const V k4 = field(V(x + dt * k3));
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return x;
}

/// Exact PF solution for E = ½θᵀAθ + bᵀθ at time t.
CVec pf_quadratic_closed_form(const Mat& a, const Vec& b, const Vec& theta0, double t, double h);

/// (∇E·u)(0)·exp(log(1 − hλ)·t/h).
Complex grad_dot_u_prediction(double g_dot_u0, double lambda, double h, double t);

/// CSV number formatting shared by every writer: 17 significant digits.
std::string FormatDouble(double v);

}  // namespace driftlab

#endif  // DRIFTLAB_FLOWS_HPP_
