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


#ifndef DRIFTLAB_MEASURES_HPP_
#define DRIFTLAB_MEASURES_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "driftlab/common.hpp"
#include "driftlab/flows.hpp"
#include "driftlab/mlp.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

/// RK4 with `substeps` equal steps per learning-rate horizon h.
IntegratorConfig DriftIntegrator(double h, long substeps = 64);

/// ‖θ_flow(h) − (θ − h∇E(θ))‖ with the flow started at θ.
double per_iteration_drift(const Problem& problem, const Vec& theta, double h,
                           const FlowKind& flow, const IntegratorConfig& config);

struct DriftProxy {
  double hg_norm = 0.0;
  /// ‖Hĝ‖; absent when ‖∇E‖ < 1e-12.
  std::optional<double> hg_hat_norm;
};

DriftProxy drift_proxy(const Problem& problem, const Vec& theta);
/// ‖Hĝ‖, throwing kZeroGradient when ‖∇E‖ < 1e-12.
double drift_proxy_normalized(const Problem& problem, const Vec& theta);

struct OrderEstimate {
  std::vector<double> h;
  std::vector<double> error;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(error) on log(h). Needs ≥ 4 positive pairs;
/// kDegenerateFit when every h is equal.
OrderEstimate order_estimate(const std::vector<std::pair<double, double>>& pairs);

/// Rank correlation with average ranks for ties; NaN for constant input.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct DriftReport {
  std::vector<double> drift;
  std::vector<double> hg;
  std::vector<double> hg_hat;
  std::vector<double> grad_norm;
  double spearman_drift_hg_hat = 0.0;

  void write_csv(std::ostream& out) const;
  nlohmann::json summary() const;
};

/// Runs `iters` GD steps from θ0 and records, for each step, the drift to
/// the flow started at the pre-step iterate along with the proxies there.
DriftReport gd_drift_report(const Problem& problem, const Vec& theta0, double h, long iters,
                            const FlowKind& flow, const IntegratorConfig& config);

/// Mean over inputs of ‖∂f/∂x‖²_F for the logits f.
double geometric_complexity(const MlpModel& model, const Mat& inputs);

/// Σ_p (n_p/|D|)‖A_p‖²_F over the activation patterns realised by the inputs.
/// Throws kNotPiecewiseLinear unless the activation is relu.
double gc_relu_piecewise(const MlpModel& model, const Mat& inputs);

struct GcStudyConfig {
  Index width = 500;
  std::vector<Index> depths{2, 3, 4, 5, 6};
  InitKind init = InitKind::kStandardTruncated;
  Activation activation = Activation::kRelu;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Index input_dim = 10;
  Index output_dim = 10;
  Index n_samples = 64;
};

struct GcDepthRow {
  Index depth = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct GcStudy {
  std::vector<GcDepthRow> rows;
  bool strictly_decreasing = false;
};

/// GC at initialisation per depth (number of weight layers), averaged over
/// seeds; each seed draws both the weights and standard-normal inputs.
GcStudy gc_init_depth_study(const GcStudyConfig& cfg);

}  // namespace driftlab

#endif  // DRIFTLAB_MEASURES_HPP_
