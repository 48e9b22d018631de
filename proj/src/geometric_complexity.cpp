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


#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "driftlab/measures.hpp"

namespace driftlab {

double geometric_complexity(const MlpModel& model, const Mat& inputs) {
  if (inputs.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "GC needs at least one input");
  if (inputs.cols() != model.widths.front()) {
    throw Error(ErrorKind::kShapeMismatch, "GC inputs do not match the model input width");
  }
  double total = 0.0;
  for (Index i = 0; i < inputs.rows(); ++i) {
    total += model.input_jacobian(inputs.row(i).transpose()).squaredNorm();
  }
  return total / static_cast<double>(inputs.rows());
}

double gc_relu_piecewise(const MlpModel& model, const Mat& inputs) {
  if (model.activation != Activation::kRelu) {
    throw Error(ErrorKind::kNotPiecewiseLinear, "piecewise GC needs relu activations");
  }
  if (inputs.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "GC needs at least one input");
  if (inputs.cols() != model.widths.front()) {
    throw Error(ErrorKind::kShapeMismatch, "GC inputs do not match the model input width");
  }
  // Activation pattern of every hidden unit, keyed for counting.
  std::map<std::vector<bool>, Index> counts;
  for (Index i = 0; i < inputs.rows(); ++i) {
    std::vector<bool> pattern;
    Vec h = inputs.row(i).transpose();
    for (Index l = 0; l + 1 < model.depth(); ++l) {
      const Vec z = model.weights[l] * h + model.biases[l];
      for (Index u = 0; u < z.size(); ++u) pattern.push_back(z(u) > 0.0);
      h = z.cwiseMax(0.0);
    }
    ++counts[pattern];
  }
  double total = 0.0;
  for (const auto& [pattern, count] : counts) {
    Mat a = model.weights.front();
    std::size_t bit = 0;
    for (Index l = 0; l + 1 < model.depth(); ++l) {
      for (Index u = 0; u < a.rows(); ++u) {
        if (!pattern[bit++]) a.row(u).setZero();
      }
      a = model.weights[l + 1] * a;
    }
    total += static_cast<double>(count) * a.squaredNorm();
  }
  return total / static_cast<double>(inputs.rows());
}

GcStudy gc_init_depth_study(const GcStudyConfig& cfg) {
  GcStudy study;
  for (Index depth : cfg.depths) {
    std::vector<Index> widths{cfg.input_dim};
    for (Index l = 1; l < depth; ++l) widths.push_back(cfg.width);
    widths.push_back(cfg.output_dim);
    std::vector<double> values;
    for (std::uint64_t seed : cfg.seeds) {
      const MlpModel model = InitModel(widths, cfg.activation, cfg.init, seed);
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
      std::normal_distribution<double> normal(0.0, 1.0);
      Mat inputs(cfg.n_samples, cfg.input_dim);
      for (Index i = 0; i < inputs.size(); ++i) inputs.data()[i] = normal(rng);
      values.push_back(geometric_complexity(model, inputs));
    }
    GcDepthRow row;
    row.depth = depth;
    for (double v : values) row.mean += v / values.size();
    for (double v : values) row.std += (v - row.mean) * (v - row.mean) / values.size();
    row.std = std::sqrt(row.std);
    study.rows.push_back(row);
  }
  study.strictly_decreasing = study.rows.size() >= 2;
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    if (!(study.rows[i].mean < study.rows[i - 1].mean)) study.strictly_decreasing = false;
  }
  return study;
}

}  // namespace driftlab
