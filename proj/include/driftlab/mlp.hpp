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


#ifndef DRIFTLAB_MLP_HPP_
#define DRIFTLAB_MLP_HPP_

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/problems.hpp"

namespace driftlab {

enum class Activation { kRelu, kElu, kTanh, kIdentity };
enum class LossKind { kMse, kCrossEntropy };
enum class InitKind { kStandardTruncated, kGlorot, kZero };

Activation ParseActivation(std::string_view name);
LossKind ParseLoss(std::string_view name);
InitKind ParseInit(std::string_view name);

/// Fully connected network. weights[l] maps width l to width l+1 and has
/// shape (widths[l+1] × widths[l]). The last layer is affine (logits).
struct MlpModel {
  std::vector<Index> widths;
  Activation activation = Activation::kRelu;
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  Index depth() const { return static_cast<Index>(weights.size()); }
  /// Logits for each row of `inputs`.
  Mat forward(const Mat& inputs) const;
  /// ∂f/∂x at one input, shape (widths.back() × widths.front()).
  Mat input_jacobian(const Vec& x) const;
};

struct MlpSpec {
  MlpModel model;
  Mat inputs;   // one example per row
  Mat targets;  // one example per row; one-hot rows for cross-entropy
  LossKind loss = LossKind::kMse;
};

/// Σ (wᵢ·wᵢ₊₁ + wᵢ₊₁).
Index ParamCount(const std::vector<Index>& widths);

/// Layer by layer: W (column-major) then b.
Vec Flatten(const MlpModel& model);
MlpModel Unflatten(const std::vector<Index>& widths, Activation act, const Vec& params);

MlpModel InitModel(const std::vector<Index>& widths, Activation act, InitKind init,
                   std::uint64_t seed);

/// Isotropic Gaussian blobs with unit-spaced random centres; targets are
/// one-hot class indicators.
struct Dataset {
  Mat inputs;
  Mat targets;
};
Dataset GaussianBlobs(Index n_per_class, Index n_classes, Index dim, double spread,
                      std::uint64_t seed);

class MlpProblem;
using MlpProblemPtr = std::shared_ptr<const MlpProblem>;

/// Full-batch loss over flattened parameters. Gradients are exact (reverse
/// accumulation); Hessian-vector products are exact (forward mode over the
/// reverse pass); third contractions use central differences of hvp.
class MlpProblem final : public Problem {
 public:
  explicit MlpProblem(MlpSpec spec);

  Index dim() const override { return dim_; }
  std::string id() const override { return "mlp"; }

  double eval(const Vec& x) const override;
  Vec grad(const Vec& x) const override;
  Mat hess(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;
  Vec third(const Vec& x, const Vec& v, const Vec& w) const override;

  const MlpSpec& spec() const { return spec_; }
  MlpModel model_at(const Vec& params) const;

 private:
  MlpSpec spec_;
  Index dim_;
};

/// Throws kShapeMismatch when widths and data disagree.
MlpProblemPtr mlp_new(MlpSpec spec);

}  // namespace driftlab

#endif  // DRIFTLAB_MLP_HPP_
