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

#include <doctest.h>

#include "driftlab/mlp.hpp"
#include "oracles.hpp"

using namespace driftlab;
using doctest::Approx;

namespace {

MlpSpec RandomSpec(oracle::Gen& gen, std::vector<Index> widths, Activation act, LossKind loss,
                   Index n, std::uint64_t seed) {
  MlpSpec s;
  s.model = InitModel(widths, act, InitKind::kStandardTruncated, seed);
  for (auto& b : s.model.biases) b = 0.3 * gen.vec(b.size());
  s.inputs = gen.mat(n, widths.front());
  s.loss = loss;
  if (loss == LossKind::kMse) {
    s.targets = gen.mat(n, widths.back());
  } else {
    s.targets = Mat::Zero(n, widths.back());
    for (Index i = 0; i < n; ++i) s.targets(i, gen.integer(0, int(widths.back()) - 1)) = 1.0;
  }
  return s;
}

// Loss recomputed from scratch with plain loops.
double ReferenceLoss(const MlpSpec& s, const MlpModel& m) {
  const Mat out = m.forward(s.inputs);
  const double n = static_cast<double>(s.inputs.rows());
  double total = 0.0;
  for (Index i = 0; i < out.rows(); ++i) {
    if (s.loss == LossKind::kMse) {
      total += 0.5 * (out.row(i) - s.targets.row(i)).squaredNorm();
    } else {
      double z = 0.0;
      for (Index k = 0; k < out.cols(); ++k) z += std::exp(out(i, k));
      for (Index k = 0; k < out.cols(); ++k) total -= s.targets(i, k) * (out(i, k) - std::log(z));
    }
  }
  return total / n;
}

}  // namespace

TEST_CASE("parameter count and flatten round trip") {
  CHECK(ParamCount({4, 10, 10, 10, 3}) == 4 * 10 + 10 + 10 * 10 + 10 + 10 * 10 + 10 + 10 * 3 + 3);
  oracle::Gen gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Index> widths;
    const int layers = gen.integer(2, 5);
    for (int i = 0; i < layers; ++i) widths.push_back(gen.integer(1, 7));
    const Vec p = gen.vec(ParamCount(widths));
    const MlpModel m = Unflatten(widths, Activation::kTanh, p);
    CHECK(Flatten(m) == p);
    CHECK(m.depth() == layers - 1);
  }
  CHECK_THROWS_AS(Unflatten({2, 3}, Activation::kRelu, Vec::Zero(5)), Error);
}

TEST_CASE("weights are stored output-major and flattened column-major") {
  const Vec p = Vec::LinSpaced(ParamCount({2, 3}), 0, ParamCount({2, 3}) - 1);
  const MlpModel m = Unflatten({2, 3}, Activation::kIdentity, p);
  CHECK(m.weights[0].rows() == 3);
  CHECK(m.weights[0](1, 0) == 1.0);
  CHECK(m.weights[0](0, 1) == 3.0);
  CHECK(m.biases[0](0) == 6.0);
}

TEST_CASE("zero network with zero targets is a critical point") {
  MlpSpec s;
  s.model = InitModel({3, 4, 2}, Activation::kRelu, InitKind::kZero, 0);
  oracle::Gen gen(2);
  s.inputs = gen.mat(5, 3);
  s.targets = Mat::Zero(5, 2);
  auto p = mlp_new(s);
  const Vec x = Flatten(s.model);
  CHECK(x.norm() == 0.0);
  CHECK(p->eval(x) == 0.0);
  CHECK(p->grad(x).norm() == 0.0);
}

TEST_CASE("linear model with squared error is a quadratic in its weights") {
  oracle::Gen gen(3);
  MlpSpec s = RandomSpec(gen, {3, 2}, Activation::kIdentity, LossKind::kMse, 8, 3);
  auto p = mlp_new(s);
  const Vec a = gen.vec(p->dim()), b = gen.vec(p->dim());
  CHECK(oracle::RelErr(p->hess(a), p->hess(b)) <= 1e-12);
  CHECK(p->third(a, gen.vec(p->dim()), gen.vec(p->dim())).norm() <= 1e-6);
  // Exact second-order Taylor expansion.
  const Vec d = b - a;
  const double taylor = p->eval(a) + p->grad(a).dot(d) + 0.5 * d.dot(p->hess(a) * d);
  CHECK(p->eval(b) == Approx(taylor).epsilon(1e-10));
  // Normal-equations residual: gradient wrt W is (1/N) Σ (Wx + b − y) xᵀ.
  const MlpModel m = p->model_at(a);
  Mat gw = Mat::Zero(2, 3);
  for (Index i = 0; i < 8; ++i) {
    const Vec xi = s.inputs.row(i).transpose();
    gw += (m.weights[0] * xi + m.biases[0] - s.targets.row(i).transpose()) * xi.transpose();
  }
  gw /= 8.0;
  CHECK((p->grad(a).head(6) - Eigen::Map<const Vec>(gw.data(), 6)).norm() <= 1e-12);
}

TEST_CASE("loss values match a direct recomputation") {
  oracle::Gen gen(4);
  for (LossKind loss : {LossKind::kMse, LossKind::kCrossEntropy}) {
    MlpSpec s = RandomSpec(gen, {3, 5, 4}, Activation::kTanh, loss, 7, 4);
    auto p = mlp_new(s);
    const Vec x = Flatten(s.model);
    CHECK(p->eval(x) == Approx(ReferenceLoss(s, s.model)).epsilon(1e-12));
  }
}

TEST_CASE("relu network gradient matches finite differences") {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 5; ++trial) {
    MlpSpec s = RandomSpec(gen, {2, 4, 2}, Activation::kRelu, LossKind::kMse, 10, 10 + trial);
    auto p = mlp_new(s);
    const Vec x = Flatten(s.model);
    const Vec fd = oracle::Gradient([&](const Vec& y) { return p->eval(y); }, x, 1e-5);
    CHECK((p->grad(x) - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("smooth networks: gradient, Hessian-vector product and Hessian") {
  oracle::Gen gen(6);
  for (Activation act : {Activation::kElu, Activation::kTanh}) {
    for (LossKind loss : {LossKind::kMse, LossKind::kCrossEntropy}) {
      MlpSpec s = RandomSpec(gen, {3, 5, 4, 3}, act, loss, 9, 20);
      auto p = mlp_new(s);
      const Vec x = Flatten(s.model) + 0.1 * gen.vec(ParamCount(s.model.widths));
      const Vec v = gen.vec(p->dim());
      auto eval = [&](const Vec& y) { return p->eval(y); };
      auto grad = [&](const Vec& y) { return p->grad(y); };
      CHECK(oracle::RelErr(p->grad(x), oracle::Gradient(eval, x, 1e-5)) <= 1e-7);
      CHECK(oracle::RelErr(p->hvp(x, v), oracle::Directional(grad, x, v, 1e-5)) <= 1e-7);
      const Mat h = p->hess(x);
      CHECK((h - h.transpose()).norm() <= 1e-12 * h.norm());
      CHECK(oracle::RelErr(h * v, p->hvp(x, v)) <= 1e-10);
    }
  }
}

TEST_CASE("third contraction approximates the derivative of hvp") {
  oracle::Gen gen(7);
  MlpSpec s = RandomSpec(gen, {2, 3, 2}, Activation::kTanh, LossKind::kMse, 6, 7);
  auto p = mlp_new(s);
  const Vec x = Flatten(s.model), v = gen.vec(p->dim()), w = gen.vec(p->dim());
  const Vec fd = oracle::Directional([&](const Vec& y) { return p->hvp(y, v); }, x, w, 1e-3);
  CHECK(oracle::RelErr(p->third(x, v, w), fd) <= 1e-5);
}

TEST_CASE("input Jacobian matches finite differences of the forward pass") {
  oracle::Gen gen(8);
  MlpModel m = InitModel({3, 6, 2}, Activation::kElu, InitKind::kGlorot, 1);
  for (auto& b : m.biases) b = gen.vec(b.size());
  const Vec x = gen.vec(3);
  auto fwd = [&](const Vec& y) { return Vec(m.forward(y.transpose()).transpose()); };
  CHECK(oracle::RelErr(m.input_jacobian(x), oracle::Jacobian(fwd, x, 1e-6)) <= 1e-8);
}

TEST_CASE("shape mismatches are rejected") {
  oracle::Gen gen(9);
  MlpSpec s = RandomSpec(gen, {3, 4, 2}, Activation::kRelu, LossKind::kMse, 5, 1);
  MlpSpec bad = s;
  bad.inputs = gen.mat(5, 4);
  CHECK_THROWS_AS(mlp_new(bad), Error);
  bad = s;
  bad.targets = gen.mat(4, 2);
  CHECK_THROWS_AS(mlp_new(bad), Error);
  bad = s;
  bad.targets = gen.mat(5, 3);
  CHECK_THROWS_AS(mlp_new(bad), Error);
  auto p = mlp_new(s);
  CHECK_THROWS_AS(p->eval(Vec::Zero(3)), Error);
}

TEST_CASE("name parsing") {
  CHECK(ParseActivation("elu") == Activation::kElu);
  CHECK(ParseLoss("mse") == LossKind::kMse);
  CHECK(ParseInit("glorot") == InitKind::kGlorot);
  CHECK_THROWS_AS(ParseActivation("swish"), Error);
  CHECK_THROWS_AS(ParseLoss("hinge"), Error);
  CHECK_THROWS_AS(ParseInit("he"), Error);
}

TEST_CASE("initialisation laws") {
  const MlpModel g = InitModel({50, 40}, Activation::kRelu, InitKind::kGlorot, 3);
  const double bound = std::sqrt(6.0 / 90.0);
  CHECK(g.weights[0].cwiseAbs().maxCoeff() <= bound);
  CHECK(g.biases[0].norm() == 0.0);
  const MlpModel t = InitModel({100, 30}, Activation::kRelu, InitKind::kStandardTruncated, 3);
  CHECK(t.weights[0].cwiseAbs().maxCoeff() <= 2.0 / std::sqrt(100.0));
  CHECK(Flatten(InitModel({4, 3}, Activation::kRelu, InitKind::kGlorot, 9)) ==
        Flatten(InitModel({4, 3}, Activation::kRelu, InitKind::kGlorot, 9)));
}

TEST_CASE("gaussian blobs") {
  const Dataset a = GaussianBlobs(5, 3, 4, 0.5, 11), b = GaussianBlobs(5, 3, 4, 0.5, 11);
  CHECK(a.inputs.rows() == 15);
  CHECK(a.inputs.cols() == 4);
  CHECK(a.targets.cols() == 3);
  CHECK(a.inputs == b.inputs);
  CHECK((a.targets.rowwise().sum().array() == 1.0).all());
  CHECK(GaussianBlobs(5, 3, 4, 0.5, 12).inputs != a.inputs);
}
