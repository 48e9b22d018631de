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


#include "driftlab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace driftlab {
namespace {

double act(Activation a, double z) {
  switch (a) {
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kElu: return z > 0.0 ? z : std::expm1(z);
    case Activation::kTanh: return std::tanh(z);
    case Activation::kIdentity: return z;
  }
  return z;
}

double act_prime(Activation a, double z) {
  switch (a) {
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kElu: return z > 0.0 ? 1.0 : std::exp(z);
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

double act_second(Activation a, double z) {
  switch (a) {
    case Activation::kElu: return z > 0.0 ? 0.0 : std::exp(z);
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    case Activation::kRelu:
    case Activation::kIdentity: return 0.0;
  }
  return 0.0;
}

Mat apply(const Mat& z, double (*fn)(Activation, double), Activation a) {
  return z.unaryExpr([fn, a](double v) { return fn(a, v); });
}

struct Layers {
  std::vector<Mat> w;
  std::vector<Vec> b;
};

Layers split(const std::vector<Index>& widths, const Vec& params) {
  Layers out;
  Index off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index in = widths[l], o = widths[l + 1];
    out.w.emplace_back(Eigen::Map<const Mat>(params.data() + off, o, in));
    off += in * o;
    out.b.emplace_back(params.segment(off, o));
    off += o;
  }
  return out;
}

// Writes per-layer (dW, db) into the flat layout.
void scatter(const std::vector<Mat>& dw, const std::vector<Vec>& db, Vec& out) {
  Index off = 0;
  for (std::size_t l = 0; l < dw.size(); ++l) {
    out.segment(off, dw[l].size()) = Eigen::Map<const Vec>(dw[l].data(), dw[l].size());
    off += dw[l].size();
    out.segment(off, db[l].size()) = db[l];
    off += db[l].size();
  }
}

// Full-batch pass. With a tangent direction it also propagates the
// forward-mode derivative through the reverse sweep (Pearlmutter's
// R-operator), so `hv` receives the exact Hessian-vector product.
double pass(const MlpSpec& spec, const Vec& params, Vec* grad, const Vec* tangent, Vec* hv) {
  const auto& widths = spec.model.widths;
  const std::size_t layers = widths.size() - 1;
  const Activation a = spec.model.activation;
  const double inv_n = 1.0 / static_cast<double>(spec.inputs.rows());
  const Layers p = split(widths, params);
  const bool rop = tangent != nullptr;
  Layers t;
  if (rop) t = split(widths, *tangent);

  std::vector<Mat> zs(layers), acts(layers), dzs(layers), dacts(layers);
  Mat h = spec.inputs;
  Mat dh = Mat::Zero(h.rows(), h.cols());
  for (std::size_t l = 0; l < layers; ++l) {
    acts[l] = h;
    zs[l] = h * p.w[l].transpose();
    zs[l].rowwise() += p.b[l].transpose();
    if (rop) {
      dacts[l] = dh;
      dzs[l] = dh * p.w[l].transpose() + h * t.w[l].transpose();
      dzs[l].rowwise() += t.b[l].transpose();
    }
    if (l + 1 < layers) {
      h = apply(zs[l], act, a);
      if (rop) dh = apply(zs[l], act_prime, a).cwiseProduct(dzs[l]);
    }
  }

  const Mat& logits = zs[layers - 1];
  const Mat& y = spec.targets;
  double loss = 0.0;
  Mat g, dg;  // ∂loss/∂Z and its tangent
  if (spec.loss == LossKind::kMse) {
    const Mat r = logits - y;
    loss = 0.5 * inv_n * r.squaredNorm();
    g = r * inv_n;
    if (rop) dg = dzs[layers - 1] * inv_n;
  } else {
    Mat prob(logits.rows(), logits.cols());
    for (Index i = 0; i < logits.rows(); ++i) {
      const double mx = logits.row(i).maxCoeff();
      const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
      prob.row(i) = (logits.row(i).array() - lse).exp().matrix();
      for (Index j = 0; j < logits.cols(); ++j) {
        if (y(i, j) != 0.0) loss -= y(i, j) * (logits(i, j) - lse);
      }
    }
    loss *= inv_n;
    g = (prob - y) * inv_n;
    if (rop) {
      const Mat& dz = dzs[layers - 1];
      const Vec mean = prob.cwiseProduct(dz).rowwise().sum();
      dg = prob.cwiseProduct(dz.colwise() - mean) * inv_n;
    }
  }
  if (grad == nullptr) return loss;

  std::vector<Mat> dw(layers), tdw(layers);
  std::vector<Vec> db(layers), tdb(layers);
  for (std::size_t l = layers; l-- > 0;) {
    dw[l] = g.transpose() * acts[l];
    db[l] = g.colwise().sum().transpose();
    if (rop) {
      tdw[l] = dg.transpose() * acts[l] + g.transpose() * dacts[l];
      tdb[l] = dg.colwise().sum().transpose();
    }
    if (l == 0) break;
    const Mat up = g * p.w[l];
    const Mat d1 = apply(zs[l - 1], act_prime, a);
    if (rop) {
      const Mat tup = dg * p.w[l] + g * t.w[l];
      dg = tup.cwiseProduct(d1) + up.cwiseProduct(apply(zs[l - 1], act_second, a)).cwiseProduct(dzs[l - 1]);
    }
    g = up.cwiseProduct(d1);
  }
  grad->resize(params.size());
  scatter(dw, db, *grad);
  if (rop) {
    hv->resize(params.size());
    scatter(tdw, tdb, *hv);
  }
  return loss;
}

}  // namespace

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "elu") return Activation::kElu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity" || name == "linear") return Activation::kIdentity;
  throw Error(ErrorKind::kConfigError, "unknown activation '" + std::string(name) + "'");
}

LossKind ParseLoss(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "cross-entropy" || name == "xent") return LossKind::kCrossEntropy;
  throw Error(ErrorKind::kConfigError, "unknown loss '" + std::string(name) + "'");
}

InitKind ParseInit(std::string_view name) {
  if (name == "standard" || name == "standard_truncated") return InitKind::kStandardTruncated;
  if (name == "glorot") return InitKind::kGlorot;
  if (name == "zero") return InitKind::kZero;
  throw Error(ErrorKind::kConfigError, "unknown init '" + std::string(name) + "'");
}

Mat MlpModel::forward(const Mat& inputs) const {
  if (inputs.cols() != widths.front()) {
    throw Error(ErrorKind::kShapeMismatch, "mlp: input width mismatch");
  }
  Mat h = inputs;
  for (Index l = 0; l < depth(); ++l) {
    Mat z = h * weights[l].transpose();
    z.rowwise() += biases[l].transpose();
    if (l + 1 < depth()) {
      h = apply(z, act, activation);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Mat MlpModel::input_jacobian(const Vec& x) const {
  if (x.size() != widths.front()) {
    throw Error(ErrorKind::kShapeMismatch, "mlp: input width mismatch");
  }
  std::vector<Vec> zs(depth());
  Vec h = x;
  for (Index l = 0; l < depth(); ++l) {
    zs[l] = weights[l] * h + biases[l];
    h = zs[l].unaryExpr([this](double v) { return act(activation, v); });
  }
  // Reverse accumulation: rows of the output Jacobian pulled back layer by layer.
  Mat jac = weights[depth() - 1];
  for (Index l = depth() - 2; l >= 0; --l) {
    const Vec d = zs[l].unaryExpr([this](double v) { return act_prime(activation, v); });
    jac = (jac * d.asDiagonal()) * weights[l];
  }
  return jac;
}

Index ParamCount(const std::vector<Index>& widths) {
  Index total = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) total += widths[i] * widths[i + 1] + widths[i + 1];
  return total;
}

Vec Flatten(const MlpModel& model) {
  Vec out(ParamCount(model.widths));
  Index off = 0;
  for (Index l = 0; l < model.depth(); ++l) {
    const Mat& w = model.weights[l];
    out.segment(off, w.size()) = Eigen::Map<const Vec>(w.data(), w.size());
    off += w.size();
    out.segment(off, model.biases[l].size()) = model.biases[l];
    off += model.biases[l].size();
  }
  return out;
}

MlpModel Unflatten(const std::vector<Index>& widths, Activation act_kind, const Vec& params) {
  if (widths.size() < 2 || params.size() != ParamCount(widths)) {
    throw Error(ErrorKind::kShapeMismatch, "mlp: parameter vector does not match widths");
  }
  MlpModel m;
  m.widths = widths;
  m.activation = act_kind;
  Index off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index in = widths[l], out = widths[l + 1];
    m.weights.push_back(Eigen::Map<const Mat>(params.data() + off, out, in));
    off += in * out;
    m.biases.push_back(params.segment(off, out));
    off += out;
  }
  return m;
}

MlpModel InitModel(const std::vector<Index>& widths, Activation act_kind, InitKind init,
                   std::uint64_t seed) {
  if (widths.size() < 2) throw Error(ErrorKind::kShapeMismatch, "mlp: need at least two widths");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MlpModel m;
  m.widths = widths;
  m.activation = act_kind;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index in = widths[l], out = widths[l + 1];
    Mat w = Mat::Zero(out, in);
    if (init == InitKind::kStandardTruncated) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(in));
      for (Index i = 0; i < w.size(); ++i) {
        double s;
        do { s = normal(rng); } while (std::abs(s) > 2.0);
        w.data()[i] = scale * s;
      }
    } else if (init == InitKind::kGlorot) {
      const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
      std::uniform_real_distribution<double> uni(-limit, limit);
      for (Index i = 0; i < w.size(); ++i) w.data()[i] = uni(rng);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vec::Zero(out));
  }
  return m;
}

Dataset GaussianBlobs(Index n_per_class, Index n_classes, Index dim, double spread,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat centres(n_classes, dim);
  for (Index i = 0; i < centres.size(); ++i) centres.data()[i] = normal(rng);
  Dataset ds{Mat(n_per_class * n_classes, dim), Mat::Zero(n_per_class * n_classes, n_classes)};
  for (Index c = 0; c < n_classes; ++c) {
    for (Index i = 0; i < n_per_class; ++i) {
      const Index row = c * n_per_class + i;
      for (Index j = 0; j < dim; ++j) ds.inputs(row, j) = centres(c, j) + spread * normal(rng);
      ds.targets(row, c) = 1.0;
    }
  }
  return ds;
}

MlpProblem::MlpProblem(MlpSpec spec) : spec_(std::move(spec)), dim_(ParamCount(spec_.model.widths)) {
  const auto& w = spec_.model.widths;
  if (w.size() < 2 || spec_.inputs.cols() != w.front() || spec_.targets.cols() != w.back() ||
      spec_.inputs.rows() != spec_.targets.rows() || spec_.inputs.rows() == 0 ||
      static_cast<Index>(spec_.model.weights.size()) != static_cast<Index>(w.size()) - 1) {
    throw Error(ErrorKind::kShapeMismatch, "mlp: widths, weights and dataset disagree");
  }
}

MlpModel MlpProblem::model_at(const Vec& params) const {
  check_dim(params.size(), "parameters");
  return Unflatten(spec_.model.widths, spec_.model.activation, params);
}

double MlpProblem::eval(const Vec& x) const {
  check_dim(x.size(), "parameters");
  return pass(spec_, x, nullptr, nullptr, nullptr);
}

Vec MlpProblem::grad(const Vec& x) const {
  check_dim(x.size(), "parameters");
  Vec g;
  pass(spec_, x, &g, nullptr, nullptr);
  return g;
}

Vec MlpProblem::hvp(const Vec& x, const Vec& v) const {
  check_dim(x.size(), "parameters");
  check_dim(v.size(), "direction");
  Vec g, hv;
  pass(spec_, x, &g, &v, &hv);
  return hv;
}

Mat MlpProblem::hess(const Vec& x) const {
  Mat h(dim_, dim_);
  for (Index i = 0; i < dim_; ++i) h.col(i) = hvp(x, Vec::Unit(dim_, i));
  return 0.5 * (h + h.transpose());
}

Vec MlpProblem::third(const Vec& x, const Vec& v, const Vec& w) const {
  const double eps = 1e-4 * (1.0 + x.cwiseAbs().maxCoeff());
  return (hvp(x + eps * w, v) - hvp(x - eps * w, v)) / (2.0 * eps);
}

MlpProblemPtr mlp_new(MlpSpec spec) { return std::make_shared<MlpProblem>(std::move(spec)); }

}  // namespace driftlab
