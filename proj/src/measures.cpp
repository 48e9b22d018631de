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


#include "driftlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "driftlab/optimizers.hpp"

namespace driftlab {

IntegratorConfig DriftIntegrator(double h, long substeps) {
  IntegratorConfig c;
  c.scheme = Scheme::kRk4;
  c.delta = h / static_cast<double>(substeps);
  c.record_every = substeps;
  return c;
}

double per_iteration_drift(const Problem& problem, const Vec& theta, double h,
                           const FlowKind& flow, const IntegratorConfig& config) {
  const Vec gd = gd_step(problem, theta, h);
  const Trajectory traj = integrate(flow, problem, theta.cast<Complex>(), h, config);
  return (traj.final_state() - gd.cast<Complex>()).norm();
}

DriftProxy drift_proxy(const Problem& problem, const Vec& theta) {
  const Vec g = problem.grad(theta);
  DriftProxy p;
  const Vec hg = problem.hvp(theta, g);
  p.hg_norm = hg.norm();
  const double gn = g.norm();
  if (gn >= 1e-12) p.hg_hat_norm = problem.hvp(theta, g / gn).norm();
  return p;
}

double drift_proxy_normalized(const Problem& problem, const Vec& theta) {
  const auto p = drift_proxy(problem, theta);
  if (!p.hg_hat_norm) throw Error(ErrorKind::kZeroGradient, "normalized drift proxy at a critical point");
  return *p.hg_hat_norm;
}

OrderEstimate order_estimate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4) throw Error(ErrorKind::kInvalidArgument, "order fit needs at least 4 pairs");
  OrderEstimate est;
  std::vector<double> lx, ly;
  for (const auto& [h, e] : pairs) {
    if (!(h > 0.0) || !(e > 0.0)) throw Error(ErrorKind::kInvalidArgument, "order fit needs positive pairs");
    est.h.push_back(h);
    est.error.push_back(e);
    lx.push_back(std::log(h));
    ly.push_back(std::log(e));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 1e-300) throw Error(ErrorKind::kDegenerateFit, "all step sizes are equal");
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.r2 = syy <= 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return est;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kShapeMismatch, "spearman needs equal lengths");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void DriftReport::write_csv(std::ostream& out) const {
  out << "iter,drift,hg,hg_hat,grad_norm\n";
  for (std::size_t i = 0; i < drift.size(); ++i) {
    out << i << ',' << FormatDouble(drift[i]) << ',' << FormatDouble(hg[i]) << ','
        << FormatDouble(hg_hat[i]) << ',' << FormatDouble(grad_norm[i]) << "\n";
  }
}

nlohmann::json DriftReport::summary() const {
  const auto mx = drift.empty() ? 0.0 : *std::max_element(drift.begin(), drift.end());
  const double mean = drift.empty() ? 0.0 : std::accumulate(drift.begin(), drift.end(), 0.0) / drift.size();
  return {{"iterations", drift.size()},
          {"drift_mean", mean},
          {"drift_max", mx},
          {"spearman_drift_hg_hat", spearman_drift_hg_hat}};
}

DriftReport gd_drift_report(const Problem& problem, const Vec& theta0, double h, long iters,
                            const FlowKind& flow, const IntegratorConfig& config) {
  DriftReport r;
  Vec x = theta0;
  for (long i = 0; i < iters; ++i) {
    const DriftProxy p = drift_proxy(problem, x);
    r.drift.push_back(per_iteration_drift(problem, x, h, flow, config));
    r.hg.push_back(p.hg_norm);
    r.hg_hat.push_back(p.hg_hat_norm.value_or(0.0));
    r.grad_norm.push_back(problem.grad(x).norm());
    x = gd_step(problem, x, h);
  }
  r.spearman_drift_hg_hat = spearman(r.drift, r.hg_hat);
  return r;
}

}  // namespace driftlab
