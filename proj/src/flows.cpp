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


#include "driftlab/flows.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace driftlab {
namespace {

constexpr double kSeriesCutoff = 1e-6;
constexpr double kSingularTol = 1e-12;

// log(1 − x) on the principal branch with Im ∈ (−π, π]. A signed zero in the
// imaginary part would otherwise flip the branch for real x > 1.
Complex log_one_minus(Complex x) {
  Complex w = 1.0 - x;
  if (w.imag() == 0.0) w = Complex(w.real(), 0.0);
  if (std::abs(x) < 0.5) {
    // log|1 − x| through log1p keeps full relative accuracy for small x.
    const double re = 0.5 * std::log1p(-2.0 * x.real() + std::norm(x));
    return Complex(re, std::arg(w));
  }
  return std::log(w);
}

Complex pf_alpha(Complex x) {
  if (std::abs(1.0 - x) < kSingularTol) {
    throw Error(ErrorKind::kSingularArgument, "log(1 - h*lambda) at h*lambda = 1");
  }
  if (std::abs(x) < kSeriesCutoff) return -1.0 - x / 2.0 - x * x / 3.0;
  return log_one_minus(x) / x;
}

Complex bilinear(const CVec& a, const CVec& b) { return (a.transpose() * b)(0, 0); }

struct Eigenbasis {
  CVec values;
  CMat vectors;
  CMat inverse;  // rows give the coordinates of a vector in the basis
};

Eigenbasis basis_at(const Problem& p, const CVec& theta, bool real_state) {
  Eigenbasis eb;
  if (real_state) {
    const Vec x = theta.real();
    const Spectrum s = eig_sym(p.hess(x), p.grad(x));
    eb.values = s.values;
    eb.vectors = s.vectors;
    eb.inverse = s.vectors.transpose();
  } else {
    const CMat hc = p.hess_c(theta);
    const Mat hr = hc.real();
    if (hc.imag().cwiseAbs().maxCoeff() == 0.0 && hr.isApprox(hr.transpose(), 1e-12)) {
      // Constant-curvature problems keep a real orthonormal basis.
      const Spectrum s = eig_sym(hr);
      eb.values = s.values;
      eb.vectors = s.vectors;
      eb.inverse = s.vectors.transpose();
      return eb;
    }
    const Spectrum s = eig_general(hc, true, p.grad_c(theta));
    eb.values = s.values;
    eb.vectors = s.vectors;
    eb.inverse = s.vectors.inverse();
  }
  return eb;
}

CVec expand(const Eigenbasis& eb, const CVec& coeffs, const CVec& grad) {
  const CVec proj = eb.inverse * grad;
  return eb.vectors * coeffs.cwiseProduct(proj);
}

}  // namespace

FlowKind FlowKind::Checked(FlowType t, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::kInvalidArgument, "flow learning rate must be positive");
  }
  return {t, h};
}

std::string FlowKind::name() const {
  switch (type) {
    case FlowType::kNGF: return "ngf";
    case FlowType::kIGR: return "igr";
    case FlowType::kThirdOrder: return "third";
    case FlowType::kPF: return "pf";
    case FlowType::kPFNonPrincipal: return "pf+np";
    case FlowType::kPositiveGradient: return "positive";
    case FlowType::kSignSwapLeading: return "signswap";
  }
  return "?";
}

FlowKind ParseFlow(std::string_view name, double h) {
  if (name == "ngf") return FlowKind::NGF();
  if (name == "igr") return FlowKind::IGR(h);
  if (name == "third") return FlowKind::ThirdOrder(h);
  if (name == "pf") return FlowKind::PF(h);
  if (name == "pf+np") return FlowKind::PFNonPrincipal(h);
  if (name == "positive") return FlowKind::PositiveGradient();
  if (name == "signswap") return FlowKind::SignSwapLeading();
  throw Error(ErrorKind::kConfigError, "unknown flow '" + std::string(name) + "'");
}

Complex alpha(const FlowKind& kind, Complex x) {
  switch (kind.type) {
    case FlowType::kNGF: return -1.0;
    case FlowType::kIGR: return -(1.0 + x / 2.0);
    case FlowType::kThirdOrder: return -(1.0 + x / 2.0 + x * x / 3.0);
    case FlowType::kPF:
    case FlowType::kPFNonPrincipal: return pf_alpha(x);
    case FlowType::kPositiveGradient: return 1.0;
    case FlowType::kSignSwapLeading: break;
  }
  throw Error(ErrorKind::kInvalidArgument, "sign-swap flow has no scalar coefficient");
}

CVec pf_frozen_field(const Spectrum& spectrum, double h, const CVec& grad) {
  CVec out = CVec::Zero(grad.size());
  for (Index i = 0; i < spectrum.values.size(); ++i) {
    const CVec u = spectrum.vectors.col(i);
    out += pf_alpha(h * spectrum.values(i)) * bilinear(grad, u) * u;
  }
  return out;
}

CVec flow_field(const FlowKind& kind, const Problem& problem, const Vec& theta) {
  return flow_field(kind, problem, CVec(theta.cast<Complex>()));
}

CVec flow_field(const FlowKind& kind, const Problem& problem, const CVec& theta) {
  const bool real_state = IsReal(theta);
  if (!real_state && !problem.supports_complex()) {
    throw Error(ErrorKind::kComplexUnsupported,
                problem.id() + " cannot be evaluated at complex parameters");
  }
  const double h = kind.h;
  const CVec g = real_state ? CVec(problem.grad(theta.real()).cast<Complex>())
                            : problem.grad_c(theta);
  auto hvp = [&](const CVec& v) -> CVec {
    if (real_state && IsReal(v)) return problem.hvp(theta.real(), v.real()).cast<Complex>();
    return problem.hvp_c(theta, v);
  };
  auto third = [&](const CVec& v, const CVec& w) -> CVec {
    if (real_state && IsReal(v) && IsReal(w)) {
      return problem.third(theta.real(), v.real(), w.real()).cast<Complex>();
    }
    return problem.third_c(theta, v, w);
  };

  switch (kind.type) {
    case FlowType::kNGF: return -g;
    case FlowType::kPositiveGradient: return g;
    case FlowType::kIGR: return -g - (h / 2.0) * hvp(g);
    case FlowType::kThirdOrder: {
      const CVec hg = hvp(g);
      return -g - (h / 2.0) * hg - h * h * (hvp(hg) / 3.0 + third(g, g) / 12.0);
    }
    case FlowType::kPF:
    case FlowType::kPFNonPrincipal: {
      const Eigenbasis eb = basis_at(problem, theta, real_state);
      CVec coeffs(eb.values.size());
      for (Index i = 0; i < coeffs.size(); ++i) coeffs(i) = pf_alpha(h * eb.values(i));
      CVec out = expand(eb, coeffs, g);
      if (kind.type == FlowType::kPFNonPrincipal) out -= (h * h / 12.0) * third(g, g);
      return out;
    }
    case FlowType::kSignSwapLeading: {
      const Eigenbasis eb = basis_at(problem, theta, real_state);
      CVec coeffs = CVec::Constant(eb.values.size(), -1.0);
      if (coeffs.size() > 0) coeffs(0) = 1.0;
      return expand(eb, coeffs, g);
    }
  }
  return g;
}

Trajectory integrate(const FlowKind& kind, const Problem& problem, const CVec& theta0,
                     double horizon, const IntegratorConfig& config) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::kInvalidArgument, "horizon must be positive");
  if (!(config.delta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "substep must be positive");
  if (theta0.size() != problem.dim()) {
    throw Error(ErrorKind::kShapeMismatch, "initial state has the wrong length");
  }
  const long steps = std::max(1L, static_cast<long>(std::ceil(horizon / config.delta - 1e-9)));
  if (steps > config.max_steps) {
    throw Error(ErrorKind::kInvalidArgument, "integration would exceed max_steps");
  }
  const double dt = horizon / static_cast<double>(steps);
  const long every = std::max(1L, config.record_every);

  const bool is_pf = kind.type == FlowType::kPF || kind.type == FlowType::kPFNonPrincipal;
  const bool frozen = is_pf && (config.frozen_spectrum || !problem.supports_complex());
  std::optional<Spectrum> spectrum;
  if (frozen) {
    if (!IsReal(theta0)) {
      throw Error(ErrorKind::kComplexUnsupported, "frozen-spectrum PF needs a real start");
    }
    const Vec x0 = theta0.real();
    spectrum = eig_sym(problem.hess(x0), problem.grad(x0));
  }
  auto field = [&](const CVec& x) -> CVec {
    if (!frozen) return flow_field(kind, problem, x);
    if (!IsReal(x) && !problem.supports_complex()) {
      throw Error(ErrorKind::kComplexUnsupported,
                  problem.id() + " left the real axis under the frozen PF");
    }
    const CVec g = IsReal(x) ? CVec(problem.grad(x.real()).cast<Complex>()) : problem.grad_c(x);
    CVec out = pf_frozen_field(*spectrum, kind.h, g);
    if (kind.type == FlowType::kPFNonPrincipal) {
      out -= (kind.h * kind.h / 12.0) *
             (IsReal(x) ? CVec(problem.third(x.real(), g.real(), g.real()).cast<Complex>())
                        : problem.third_c(x, g, g));
    }
    return out;
  };

  Trajectory traj;
  auto record = [&](double t, const CVec& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    if (!config.diagnostics) return;
    TrajectoryDiagnostics d;
    if (IsReal(x)) {
      const Vec xr = x.real();
      const Vec g = problem.grad(xr);
      d.loss = problem.eval(xr);
      d.grad_norm = g.norm();
      if (config.record_lambda0) {
        const Spectrum s = eig_sym(problem.hess(xr), g);
        const double l0 = s.values(0).real();
        d.lambda0 = l0;
        if (kind.h > 0.0 && std::abs(1.0 - kind.h * l0) >= kSingularTol) {
          d.sc0 = pf_alpha(kind.h * l0) * g.dot(s.vectors.col(0).real());
        }
      }
    } else {
      d.loss = problem.eval_c(x).real();
      d.grad_norm = problem.grad_c(x).norm();
    }
    traj.diagnostics.push_back(d);
  };

  CVec x = theta0;
  record(0.0, x);
  for (long i = 1; i <= steps; ++i) {
    if (config.scheme == Scheme::kEuler) {
      x += dt * field(x);
    } else {
      const CVec k1 = field(x);
      const CVec k2 = field(x + 0.5 * dt * k1);
      const CVec k3 = field(x + 0.5 * dt * k2);
      const CVec k4 = field(x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double t = (i == steps) ? horizon : dt * static_cast<double>(i);
    if (!x.allFinite()) {
      std::ostringstream msg;
      msg << kind.name() << " flow became non-finite at t=" << FormatDouble(t);
      throw Error(ErrorKind::kNonfinite, msg.str());
    }
    if (i % every == 0 || i == steps) record(t, x);
  }
  return traj;
}

void Trajectory::write_csv(std::ostream& out) const {
  const Index dim = states.empty() ? 0 : states.front().size();
  const bool diag = diagnostics.size() == states.size() && !states.empty();
  const bool lam = diag && diagnostics.front().lambda0.has_value();
  out << "t";
  for (Index i = 0; i < dim; ++i) out << ",re_" << i << ",im_" << i;
  if (diag) out << ",loss,grad_norm";
  if (lam) out << ",lambda0";
  out << "\n";
  for (std::size_t r = 0; r < states.size(); ++r) {
    out << FormatDouble(times[r]);
    for (Index i = 0; i < dim; ++i) {
      out << ',' << FormatDouble(states[r](i).real()) << ',' << FormatDouble(states[r](i).imag());
    }
    if (diag) {
      out << ',' << FormatDouble(diagnostics[r].loss) << ',' << FormatDouble(diagnostics[r].grad_norm);
    }
    if (lam) out << ',' << FormatDouble(diagnostics[r].lambda0.value_or(NAN));
    out << "\n";
  }
}

CVec pf_quadratic_closed_form(const Mat& a, const Vec& b, const Vec& theta0, double t, double h) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() != theta0.size()) {
    throw Error(ErrorKind::kShapeMismatch, "closed form: A, b and theta0 disagree");
  }
  if (!(h > 0.0)) throw Error(ErrorKind::kInvalidArgument, "h must be positive");
  const Spectrum s = eig_sym(a);
  const Mat u = s.vectors.real();
  CVec out = CVec::Zero(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    const double x = h * s.values(i).real();
    const Complex al = pf_alpha(x);
    const Complex mu = (std::abs(x) < kSeriesCutoff) ? Complex(-s.values(i).real() * (1.0 + x / 2.0 + x * x / 3.0))
                                                     : log_one_minus(x) / h;
    const Complex z = mu * t;
    // φ₁(z) = (e^z − 1)/z carries the affine part of the per-direction ODE.
    const Complex phi1 = std::abs(z) < 1e-8 ? 1.0 + z / 2.0 + z * z / 6.0 : (std::exp(z) - 1.0) / z;
    const double c0 = u.col(i).dot(theta0), beta = u.col(i).dot(b);
    out += (std::exp(z) * c0 + t * al * phi1 * beta) * u.col(i).cast<Complex>();
  }
  return out;
}

Complex grad_dot_u_prediction(double g_dot_u0, double lambda, double h, double t) {
  if (!(h > 0.0)) throw Error(ErrorKind::kInvalidArgument, "h must be positive");
  const double x = h * lambda;
  if (std::abs(1.0 - x) < kSingularTol) {
    throw Error(ErrorKind::kSingularArgument, "log(1 - h*lambda) at h*lambda = 1");
  }
  return g_dot_u0 * std::exp(log_one_minus(x) * (t / h));
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace driftlab
