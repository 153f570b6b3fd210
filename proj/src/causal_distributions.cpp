#include "cqft/causal_distributions.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cqft/errors.hpp"

namespace cqft {

std::string to_string(SupportTag tag) {
  switch (tag) {
    case SupportTag::causal: return "causal";
    case SupportTag::retarded: return "retarded";
    case SupportTag::advanced: return "advanced";
    case SupportTag::none: return "none";
  }
  return "none";
}

Complex CausalDistribution::operator()(double x) const {
  if (!line) throw ValidationError("distribution '" + name + "' has no line representation");
  return line(x);
}

Complex CausalDistribution::at(Complex z) const {
  if (z.imag() == 0.0) return (*this)(z.real());
  if (!analytic) throw ValidationError("distribution '" + name + "' has no analytic continuation");
  return analytic(z);
}

int singularity_bound(const ExternalLineSpec& s, Theory theory) {
  const int counts[] = {s.fermion_lines, s.photon_lines, s.derivatives, s.bosons, s.ghosts, s.anti_ghosts, s.ym_derivatives};
  for (int c : counts) {
    if (c < 0) throw ValidationError("external line counts must be nonnegative");
  }
  if (theory == Theory::spinor_qed) {
    return static_cast<int>(std::floor(4.0 - 1.5 * s.fermion_lines - s.photon_lines)) - s.derivatives;
  }
  return 4 - s.bosons - s.ghosts - s.anti_ghosts - s.ym_derivatives;
}

ScalingEstimate scaling_degree_estimate(const CausalDistribution& d, const FourVector& direction, int samples,
                                        double lambda_min, double lambda_max) {
  if (samples < 8) throw ValidationError("scaling_degree_estimate needs at least 8 samples");
  if (!(lambda_min > 0.0 && lambda_max > lambda_min)) throw ValidationError("bad lambda range");
  std::vector<double> xs, ys;
  for (int k = 0; k < samples; ++k) {
    const double lam = lambda_min * std::pow(lambda_max / lambda_min, static_cast<double>(k) / (samples - 1));
    Complex v;
    if (d.momentum) {
      v = d.momentum({lam * direction[0], lam * direction[1], lam * direction[2], lam * direction[3]});
    } else {
      v = d(lam * direction[0]);
    }
    const double a = std::abs(v);
    if (!std::isfinite(a) || a == 0.0) throw NumericError("scaling_degree_estimate: evaluation failed along the ray");
    xs.push_back(std::log(lam));
    ys.push_back(std::log(a));
  }
  const double n = static_cast<double>(samples);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < samples; ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  ScalingEstimate est;
  est.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - est.exponent * sx) / n;
  double res = 0.0;
  for (int k = 0; k < samples; ++k) res = std::max(res, std::abs(ys[k] - icpt - est.exponent * xs[k]));
  est.residual = res;
  // Non-monotone log-values relative to the fitted trend mean the fit is not trustworthy.
  bool monotone = true;
  for (int k = 1; k < samples; ++k) {
    const double step = ys[k] - ys[k - 1];
    if (est.exponent > 0.05 && step < 0) monotone = false;
    if (est.exponent < -0.05 && step > 0) monotone = false;
  }
  est.low_confidence = !monotone || res > 0.1;
  return est;
}

CausalDistribution pauli_jordan(double m) {
  if (m < 0) throw ValidationError("mass must be nonnegative");
  CausalDistribution d;
  d.name = "pauli_jordan";
  d.masses = {m};
  d.omega = -2;
  d.support = SupportTag::causal;
  d.shell = [m](const std::array<double, 3>& p) {
    const double e = energy(p, m);
    const Complex w(0.0, 1.0 / (2.0 * e));
    return std::vector<ShellPoint>{{{e, p[0], p[1], p[2]}, w}, {{-e, p[0], p[1], p[2]}, -w}};
  };
  return d;
}

Complex smear_on_shell_radial(const CausalDistribution& d, const std::function<Complex(double, double)>& f) {
  if (!d.shell) throw ValidationError("distribution '" + d.name + "' is not a shell measure");
  boost::math::quadrature::tanh_sinh<double> ts;
  auto integrand = [&](double r) {
    Complex sum = 0.0;
    for (const auto& pt : d.shell({0.0, 0.0, r})) sum += pt.weight * f(pt.p[0], r);
    return sum * (4.0 * std::numbers::pi * r * r) / std::pow(2.0 * std::numbers::pi, 3);
  };
  double err = 0.0;
  const Complex v = ts.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err);
  if (!(err <= 1e-8 * std::max(1.0, std::abs(v)))) throw NumericError("on-shell smearing did not converge");
  return v;
}

PropagatorKind propagator_kind_from_string(const std::string& name) {
  if (name == "Dret") return PropagatorKind::Dret;
  if (name == "Dadv" || name == "Dav") return PropagatorKind::Dadv;
  if (name == "Sret") return PropagatorKind::Sret;
  if (name == "Sadv" || name == "Sav") return PropagatorKind::Sadv;
  if (name == "Feynman") return PropagatorKind::Feynman;
  throw ValidationError("unknown propagator kind '" + name + "'");
}

Complex scalar_propagator(PropagatorKind kind, double m, const FourVector& p, double eps) {
  if (eps < 0) throw ValidationError("eps must be nonnegative");
  const double gap = m * m - dot(p, p);
  Complex shift;
  switch (kind) {
    case PropagatorKind::Dret:
    case PropagatorKind::Sret: shift = Complex(0.0, -eps * p[0]); break;
    case PropagatorKind::Dadv:
    case PropagatorKind::Sadv: shift = Complex(0.0, eps * p[0]); break;
    case PropagatorKind::Feynman: shift = Complex(0.0, -eps); break;
  }
  const Complex den = gap + shift;
  if (std::abs(den) < 1e-12 * std::max(1.0, m * m)) throw NumericError("propagator evaluated on its pole");
  return 1.0 / den;
}

Mat4 dirac_propagator(PropagatorKind kind, double m, const FourVector& p, double eps) {
  const PropagatorKind scalar = kind == PropagatorKind::Sret   ? PropagatorKind::Dret
                                : kind == PropagatorKind::Sadv ? PropagatorKind::Dadv
                                                               : kind;
  return (Mat4::Identity() * m + slash(p)) * scalar_propagator(scalar, m, p, eps);
}

CausalDistribution toy_sign_exponential() {
  CausalDistribution d;
  d.name = "sign_exponential";
  d.omega = -1;
  d.line = [](double k) { return Complex(0.0, 2.0 * k / (1.0 + k * k)); };
  d.analytic = [](Complex k) { return Complex(0.0, 2.0) * k / (1.0 + k * k); };
  return d;
}

CausalDistribution toy_double_pole() {
  CausalDistribution d;
  d.name = "double_pole";
  d.omega = -2;
  d.line = [](double k) { return Complex(0.0, 4.0 * k / ((1.0 + k * k) * (1.0 + k * k))); };
  d.analytic = [](Complex k) { return Complex(0.0, 4.0) * k / ((1.0 + k * k) * (1.0 + k * k)); };
  return d;
}

CausalDistribution toy_gapped_quadratic() {
  CausalDistribution d;
  d.name = "gapped_quadratic";
  d.omega = 2;
  d.line = [](double k) { return k * k > 1.0 ? Complex(0.0, k * k - 1.0) : Complex(0.0); };
  d.breakpoints = {-1.0, 1.0};
  return d;
}

CausalDistribution distribution_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pauli_jordan") return pauli_jordan(j.value("mass", 1.0));
  if (kind == "sign_exponential") return toy_sign_exponential();
  if (kind == "double_pole") return toy_double_pole();
  if (kind == "gapped_quadratic") return toy_gapped_quadratic();
  throw ValidationError("unknown distribution kind '" + kind + "'");
}

PropagatorSpec propagator_from_json(const nlohmann::json& j) {
  PropagatorSpec s;
  s.kind = propagator_kind_from_string(j.at("kind").get<std::string>());
  s.mass = j.value("mass", 1.0);
  s.eps = j.value("eps", 0.0);
  if (s.mass < 0 || s.eps < 0) throw ValidationError("mass and eps must be nonnegative");
  return s;
}

}  // namespace cqft
