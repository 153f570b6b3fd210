#include "cqft/qed_second_order.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "cqft/errors.hpp"

namespace cqft {

namespace {

constexpr double pi = std::numbers::pi;

// Two-point Gauss-Legendre in cos(theta) and two azimuths integrate the
// (at most linear in the loop direction) traces exactly.
struct AngularNode {
  std::array<double, 3> n;
  double weight;  // sums to 4 pi
};

const std::array<AngularNode, 4>& angular_nodes() {
  static const std::array<AngularNode, 4> nodes = [] {
    std::array<AngularNode, 4> out{};
    const double c = 1.0 / std::sqrt(3.0);
    const double s = std::sqrt(1.0 - c * c);
    int k = 0;
    for (double ct : {-c, c}) {
      for (double phi : {0.0, pi}) {
        out[k++] = {{s * std::cos(phi), s * std::sin(phi), ct}, pi};
      }
    }
    return out;
  }();
  return nodes;
}

// sqrt of the Kallen function divided by 2 sqrt(s): CM momentum.
double cm_momentum(double s, double m1, double m2) {
  const double l = (s - (m1 + m2) * (m1 + m2)) * (s - (m1 - m2) * (m1 - m2));
  return l > 0 ? std::sqrt(l) / (2.0 * std::sqrt(s)) : 0.0;
}

Complex richardson_zero(std::vector<double> h, std::vector<Complex> f) {
  // Neville extrapolation to h = 0.
  const std::size_t n = h.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      f[i] = (h[i - k] * f[i] - h[i] * f[i - 1]) / (h[i - k] - h[i]);
      if (i == k) break;
    }
  }
  return f[n - 1];
}

double five_point_derivative(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace

double pi_imaginary_part(double m, double s) {
  if (m < 0) throw ValidationError("mass must be nonnegative");
  if (s <= 4 * m * m || s <= 0) return 0.0;
  const double rs = std::sqrt(s);
  const double k = cm_momentum(s, m, m);
  const double e = rs / 2;
  const Mat4 id = Mat4::Identity();
  double contracted = 0.0;
  for (const auto& node : angular_nodes()) {
    const FourVector k1{e, k * node.n[0], k * node.n[1], k * node.n[2]};
    const FourVector k2{e, -k * node.n[0], -k * node.n[1], -k * node.n[2]};
    const Mat4 f1 = slash(k1) + m * id;
    const Mat4 f2 = slash(k2) - m * id;
    Complex tr = 0.0;
    for (int mu = 0; mu < 4; ++mu) tr += metric(mu) * (gamma(mu) * f1 * gamma(mu) * f2).trace();
    // dPhi_2 = |k| / (16 pi^2 sqrt(s)) dOmega
    contracted += node.weight * tr.real() * k / (16 * pi * pi * rs);
  }
  // Im Pi^{mu nu} = 1/2 \int dPhi Tr[...]; Pi = -g_{mu nu} Pi^{mu nu} / (3 s).
  return -0.5 * contracted / (3.0 * s);
}

SigmaImaginaryPart sigma_imaginary_part(double m, double mu, double s) {
  if (m < 0 || mu < 0) throw ValidationError("masses must be nonnegative");
  if (s <= (m + mu) * (m + mu) || s <= 0) return {};
  const double rs = std::sqrt(s);
  const double k = cm_momentum(s, m, mu);
  const double ek = (s + m * m - mu * mu) / (2 * rs);
  const FourVector p{rs, 0, 0, 0};
  const Mat4 id = Mat4::Identity();
  Mat4 acc = Mat4::Zero();
  for (const auto& node : angular_nodes()) {
    const FourVector kv{ek, k * node.n[0], k * node.n[1], k * node.n[2]};
    const Mat4 f = slash(kv) + m * id;
    Mat4 sum = Mat4::Zero();
    for (int nu = 0; nu < 4; ++nu) sum -= metric(nu) * gamma(nu) * f * gamma(nu);
    acc += node.weight * k / (16 * pi * pi * rs) * sum;
  }
  acc *= 0.5;
  return {acc.trace().real() / 4.0, (slash(p) * acc).trace().real() / (4.0 * s)};
}

CausalDistribution vacuum_polarization_distribution(double m) {
  CausalDistribution d;
  d.name = "vacuum_polarization";
  d.masses = {m};
  d.omega = 2;
  d.support = SupportTag::causal;
  d.line = [m](double s) { return Complex(0.0, 2.0 * pi_imaginary_part(m, s)); };
  d.momentum = [m](const FourVector& p) {
    const double s = dot(p, p);
    return s * Complex(0.0, 2.0 * pi_imaginary_part(m, s));
  };
  d.breakpoints = {4 * m * m};
  d.support_lo = 4 * m * m;
  return d;
}

CausalDistribution self_energy_distribution(double m, double mu, bool b_component) {
  CausalDistribution d;
  d.name = b_component ? "self_energy_b" : "self_energy_a";
  d.masses = {m, mu};
  d.omega = 1;
  d.support = SupportTag::causal;
  d.line = [m, mu, b_component](double s) {
    const auto im = sigma_imaginary_part(m, mu, s);
    return Complex(0.0, 2.0 * (b_component ? im.b : im.a));
  };
  d.breakpoints = {(m + mu) * (m + mu)};
  d.support_lo = (m + mu) * (m + mu);
  return d;
}

SplitSpec on_shell_pi_spec(double c0, double c1) { return {1, {c0, c1}, SubtractionPoint::at_zero()}; }

SplitSpec on_shell_sigma_spec(double m, double c0, double c1) {
  return {1, {c0, c1}, SubtractionPoint::mass_shell(m)};
}

Complex VacuumPolarization::scalar(Complex s) const { return parts.retarded.at(s); }

Mat4 VacuumPolarization::tensor(const FourVector& p) const {
  const double p2 = dot(p, p);
  const Complex v = scalar(p2);
  Mat4 t;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) t(a, b) = (p[a] * p[b] - (a == b ? metric(a) : 0.0) * p2) * v;
  }
  return t;
}

VacuumPolarization build_vacuum_polarization(double m, const SplitSpec& normalization) {
  if (m < 0) throw ValidationError("mass must be nonnegative");
  if (normalization.omega < 0) throw ValidationError("vacuum polarization needs at least one subtraction");
  const double x0 = normalization.subtraction_point ? normalization.subtraction_point->location() : 0.0;
  if (x0 >= 4 * m * m) {
    if (m == 0 && x0 == 0) {
      throw ValidationError("on-shell normalization impossible: the massless spectrum reaches p^2 = 0");
    }
    throw ValidationError("subtraction point must lie below the two-particle threshold");
  }
  VacuumPolarization out;
  out.m = m;
  out.normalization = normalization;
  out.parts = split(vacuum_polarization_distribution(m), normalization);
  return out;
}

Complex SelfEnergy::a(Complex s) const { return a_part.retarded.at(s); }
Complex SelfEnergy::b(Complex s) const { return b_part.retarded.at(s); }

Mat4 SelfEnergy::matrix(const CFourVector& p) const {
  const Complex s = dot(p, p);
  return Mat4::Identity() * a(s) + slash(p) * b(s);
}

SelfEnergy build_self_energy(double m, double mu, const SplitSpec& normalization) {
  if (m < 0 || mu < 0) throw ValidationError("masses must be nonnegative");
  if (normalization.omega != 1) throw ValidationError("self energy is normalized with omega = 1 (two constants)");
  if (!normalization.normalization.empty() && normalization.normalization.size() != 2) {
    throw ValidationError("self energy takes two constants C0, C1");
  }
  const Complex c0 = normalization.normalization.empty() ? 0.0 : normalization.normalization[0];
  const Complex c1 = normalization.normalization.empty() ? 0.0 : normalization.normalization[1];
  const SubtractionPoint sp = normalization.subtraction_point.value_or(SubtractionPoint::mass_shell(m));
  const double x0 = sp.location();
  const double threshold = (m + mu) * (m + mu);

  SelfEnergy out;
  out.m = m;
  out.mu = mu;
  out.normalization = normalization;
  out.normalization.subtraction_point = sp;

  const CausalDistribution da = self_energy_distribution(m, mu, false);
  const CausalDistribution db = self_energy_distribution(m, mu, true);

  Complex a_val = c0 - c1 * m;
  Complex a_der = 0.0;
  Complex b_val = c1;
  Complex b_der = 0.0;
  if (sp.kind == SubtractionPoint::Kind::mass_shell) {
    if (m == 0) throw ValidationError("on-shell normalization impossible for a massless charge");
    if (mu == 0) throw ValidationError("on-shell derivative condition needs a photon mass regulator mu > 0");
    if (std::abs(sp.parameter - m) > 1e-15 * m) throw ValidationError("mass-shell subtraction must use the fermion mass");
    const Complex a1 = cauchy_moment(spectral_line(da), x0, 1);
    const Complex b1 = cauchy_moment(spectral_line(db), x0, 1);
    const Complex shift = 2 * m * a1 + 2 * m * m * b1;
    a_val += m * shift;
    a_der = a1;
    b_val -= shift;
    b_der = b1;
  } else if (x0 >= threshold) {
    throw ValidationError("subtraction point must lie below the fermion-photon threshold");
  }
  out.a_part = split(da, {1, {a_val, a_der}, SubtractionPoint::at(x0)});
  out.b_part = split(db, {1, {b_val, b_der}, SubtractionPoint::at(x0)});
  return out;
}

bool OnShellReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) return false;
  }
  return true;
}

nlohmann::json OnShellReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : conditions) arr.push_back({{"name", c.name}, {"residual", c.residual}, {"pass", c.pass}});
  return {{"conditions", arr}, {"all_pass", all_pass()}};
}

Complex pi_slope_at_zero(const VacuumPolarization& pi) {
  const double h0 = 1e-2 * std::max(1.0, 4 * pi.m * pi.m);
  const Complex at_zero = pi.scalar(0.0);
  std::vector<double> h;
  std::vector<Complex> f;
  for (int k = 0; k < 5; ++k) {
    const double hk = h0 / std::pow(2.0, k);
    h.push_back(hk);
    f.push_back((pi.scalar(-hk) - at_zero) / (-hk));
  }
  return richardson_zero(h, f);
}

OnShellReport check_on_shell(const VacuumPolarization& pi, double tol) {
  OnShellReport r;
  if (pi.m == 0.0) {
    // the massless loop is logarithmic at p2 = 0: neither condition can be evaluated
    const double inf = std::numeric_limits<double>::infinity();
    r.conditions.push_back({"Pi(0)", inf, false});
    r.conditions.push_back({"Pi'(0)", inf, false});
    return r;
  }
  const double v0 = std::abs(pi.scalar(0.0));
  r.conditions.push_back({"Pi(0)", v0, v0 <= tol});
  const double slope = std::abs(pi_slope_at_zero(pi));
  r.conditions.push_back({"Pi'(0)", slope, slope <= tol});
  return r;
}

Complex sigma_shell_value(const SelfEnergy& s) {
  const double m2 = s.m * s.m;
  return s.a(m2) + s.m * s.b(m2);
}

Complex sigma_shell_derivative(const SelfEnergy& s) {
  const double m2 = s.m * s.m;
  const double gap = (s.m + s.mu) * (s.m + s.mu) - m2;
  const double h = gap > 0 ? 1e-2 * gap : 1e-4 * std::max(1.0, m2);
  auto re_a = [&](double x) { return s.a(x).real(); };
  auto im_a = [&](double x) { return s.a(x).imag(); };
  auto re_b = [&](double x) { return s.b(x).real(); };
  auto im_b = [&](double x) { return s.b(x).imag(); };
  const Complex da(five_point_derivative(re_a, m2, h), five_point_derivative(im_a, m2, h));
  const Complex db(five_point_derivative(re_b, m2, h), five_point_derivative(im_b, m2, h));
  return 2 * s.m * da + s.b(m2) + 2 * m2 * db;
}

OnShellReport check_on_shell(const SelfEnergy& sigma, double tol) {
  OnShellReport r;
  const double v = std::abs(sigma_shell_value(sigma));
  r.conditions.push_back({"Sigma u = 0 at p2=m2", v, v <= tol});
  const double d = std::abs(sigma_shell_derivative(sigma));
  r.conditions.push_back({"d Sigma / d pslash = 0 at p2=m2", d, d <= tol});
  return r;
}

}  // namespace cqft
