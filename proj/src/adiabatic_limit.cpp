#include "cqft/adiabatic_limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cqft/errors.hpp"
#include "cqft/grassmann_sign.hpp"
#include "cqft/wick_algebra.hpp"

namespace cqft {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I(0.0, 1.0);

template <int N>
Complex gauss_integrate(const std::function<Complex(double)>& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  Complex sum = 0.0;
  // Boost stores the non-negative abscissae; odd N includes zero at index 0.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      sum += w[i] * f(mid);
    } else {
      sum += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
    }
  }
  return sum * half;
}

Complex radial_then_kappa(const TestData& data, const ScalingFamily& family,
                          const std::function<Complex(double p, double kappa)>& f) {
  const double kmax = family.kappa_max();
  return gauss_integrate<10>(
      [&](double p) {
        const Complex inner =
            gauss_integrate<15>([&](double k) { return family.folded_weight(k) * f(p, k); }, 0.0, kmax);
        return inner;
      },
      data.p_lo, data.p_hi);
}

Complex neville_at_zero(std::span<const double> x, std::span<const Complex> y) {
  std::vector<Complex> p(y.begin(), y.end());
  const std::size_t n = p.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      p[i] = (x[i - k] * p[i] - x[i] * p[i - 1]) / (x[i - k] - x[i]);
      if (i == k) break;
    }
  }
  return p[n - 1];
}

Spinor spin_mixture(const TestData& data, const std::array<double, 3>& p, double m) {
  return data.spin_weights[0] * u_spinor(p, m, 0) + data.spin_weights[1] * u_spinor(p, m, 1);
}

std::array<double, 3> along(const TestData& data, double p) {
  return {p * data.direction[0], p * data.direction[1], p * data.direction[2]};
}

}  // namespace

Profile profile_from_string(const std::string& name) {
  if (name == "gaussian") return Profile::gaussian;
  if (name == "sech") return Profile::sech;
  if (name == "sech2") return Profile::sech2;
  throw ValidationError("unknown profile '" + name + "'");
}

std::string to_string(Profile p) {
  switch (p) {
    case Profile::gaussian: return "gaussian";
    case Profile::sech: return "sech";
    case Profile::sech2: return "sech2";
  }
  return "gaussian";
}

std::vector<double> ScalingFamily::default_schedule() { return geometric(std::pow(2.0, -3), std::pow(2.0, -14), 12); }

std::vector<double> ScalingFamily::geometric(double start, double stop, int steps) {
  if (steps < 1 || !(start > 0) || !(stop > 0)) throw ValidationError("bad eps schedule");
  std::vector<double> out;
  for (int k = 0; k < steps; ++k) {
    out.push_back(steps == 1 ? start : start * std::pow(stop / start, static_cast<double>(k) / (steps - 1)));
  }
  return out;
}

void ScalingFamily::validate() const {
  if (!(width > 0) || !(spatial_width > 0)) throw ValidationError("profile widths must be positive");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] >= 1e-12)) throw ValidationError("eps below the safe minimum");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ValidationError("eps schedule must be strictly decreasing");
  }
}

double ScalingFamily::time_transform(double kappa) const {
  const double w = width;
  switch (profile) {
    case Profile::gaussian: return alpha0 * w * std::sqrt(2 * pi) * std::exp(-0.5 * w * w * kappa * kappa);
    case Profile::sech: return alpha0 * pi * w / std::cosh(0.5 * pi * w * kappa);
    case Profile::sech2: {
      const double x = 0.5 * pi * w * kappa;
      if (std::abs(x) < 1e-8) return alpha0 * 2 * w;
      return alpha0 * pi * w * w * kappa / std::sinh(x);
    }
  }
  return 0.0;
}

double ScalingFamily::folded_weight(double kappa) const { return kappa < 0 ? 0.0 : time_transform(kappa) / pi; }

double ScalingFamily::kappa_max() const {
  switch (profile) {
    case Profile::gaussian: return std::sqrt(2.0 * 30.0) / width;
    case Profile::sech:
    case Profile::sech2: return 2.0 * 32.0 / (pi * width);
  }
  return 10.0;
}

double ScalingFamily::g_hat(const FourVector& q) const {
  const double r2 = q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
  const double ws = spatial_width;
  return time_transform(q[0]) * std::pow(2 * pi, 1.5) * ws * ws * ws * std::exp(-0.5 * ws * ws * r2);
}

double ScalingFamily::g_hat_scaled(const FourVector& p, double eps) const {
  return std::pow(eps, -4) * g_hat({p[0] / eps, p[1] / eps, p[2] / eps, p[3] / eps});
}

Channel channel_from_string(const std::string& name) {
  if (name == "Sigma_into_psi" || name == "sigma_into_psi") return Channel::sigma_into_psi;
  if (name == "Pi_into_A" || name == "pi_into_a") return Channel::pi_into_a;
  if (name == "Pi_into_current" || name == "pi_into_current") return Channel::pi_into_current;
  throw ValidationError("unknown channel '" + name + "'");
}

std::string to_string(Channel c) {
  switch (c) {
    case Channel::sigma_into_psi: return "Sigma_into_psi";
    case Channel::pi_into_a: return "Pi_into_A";
    case Channel::pi_into_current: return "Pi_into_current";
  }
  return "";
}

TestData TestData::standard() {
  TestData d;
  d.xi = [](double p) { return std::exp(-(p - 1.0) * (p - 1.0) / 0.18); };
  d.phi = [](double p) { return 1.0 / (1.0 + p * p); };
  d.chi << Complex(1.0), Complex(0.25), Complex(0.5), Complex(0.0, 0.25);
  return d;
}

TestData TestData::zero() {
  TestData d = standard();
  d.xi = [](double) { return 0.0; };
  return d;
}

Complex smeared_contribution(Channel channel, const GreenFunction& green, const TestData& data,
                             const ScalingFamily& family, double eps) {
  if (!(eps >= 1e-12)) throw ValidationError("eps below the safe minimum");
  if (!data.xi || !data.phi) throw ValidationError("test data incomplete");
  switch (channel) {
    case Channel::sigma_into_psi: {
      if (!green.sigma) throw ValidationError("Sigma_into_psi needs a self energy");
      const SelfEnergy& sig = *green.sigma;
      const double m = sig.m;
      return radial_then_kappa(data, family, [&](double p, double kappa) -> Complex {
        const double amp = 4 * pi * p * p * data.xi(p) * data.phi(p);
        if (amp == 0.0) return 0.0;
        const auto pv = along(data, p);
        const double e = energy(pv, m);
        const CFourVector pe{Complex(e, eps * kappa), pv[0], pv[1], pv[2]};
        const Mat4 num = (Mat4::Identity() * m + slash(pe)) * sig.matrix(pe);
        const Complex proj = data.chi.adjoint() * (num * spin_mixture(data, pv, m));
        return amp * proj / (-I * eps * e);
      });
    }
    case Channel::pi_into_a: {
      if (!green.pi) throw ValidationError("Pi_into_A needs a vacuum polarization");
      const VacuumPolarization& vp = *green.pi;
      return radial_then_kappa(data, family, [&](double p, double kappa) -> Complex {
        const double amp = 4 * pi * p * p * data.xi(p) * data.phi(p);
        if (amp == 0.0) return 0.0;
        const double e = p;
        const Complex z = Complex(-eps * eps * kappa * kappa, 2 * eps * kappa * e);
        return amp * data.spin_weights[0] * (-z * vp.scalar(z)) / (-I * eps * e);
      });
    }
    case Channel::pi_into_current: {
      if (!green.pi) throw ValidationError("Pi_into_current needs a vacuum polarization");
      const VacuumPolarization& vp = *green.pi;
      return radial_then_kappa(data, family, [&](double s, double kappa) -> Complex {
        const double amp = data.xi(s) * data.phi(s);
        if (amp == 0.0) return 0.0;
        const Complex z(s, eps * kappa);
        return amp * data.spin_weights[0] * vp.scalar(z) / z;
      });
    }
  }
  return 0.0;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverged: return "diverged";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

nlohmann::json SweepResult::verdict_json() const {
  nlohmann::json j{{"verdict", to_string(verdict)}, {"fitted_exponent", fitted_exponent}, {"points", values.size()}};
  if (limit_estimate) {
    j["limit"] = {limit_estimate->real(), limit_estimate->imag()};
  } else {
    j["limit"] = nullptr;
  }
  return j;
}

SweepResult classify(std::vector<double> epsilons, std::vector<Complex> values) {
  if (epsilons.size() != values.size()) throw ValidationError("eps and value counts differ");
  SweepResult r;
  r.epsilons = std::move(epsilons);
  r.values = std::move(values);
  const std::size_t n = r.values.size();
  if (n < 4) return r;
  const bool all_zero = std::all_of(r.values.begin(), r.values.end(), [](Complex v) { return v == 0.0; });
  if (all_zero) {
    r.verdict = Verdict::converged;
    r.limit_estimate = 0.0;
    return r;
  }
  const std::size_t start = std::min(n / 2, n - 4);
  std::vector<double> lx, ly;
  for (std::size_t k = start; k < n; ++k) {
    const double a = std::abs(r.values[k]);
    if (a == 0.0) continue;
    lx.push_back(std::log(r.epsilons[k]));
    ly.push_back(std::log(a));
  }
  double slope = 0.0;
  if (lx.size() >= 2) {
    const double cnt = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sx += lx[k];
      sy += ly[k];
      sxx += lx[k] * lx[k];
      sxy += lx[k] * ly[k];
    }
    slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  r.fitted_exponent = slope;

  // A drift keeps stepping the same way by non-negligible amounts.
  double vmax = 0.0;
  for (std::size_t k = start; k < n; ++k) vmax = std::max(vmax, std::abs(r.values[k]));
  std::vector<double> ratios;
  bool drifting = true;
  for (std::size_t k = start; k + 1 < n; ++k) {
    const Complex d0 = r.values[k + 1] - r.values[k];
    if (!(std::abs(d0) > 1e-10 * vmax)) drifting = false;
    if (k + 2 < n) {
      const Complex d1 = r.values[k + 2] - r.values[k + 1];
      if (!((d1 * std::conj(d0)).real() > 0.0)) drifting = false;
      ratios.push_back(std::abs(d0) > 0 ? std::abs(d1) / std::abs(d0) : 0.0);
    }
  }
  std::sort(ratios.begin(), ratios.end());
  const double ratio = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];

  if (slope <= -0.25 || (drifting && ratio >= 0.9)) {
    r.verdict = Verdict::diverged;
  } else if (slope > -0.1 && ratio < 0.9) {
    r.verdict = Verdict::converged;
    std::span<const double> ex(r.epsilons);
    std::span<const Complex> vy(r.values);
    r.limit_estimate = neville_at_zero(ex.last(4), vy.last(4));
  }
  return r;
}

SweepResult sweep(Channel channel, const GreenFunction& green, const TestData& data, const ScalingFamily& family) {
  family.validate();
  std::vector<Complex> values;
  values.reserve(family.epsilons.size());
  for (double eps : family.epsilons) values.push_back(smeared_contribution(channel, green, data, family, eps));
  return classify(family.epsilons, std::move(values));
}

std::optional<Complex> epsilon_free_value(Channel channel, const GreenFunction& green, const TestData& data,
                                          const ScalingFamily& family, double tol) {
  const double mean_kappa =
      gauss_integrate<15>([&](double k) { return Complex(k * family.folded_weight(k)); }, 0.0, family.kappa_max())
          .real();
  switch (channel) {
    case Channel::sigma_into_psi: {
      if (!green.sigma) throw ValidationError("Sigma_into_psi needs a self energy");
      const SelfEnergy& sig = *green.sigma;
      const double m = sig.m;
      if ((sig.m + sig.mu) * (sig.m + sig.mu) <= m * m) return std::nullopt;  // shell sits on the branch point
      if (std::abs(sigma_shell_value(sig)) > tol) return std::nullopt;
      const Complex d = sigma_shell_derivative(sig);
      const Complex base = gauss_integrate<10>(
          [&](double p) -> Complex {
            const auto pv = along(data, p);
            const Complex proj = data.chi.adjoint() * spin_mixture(data, pv, m);
            return 4 * pi * p * p * data.xi(p) * data.phi(p) * proj;
          },
          data.p_lo, data.p_hi);
      return -2.0 * d * mean_kappa * base;
    }
    case Channel::pi_into_a: {
      if (!green.pi) throw ValidationError("Pi_into_A needs a vacuum polarization");
      if (green.pi->m == 0) return std::nullopt;
      const Complex pi0 = green.pi->scalar(0.0);
      const Complex base = gauss_integrate<10>(
          [&](double p) -> Complex { return 4 * pi * p * p * data.xi(p) * data.phi(p); }, data.p_lo, data.p_hi);
      return 2.0 * mean_kappa * pi0 * data.spin_weights[0] * base;
    }
    case Channel::pi_into_current: {
      if (!green.pi) throw ValidationError("Pi_into_current needs a vacuum polarization");
      if (data.p_lo <= 0) return std::nullopt;
      const Complex base = gauss_integrate<10>(
          [&](double s) -> Complex { return data.xi(s) * data.phi(s) * green.pi->scalar(s) / s; }, data.p_lo,
          data.p_hi);
      return family.alpha0 * data.spin_weights[0] * base;
    }
  }
  return std::nullopt;
}

double vacuum_bubble_spectral(double m, double s) {
  const double thr = 4 * m * m;
  if (s <= thr * (1.0 + 1e-12)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double span = s - thr;
  auto f = [&](double u) {
    const double sp = thr + span * u;
    return 3.0 * sp * (pi_imaginary_part(m, sp) / pi) * (span * (1.0 - u)) / (8 * pi * s);
  };
  return span * ts.integrate(f, 0.0, 1.0, 1e-12) / (2 * pi);
}

SweepResult weak_limit_vacuum(int n, const ScalingFamily& family, double m, const std::vector<Complex>& constants) {
  family.validate();
  if (n < 1) throw ValidationError("order must be positive");
  if (n == 1) {
    // First order: the vertex is normal ordered, so its vacuum part is empty.
    const WickPolynomial s1 = qed_vertex(1).scaled(GaussInt::i());
    const Complex v = vacuum_expectation(s1).empty() ? Complex(0.0) : Complex(NAN);
    return classify(family.epsilons, std::vector<Complex>(family.epsilons.size(), v));
  }
  if (n > 2) throw ValidationError("vacuum expectation is evaluated numerically only at order 2");
  if (!(m > 0)) throw ValidationError("vacuum bubble needs m > 0");
  if (constants.size() != 3) throw ValidationError("vacuum bubble takes three constants");

  auto memo = std::make_shared<std::unordered_map<double, double>>();
  SpectralLine line;
  line.density = [m, memo](double s) {
    auto it = memo->find(s);
    if (it != memo->end()) return Complex(0.0, 2.0 * it->second);
    const double v = vacuum_bubble_spectral(m, s);
    memo->emplace(s, v);
    return Complex(0.0, 2.0 * v);
  };
  line.lo = 4 * m * m;
  line.breakpoints = {4 * m * m};

  constexpr int terms = 36;
  std::vector<Complex> taylor;
  for (int k = 0; k < terms; ++k) taylor.push_back(cauchy_moment(line, 0.0, 3 + k));
  const double radius = 4 * m * m;
  // Outside the Taylor disc the transform is evaluated directly, except where
  // the profile weight is below 1e-14 of its peak and the point is dropped.
  auto t_hat = [&](double s, double rel_weight) -> Complex {
    Complex poly = constants[0] + s * (constants[1] + s * constants[2]);
    if (std::abs(s) < 0.5 * radius) {
      Complex acc = 0.0;
      for (int k = terms - 1; k >= 0; --k) acc = acc * s + taylor[k];
      return poly + s * s * s * acc;
    }
    if (rel_weight < 1e-14) return 0.0;
    return poly + cauchy_transform(line, s, 3, 0.0);
  };

  const double q0max = family.kappa_max();
  const double g0 = family.g_hat({0.0, 0.0, 0.0, 0.0});
  const double rmax = std::sqrt(2.0 * 35.0) / family.spatial_width;
  std::vector<Complex> values;
  for (double eps : family.epsilons) {
    const Complex v = gauss_integrate<30>(
        [&](double q0) {
          return gauss_integrate<30>(
              [&](double r) -> Complex {
                const double g = family.g_hat({q0, r, 0.0, 0.0});
                const double rel = (g * g) / (g0 * g0);
                if (rel < 1e-30) return 0.0;
                return 4 * pi * r * r * g * g * t_hat(eps * eps * (q0 * q0 - r * r), rel);
              },
              0.0, rmax);
        },
        0.0, q0max);
    values.push_back(2.0 * v / (std::pow(2 * pi, 4) * std::pow(eps, 4)));
  }
  return classify(family.epsilons, std::move(values));
}

std::vector<DiscreteKernel> product_of_limits(const MomentumGrid& grid, const DiscreteKernel& a, const DiscreteKernel& b) {
  if (a.modes != grid.size() || b.modes != grid.size()) throw ValidationError("kernel does not match the grid");
  if (grid.size() == 0) throw ValidationError("empty grid");
  const Statistics stats = grid.statistics_of(0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid.statistics_of(i) != stats) throw ValidationError("product_of_limits needs a single statistics");
  }
  const bool fermi = stats == Statistics::fermi;
  const int kmax = std::min(a.m, b.l);
  std::vector<DiscreteKernel> out;
  for (int k = 0; k <= kmax; ++k) out.push_back(DiscreteKernel::zero(a.l + b.l - k, a.m + b.m - k, grid.size()));

  // Operator string positions: A creators [0, a.l), A annihilators [a.l, a.l+a.m),
  // B creators next, B annihilators last.
  const int na = a.l + a.m;
  const int total = na + b.l + b.m;
  std::vector<std::uint8_t> fermionic(static_cast<std::size_t>(total), fermi ? 1 : 0);

  std::vector<int> match(static_cast<std::size_t>(a.m), -1);
  std::vector<bool> used(static_cast<std::size_t>(b.l), false);

  auto emit = [&](int k) {
    std::vector<int> perm;
    std::vector<bool> taken(static_cast<std::size_t>(total), false);
    for (int i = 0; i < a.m; ++i) {
      if (match[i] < 0) continue;
      const int pa = a.l + i;
      const int pb = na + match[i];
      perm.push_back(pa);
      perm.push_back(pb);
      taken[pa] = taken[pb] = true;
    }
    std::vector<int> cre, ann;
    for (int i = 0; i < a.l; ++i) cre.push_back(i);
    for (int j = 0; j < b.l; ++j) {
      if (!taken[na + j]) cre.push_back(na + j);
    }
    for (int i = 0; i < a.m; ++i) {
      if (!taken[a.l + i]) ann.push_back(a.l + i);
    }
    for (int j = 0; j < b.m; ++j) ann.push_back(na + b.l + j);
    perm.insert(perm.end(), cre.begin(), cre.end());
    perm.insert(perm.end(), ann.begin(), ann.end());
    const double sign = permutation_sign(perm, fermionic);

    DiscreteKernel& target = out[static_cast<std::size_t>(k)];
    std::vector<std::size_t> slots(static_cast<std::size_t>(total));
    std::vector<std::size_t> t(static_cast<std::size_t>(target.l + target.m));
    for (std::size_t fa = 0; fa < a.values.size(); ++fa) {
      const Complex va = a.values[fa];
      if (va == Complex{}) continue;
      const auto ta = a.unflatten(fa);
      for (std::size_t fb = 0; fb < b.values.size(); ++fb) {
        const Complex vb = b.values[fb];
        if (vb == Complex{}) continue;
        const auto tb = b.unflatten(fb);
        double w = 1.0;
        bool ok = true;
        for (int i = 0; i < a.m && ok; ++i) {
          if (match[i] < 0) continue;
          const std::size_t qa = ta[a.l + i];
          if (qa != tb[match[i]]) ok = false;
          w *= grid.weights[qa];
        }
        if (!ok) continue;
        std::copy(ta.begin(), ta.end(), slots.begin());
        std::copy(tb.begin(), tb.end(), slots.begin() + na);
        std::size_t pos = 0;
        for (int c : cre) t[pos++] = slots[c];
        for (int c : ann) t[pos++] = slots[c];
        target.values[target.flatten(t)] += sign * w * va * vb;
      }
    }
  };

  auto rec = [&](auto&& self, int i, int k) -> void {
    if (i == a.m) {
      emit(k);
      return;
    }
    self(self, i + 1, k);
    for (int j = 0; j < b.l; ++j) {
      if (used[j]) continue;
      used[j] = true;
      match[i] = j;
      self(self, i + 1, k + 1);
      match[i] = -1;
      used[j] = false;
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace cqft
