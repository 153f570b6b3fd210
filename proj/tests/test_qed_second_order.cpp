#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cqft/errors.hpp"
#include "cqft/qed_second_order.hpp"

using namespace cqft;
using std::numbers::pi;

namespace {

FourVector boost_z(const FourVector& k, double rapidity) {
  const double c = std::cosh(rapidity), s = std::sinh(rapidity);
  return {c * k[0] + s * k[3], k[1], k[2], s * k[0] + c * k[3]};
}

// Im Pi(s) = -(1/(3s)) (1/2) \int dPhi_2 g_{mu nu} Tr[gamma^mu (k1 + m) gamma^nu (k2 - m)],
// sampled over random decay directions in randomly boosted frames.
double monte_carlo_pi(double m, double s, int samples) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), phi(0.0, 2 * pi);
  const double e = std::sqrt(s) / 2, kabs = std::sqrt(e * e - m * m);
  const double phase_space = kabs / std::sqrt(s) / (4 * pi);  // beta / (8 pi)
  double acc = 0.0;
  for (int n = 0; n < samples; ++n) {
    const double ct = u(rng), st = std::sqrt(1 - ct * ct), ph = phi(rng), y = u(rng);
    const FourVector k1 = boost_z({e, kabs * st * std::cos(ph), kabs * st * std::sin(ph), kabs * ct}, y);
    const FourVector k2 = boost_z({e, -kabs * st * std::cos(ph), -kabs * st * std::sin(ph), -kabs * ct}, y);
    Complex tr = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
      const Mat4 prod = gamma(mu) * (slash(k1) + m * Mat4::Identity()) * gamma(mu) * (slash(k2) - m * Mat4::Identity());
      tr += metric(mu) * prod.trace();
    }
    acc += tr.real();
  }
  return -(1.0 / (3 * s)) * 0.5 * phase_space * acc / samples;
}

Complex lower(const FourVector& p, const Mat4& t, int nu) {
  Complex sum = 0.0;
  for (int mu = 0; mu < 4; ++mu) sum += metric(mu) * p[mu] * t(mu, nu);
  return sum;
}

}  // namespace

TEST_CASE("absorptive parts vanish below threshold") {
  CHECK(pi_imaginary_part(1.0, 3.99) == 0.0);
  CHECK(pi_imaginary_part(1.0, -2.0) == 0.0);
  const auto sig = sigma_imaginary_part(1.0, 0.1, 1.2);
  CHECK(sig.a == 0.0);
  CHECK(sig.b == 0.0);
}

TEST_CASE("Im Pi above threshold agrees with a Monte-Carlo phase-space trace") {
  const double m = 1.0, s = 8.0;
  const double value = pi_imaginary_part(m, s);
  CHECK(value > 0.0);
  CHECK(std::abs(monte_carlo_pi(m, s, 2000) / value - 1.0) < 1e-4);
  const double beta = std::sqrt(1 - 4 * m * m / s);
  CHECK(value == doctest::Approx((1 + 2 * m * m / s) * beta / (12 * pi)).epsilon(1e-12));
}

TEST_CASE("Im Sigma components have the two-body ratio") {
  const double m = 1.0, mu = 0.1, s = 3.0;
  const auto sig = sigma_imaginary_part(m, mu, s);
  REQUIRE(sig.a != 0.0);
  const double kp = (s + m * m - mu * mu) / 2;
  CHECK(sig.b / sig.a == doctest::Approx(-kp / (2 * m * s)).epsilon(1e-12));
}

TEST_CASE("on-shell vacuum polarization") {
  const auto pi_os = build_vacuum_polarization(1.0, on_shell_pi_spec());
  CHECK(std::abs(pi_os.scalar(0.0)) <= 1e-10);
  CHECK(std::abs(pi_slope_at_zero(pi_os)) <= 1e-8);
  CHECK(check_on_shell(pi_os).all_pass());

  const auto custom = build_vacuum_polarization(1.0, on_shell_pi_spec(1.0, 0.0));
  CHECK(std::abs(custom.scalar(0.0) - 1.0) <= 1e-10);

  const auto shifted = build_vacuum_polarization(1.0, on_shell_pi_spec(0.1, 0.0));
  const auto report = check_on_shell(shifted);
  CHECK(!report.all_pass());
  CHECK(report.conditions[0].residual == doctest::Approx(0.1).epsilon(1e-8));
}

TEST_CASE("massless charge rejects subtraction at zero") {
  CHECK_THROWS_AS((void)build_vacuum_polarization(0.0, on_shell_pi_spec()), ValidationError);
}

TEST_CASE("normalization ambiguity of Pi is exactly C0 + C1 s") {
  const auto a = build_vacuum_polarization(1.0, on_shell_pi_spec(0.0, 0.0));
  const auto b = build_vacuum_polarization(1.0, on_shell_pi_spec(0.3, -0.7));
  for (double s : {-3.0, -0.5, 1.0, 2.5, 5.0, 9.0}) {
    CHECK(std::abs(b.scalar(s) - a.scalar(s) - (0.3 - 0.7 * s)) <= 1e-8);
  }
}

TEST_CASE("gauge invariance: p_mu Pi^{mu nu} = 0 for random p") {
  const auto vp = build_vacuum_polarization(1.0, on_shell_pi_spec());
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const FourVector p{u(rng), u(rng), u(rng), u(rng)};
    const Mat4 t = vp.tensor(p);
    const double scale = std::max(1e-300, t.cwiseAbs().maxCoeff() * (std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]) + std::abs(p[3])));
    for (int nu = 0; nu < 4; ++nu) worst = std::max(worst, std::abs(lower(p, t, nu)) / scale);
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("the cut of the built Pi reproduces its absorptive part") {
  const auto vp = build_vacuum_polarization(1.0, on_shell_pi_spec());
  for (double s : {4.5, 6.0, 10.0, 30.0}) {
    auto im_at = [&](double eta) { return vp.scalar({s, eta}).imag(); };
    const double eta = 1e-4;
    const double extrapolated = 2 * im_at(eta / 2) - im_at(eta);
    CHECK(std::abs(extrapolated / pi_imaginary_part(1.0, s) - 1.0) < 1e-5);
  }
}

TEST_CASE("massless limit: the once-subtracted loop diverges like log m") {
  auto once = [](double m) { return build_vacuum_polarization(m, {0, {0.0}, SubtractionPoint::at_zero()}).scalar(-1.0).real(); };
  const double m1 = 1e-2, m2 = 1e-3;
  const double slope = (once(m2) - once(m1)) / (std::log(m2) - std::log(m1));
  CHECK(slope == doctest::Approx(1.0 / (6 * pi * pi)).epsilon(1e-3));
  // the twice-subtracted on-shell form grows faster than any logarithm
  auto twice = [](double m) { return std::abs(build_vacuum_polarization(m, on_shell_pi_spec()).scalar(-1.0)); };
  CHECK(twice(1e-2) > 50 * twice(1e-1));
}

TEST_CASE("on-shell self-energy satisfies both shell conditions") {
  const double m = 1.0;
  const auto sigma = build_self_energy(m, m / 10, on_shell_sigma_spec(m));
  CHECK(std::abs(sigma_shell_value(sigma)) <= 1e-8);
  CHECK(std::abs(sigma_shell_derivative(sigma)) <= 1e-8);
  CHECK(check_on_shell(sigma).all_pass());
}

TEST_CASE("injected constants reappear as shell residuals") {
  const double m = 1.0;
  const auto sigma = build_self_energy(m, m / 10, on_shell_sigma_spec(m, 0.3, 0.2));
  const auto report = check_on_shell(sigma);
  CHECK(report.conditions[0].residual == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(report.conditions[1].residual == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("subtraction away from the shell fails the shell checks") {
  const auto sigma = build_self_energy(1.0, 0.1, {1, {0.0, 0.0}, SubtractionPoint::at_zero()});
  CHECK(!check_on_shell(sigma).all_pass());
}

TEST_CASE("self-energy scales with the masses") {
  const double m = 1.0, mu = 0.1, lam = 2.0;
  const auto s1 = build_self_energy(m, mu, on_shell_sigma_spec(m));
  const auto s2 = build_self_energy(lam * m, lam * mu, on_shell_sigma_spec(lam * m));
  for (double s : {-2.0, 0.3, 0.9, 2.0, 5.0}) {
    CHECK(std::abs(s2.a(lam * lam * s) - lam * s1.a(s)) <= 1e-8 * std::max(1.0, std::abs(s1.a(s))));
    CHECK(std::abs(s2.b(lam * lam * s) - s1.b(s)) <= 1e-8 * std::max(1.0, std::abs(s1.b(s))));
  }
}

TEST_CASE("self-energy is smooth below threshold") {
  const auto sigma = build_self_energy(1.0, 0.1, on_shell_sigma_spec(1.0));
  const double h = 0.02;
  for (double s = -2.0; s < 1.1; s += 0.25) {
    const Complex second = (sigma.a(s + h) - 2.0 * sigma.a(s) + sigma.a(s - h)) / (h * h);
    CHECK(std::abs(second) < 10.0);
    CHECK(std::abs(sigma.a(s).imag()) < 1e-12);
  }
}

TEST_CASE("self-energy validation") {
  CHECK_THROWS_AS((void)build_self_energy(0.0, 0.1, on_shell_sigma_spec(0.0)), ValidationError);
  CHECK_THROWS_AS((void)build_self_energy(1.0, 0.0, on_shell_sigma_spec(1.0)), ValidationError);
}
