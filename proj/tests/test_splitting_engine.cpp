#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "cqft/dispersion.hpp"
#include "cqft/errors.hpp"
#include "cqft/splitting_engine.hpp"
#include "support/oracles.hpp"

using namespace cqft;
using std::numbers::pi;
using oracle::integrate;
using oracle::jump;
using oracle::theta_oracle;

namespace {

// i (x - 1)(3 - x) on [1, 3] and its closed-form transform.
SpectralLine bump() {
  SpectralLine l;
  l.density = [](double x) { return (x > 1 && x < 3) ? Complex(0.0, (x - 1) * (3 - x)) : Complex(0.0); };
  l.breakpoints = {1.0, 3.0};
  l.lo = 1.0;
  l.hi = 3.0;
  return l;
}

Complex bump_transform(Complex z) {
  const Complex p = -(z - 1.0) * (z - 3.0);
  return (p * std::log((3.0 - z) / (1.0 - z)) + 4.0 - 2.0 * z) / (2.0 * pi);
}

}  // namespace

TEST_CASE("ambiguity dimension") {
  CHECK(ambiguity_dimension(-2) == 0);
  CHECK(ambiguity_dimension(-1) == 0);
  CHECK(ambiguity_dimension(0) == 1);
  CHECK(ambiguity_dimension(2) == 3);
}

TEST_CASE("dispersion transform of a bump matches the closed form") {
  const auto line = bump();
  for (Complex z : {Complex(0.5, 0.0), Complex(2.0, 1e-14), Complex(2.5, 0.3), Complex(-4.0, 2.0), Complex(7.0, 1e-14)}) {
    CHECK(std::abs(cauchy_transform(line, z) - bump_transform(z)) < 1e-11);
  }
}

TEST_CASE("moments are Taylor coefficients and subtraction removes them") {
  const auto line = bump();
  const double x0 = 0.0;
  std::vector<Complex> mom;
  for (int k = 0; k < 4; ++k) {
    mom.push_back(cauchy_moment(line, x0, k));
    const double direct = integrate([k](double x) { return (x - 1) * (3 - x) / std::pow(x, k + 1); }, 1.0, 3.0);
    CHECK(std::abs(mom.back() - Complex(direct / (2 * pi), 0.0)) < 1e-13);
  }
  const Complex z(0.05, 0.02);
  Complex taylor = 0.0;
  for (int k = 0; k < 4; ++k) taylor += mom[k] * std::pow(z - x0, k);
  CHECK(std::abs(cauchy_transform(line, z) - taylor) < 1e-6);
  const Complex sub = cauchy_transform(line, {2.2, 0.4}, 2, x0);
  const Complex expected = bump_transform({2.2, 0.4}) - mom[0] - mom[1] * Complex(2.2, 0.4);
  CHECK(std::abs(sub - expected) < 1e-11);
}

TEST_CASE("negative order toy: retarded part is the theta-function cut") {
  const auto d = toy_sign_exponential();
  const auto r = split(d, {d.omega, {}, std::nullopt});
  CHECK(r.warnings.empty());
  for (double k : {-30.0, -5.0, -1.0, -0.2, 0.0, 0.3, 1.0, 4.0, 25.0}) {
    CHECK(std::abs(r.retarded(k) - theta_oracle(k)) < 1e-8);
    CHECK(std::abs(r.retarded(k) - 1.0 / Complex(1.0, -k)) < 1e-12);
  }
}

TEST_CASE("retarded part vanishes at negative times") {
  const auto d = toy_sign_exponential();
  const auto r = split(d, {d.omega, {}, std::nullopt});
  auto ret = [&](double k) { return r.retarded(k); };
  for (double t : {-3.0, -2.0, -1.0}) CHECK(std::abs(inverse_fourier_regularized(ret, t, 20.0, 0.05)) < 1e-8);
  const Complex positive = inverse_fourier_regularized(ret, 1.0, 20.0, 0.05);
  CHECK(std::abs(positive - std::exp(-1.0)) < 5e-3);
}

TEST_CASE("constants below order zero are ignored with a warning") {
  const auto d = toy_double_pole();
  const auto r = split(d, {d.omega, {0.3}, std::nullopt});
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0] == "constants ignored");
  CHECK(std::abs(r.retarded(0.7) - 1.0 / std::pow(Complex(1.0, -0.7), 2)) < 1e-12);
}

TEST_CASE("missing or malformed normalization is rejected") {
  const auto d = toy_gapped_quadratic();
  CHECK_THROWS_AS((void)split(d, {2, {}, std::nullopt}), ValidationError);
  CHECK_THROWS_AS((void)split(d, {2, {1.0, 2.0}, SubtractionPoint::at_zero()}), ValidationError);
  auto bad = d;
  bad.support = SupportTag::none;
  CHECK_THROWS_AS((void)split(bad, {2, {0, 0, 0}, SubtractionPoint::at_zero()}), ValidationError);
  const auto r = split(d, {2, {0, 0, 0}, SubtractionPoint::at_zero()});
  CHECK_THROWS_AS((void)r.retarded.at({0.0, -1.0}), ValidationError);
  CHECK_THROWS_AS((void)r.advanced.at({0.0, 1.0}), ValidationError);
}

TEST_CASE("two normalizations differ by a quadratic polynomial") {
  const auto d = toy_gapped_quadratic();
  const std::vector<Complex> c1{0.1, -0.2, 0.05}, c2{-0.4, 0.3, 0.0};
  const auto r1 = split(d, {2, c1, SubtractionPoint::at_zero()});
  const auto r2 = split(d, {2, c2, SubtractionPoint::at_zero()});
  std::vector<double> xs;
  for (double x = -6.0; x <= 6.0; x += 0.37) xs.push_back(x);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(xs.size()), 3);
  Eigen::VectorXd re(A.rows()), im(A.rows());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = 1.0;
    A(row, 1) = xs[i];
    A(row, 2) = xs[i] * xs[i];
    const Complex diff = r1.retarded(xs[i]) - r2.retarded(xs[i]);
    re(row) = diff.real();
    im(row) = diff.imag();
  }
  const Eigen::VectorXd cr = A.colPivHouseholderQr().solve(re);
  const Eigen::VectorXd ci = A.colPivHouseholderQr().solve(im);
  CHECK((A * cr - re).norm() + (A * ci - im).norm() < 1e-6);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(Complex(cr(j), ci(j)) - (c1[j] - c2[j])) < 1e-9);
}

TEST_CASE("ret - adv reconstructs the input") {
  const auto sign_exp = toy_sign_exponential();
  const auto gapped = toy_gapped_quadratic();
  const auto r1 = split(sign_exp, {sign_exp.omega, {}, std::nullopt});
  const auto r2 = split(gapped, {2, {0.1, 0.0, 0.2}, SubtractionPoint::at_zero()});
  for (double x = -20.0; x <= 20.0; x += 0.5) {
    CHECK(std::abs(jump(r1, x) - sign_exp(x)) <= 1e-8 * std::max(1.0, std::abs(sign_exp(x))));
    CHECK(std::abs(jump(r2, x) - gapped(x)) <= 1e-8 * std::max(1.0, std::abs(gapped(x))));
  }
}

TEST_CASE("splitting preserves the scaling degree") {
  const FourVector dir{1.0, 0.0, 0.0, 0.0};
  const auto sign_exp = toy_sign_exponential();
  const auto gapped = toy_gapped_quadratic();
  const auto r1 = split(sign_exp, {sign_exp.omega, {}, std::nullopt});
  const auto r2 = split(gapped, {2, {0.1, 0.0, 0.2}, SubtractionPoint::at_zero()});
  for (const auto& [d, r] : {std::pair{sign_exp, r1}, std::pair{gapped, r2}}) {
    const double base = scaling_degree_estimate(d, dir).exponent;
    CHECK(std::abs(scaling_degree_estimate(r.retarded, dir).exponent - base) <= 0.2);
    CHECK(std::abs(scaling_degree_estimate(r.advanced, dir).exponent - base) <= 0.2);
  }
}

TEST_CASE("lattice split cuts with the discrete step function") {
  const std::size_t n = 64, origin = 32;
  const double dt = 0.1;
  std::vector<Complex> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) - origin) * dt;
    d[j] = std::copysign(1.0, t) * std::exp(-std::abs(t)) * (t == 0 ? 0.0 : 1.0);
  }
  const auto s = lattice_split(d, origin);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = j > origin ? 1.0 : (j == origin ? 0.5 : 0.0);
    CHECK(std::abs(s.retarded[j] - theta * d[j]) < 1e-12);
    CHECK(std::abs(s.retarded[j] - s.advanced[j] - d[j]) < 1e-12);
  }
}
