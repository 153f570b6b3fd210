#include "cqft/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cqft/errors.hpp"

namespace cqft {

namespace {

const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);

Complex integrate_one(const std::function<Complex(double)>& f, double a, double b, const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  double l1 = 0.0;
  Complex v;
  if (std::isfinite(a) && std::isfinite(b)) {
    // Integrate on [-1, 1] so abscissae never round onto the endpoints.
    const double half = 0.5 * (b - a);
    if (half <= 1e-15 * (std::abs(a) + std::abs(b))) return 0.0;
    const double mid = 0.5 * (a + b);
    v = half * ts.integrate([&](double u) { return f(mid + half * u); }, -1.0, 1.0, opts.tolerance, &err, &l1);
    err *= half;
    l1 *= half;
  } else {
    v = ts.integrate(f, a, b, opts.tolerance, &err, &l1);
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || err > opts.accept * std::max(1.0, l1)) {
    throw NumericError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return v;
}

}  // namespace

Complex integrate_segments(const std::function<Complex(double)>& f, double a, double b, std::span<const double> breakpoints,
                           const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Complex sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate_one(f, cuts[i], cuts[i + 1], opts);
  return sum;
}

Complex cauchy_transform(const SpectralLine& line, Complex z, int n, double x0, const QuadratureOptions& opts) {
  if (n < 0) throw ValidationError("subtraction count must be nonnegative");
  auto weighted = [&](double x) -> Complex {
    if (x < line.lo || x > line.hi) return 0.0;
    const Complex d = line.density(x);
    if (d == 0.0) return 0.0;
    return n == 0 ? d : d * std::pow((z - x0) / (x - x0), n);
  };

  const double xr = z.real();
  const double half = 0.5 * std::max(1.0, std::abs(xr));
  const double wlo = xr - half;
  const double whi = xr + half;
  const Complex fr = weighted(xr);

  std::vector<double> breaks = line.breakpoints;
  breaks.push_back(xr);
  // a tail segment reaching across the origin would hide the structure there from tanh-sinh
  breaks.push_back(0.0);
  breaks.push_back(x0);
  breaks.push_back(line.lo);
  breaks.push_back(line.hi);

  // Inside the window subtract f(xr) so the integrand stays bounded near x' = z.
  auto inner = [&](double x) -> Complex {
    if (Complex(x) == z) return 0.0;
    return (weighted(x) - fr) / (Complex(x) - z);
  };
  Complex sum = integrate_segments(inner, wlo, whi, breaks, opts);
  if (fr != 0.0) {
    const Complex log_term = z.imag() == 0.0 ? Complex(0.0, std::numbers::pi) : std::log((whi - z) / (wlo - z));
    sum += fr * log_term;
  }

  auto outer = [&](double x) { return weighted(x) / (Complex(x) - z); };
  const double left_hi = std::min(wlo, line.hi);
  if (line.lo < left_hi) sum += integrate_segments(outer, line.lo, left_hi, breaks, opts);
  const double right_lo = std::max(whi, line.lo);
  if (right_lo < line.hi) sum += integrate_segments(outer, right_lo, line.hi, breaks, opts);
  return sum / two_pi_i;
}

Complex cauchy_moment(const SpectralLine& line, double x0, int k, const QuadratureOptions& opts) {
  if (k < 0) throw ValidationError("moment order must be nonnegative");
  auto f = [&](double x) -> Complex {
    const Complex d = line.density(x);
    if (d == 0.0) return 0.0;
    return d / std::pow(x - x0, k + 1);
  };
  std::vector<double> breaks = line.breakpoints;
  breaks.push_back(x0);
  return integrate_segments(f, line.lo, line.hi, breaks, opts) / two_pi_i;
}

}  // namespace cqft
