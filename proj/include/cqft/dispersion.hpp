#pragma once

// Cauchy transforms of densities on the real line, with optional subtractions.
// These carry the retarded part of a causal distribution in its dispersion
// variable:
//   F(z) = (1/2 pi i) \int ((z - x0)/(x' - x0))^n d(x') / (x' - z) dx'.

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace cqft {

using Complex = std::complex<double>;

struct SpectralLine {
  std::function<Complex(double)> density;
  std::vector<double> breakpoints;
  double lo = -std::numeric_limits<double>::infinity();  // density vanishes outside [lo, hi]
  double hi = std::numeric_limits<double>::infinity();
};

struct QuadratureOptions {
  double tolerance = 1e-13;  // target relative tolerance per segment
  double accept = 1e-8;      // error estimate above accept * scale is a failure
};

/// \int_a^b f, split at every breakpoint inside (a, b). Infinite limits allowed.
[[nodiscard]] Complex integrate_segments(const std::function<Complex(double)>& f, double a, double b,
                                         std::span<const double> breakpoints, const QuadratureOptions& opts = {});

/// F(z) as above. Real z gives the boundary value from the upper half-plane.
/// The density must vanish near x0 when n > 0.
[[nodiscard]] Complex cauchy_transform(const SpectralLine& line, Complex z, int subtractions = 0, double x0 = 0.0,
                                       const QuadratureOptions& opts = {});

/// (1/2 pi i) \int d(x') / (x' - x0)^{k+1} dx': the k-th Taylor coefficient at x0
/// of the unsubtracted transform, for x0 outside the support.
[[nodiscard]] Complex cauchy_moment(const SpectralLine& line, double x0, int k, const QuadratureOptions& opts = {});

}  // namespace cqft
