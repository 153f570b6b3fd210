#pragma once

// Splitting of causal distributions into retarded and advanced parts in a
// scalar dispersion variable x:
//   ret(x) = (1/2 pi i) \int ((x - x0)/(x' - x0))^n d(x') / (x' - x - i0) dx'
//            + sum_j C_j (x - x0)^j,          n = max(omega + 1, 0),
//   adv(x) = ret(x) - d(x).

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqft/causal_distributions.hpp"
#include "cqft/dispersion.hpp"

namespace cqft {

struct SubtractionPoint {
  enum class Kind { zero, mass_shell, value };
  Kind kind = Kind::zero;
  double parameter = 0.0;  // mass for mass_shell, location for value

  static SubtractionPoint at_zero() { return {Kind::zero, 0.0}; }
  static SubtractionPoint mass_shell(double m) { return {Kind::mass_shell, m}; }
  static SubtractionPoint at(double x) { return {Kind::value, x}; }

  /// Location in the dispersion variable; mass_shell(m) sits at m^2.
  [[nodiscard]] double location() const;
};

struct SplitSpec {
  int omega = -1;
  std::vector<Complex> normalization;  // C_0..C_omega
  std::optional<SubtractionPoint> subtraction_point;
};

struct SplitResult {
  CausalDistribution retarded;
  CausalDistribution advanced;
  int subtractions = 0;
  double x0 = 0.0;
  std::vector<Complex> constants;
  std::vector<std::string> warnings;
};

/// Number of free constants: 0 for omega < 0, omega + 1 otherwise.
[[nodiscard]] int ambiguity_dimension(int omega);

[[nodiscard]] SpectralLine spectral_line(const CausalDistribution& d);

/// Throws ValidationError for non-causal input or missing normalization data.
[[nodiscard]] SplitResult split(const CausalDistribution& d, const SplitSpec& spec, const QuadratureOptions& opts = {});

/// (1/2pi) \int f(k) e^{-ikt} e^{-(k/cutoff)^2} dk by the trapezoid rule with
/// step `dk`; spectrally accurate for |t| < pi/dk.
[[nodiscard]] Complex inverse_fourier_regularized(const std::function<Complex(double)>& f, double t, double cutoff,
                                                  double dk);

struct LatticeSplit {
  std::vector<Complex> retarded;
  std::vector<Complex> advanced;
};

/// Splits samples d_j at t_j = (j - origin) dt by the discrete step function
/// (theta_0 = 1/2), applied as a circular convolution in the DFT domain.
[[nodiscard]] LatticeSplit lattice_split(std::span<const Complex> samples, std::size_t origin);

}  // namespace cqft
