#pragma once

// Second-order QED two-point functions built by splitting their causal
// discontinuities in s = p^2. Coupling set to 1.
//
// Vacuum polarization: Pi^{mu nu}(p) = (p^mu p^nu - p^2 g^{mu nu}) Pi(p^2).
// Self energy:         Sigma(p) = a(p^2) + pslash b(p^2).

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqft/causal_distributions.hpp"
#include "cqft/dirac.hpp"
#include "cqft/splitting_engine.hpp"

namespace cqft {

/// Im Pi(s) from the two-body fermion-antifermion phase space.
[[nodiscard]] double pi_imaginary_part(double m, double s);

struct SigmaImaginaryPart {
  double a = 0.0;
  double b = 0.0;
};

/// Im a(s), Im b(s) from the fermion-photon phase space with photon mass mu.
[[nodiscard]] SigmaImaginaryPart sigma_imaginary_part(double m, double mu, double s);

/// Causal distribution of Pi in s: line 2i Im Pi(s); four-momentum form p^2 * line(p^2).
[[nodiscard]] CausalDistribution vacuum_polarization_distribution(double m);
/// Causal distributions of the a and b components in s.
[[nodiscard]] CausalDistribution self_energy_distribution(double m, double mu, bool b_component);

/// On-shell specs. For Pi: two constants at s = 0. For Sigma: mass-shell
/// subtraction with constants entering as C0 + C1 (pslash - m).
[[nodiscard]] SplitSpec on_shell_pi_spec(double c0 = 0.0, double c1 = 0.0);
[[nodiscard]] SplitSpec on_shell_sigma_spec(double m, double c0 = 0.0, double c1 = 0.0);

struct VacuumPolarization {
  double m = 0.0;
  SplitSpec normalization;
  SplitResult parts;

  /// Pi at complex s with Im s >= 0 (real s: boundary value from above).
  [[nodiscard]] Complex scalar(Complex s) const;
  /// Upper-index tensor (p^mu p^nu - p^2 g^{mu nu}) Pi(p^2).
  [[nodiscard]] Mat4 tensor(const FourVector& p) const;
};

/// omega in `normalization` counts powers of s: 1 gives two subtractions.
/// Throws ValidationError for m = 0 with a subtraction at s = 0.
[[nodiscard]] VacuumPolarization build_vacuum_polarization(double m, const SplitSpec& normalization);

struct SelfEnergy {
  double m = 0.0;
  double mu = 0.0;
  SplitSpec normalization;
  SplitResult a_part;
  SplitResult b_part;

  [[nodiscard]] Complex a(Complex s) const;
  [[nodiscard]] Complex b(Complex s) const;
  /// a(p^2) + pslash b(p^2) at complex momentum.
  [[nodiscard]] Mat4 matrix(const CFourVector& p) const;
};

/// Mass-shell subtraction point: (a, b) subtracted at m^2 and corrected so
/// both shell conditions vanish, then shifted by C0 + C1 (pslash - m).
/// Any other subtraction point: plain twice-subtracted (a, b) plus the same shift.
[[nodiscard]] SelfEnergy build_self_energy(double m, double mu, const SplitSpec& normalization);

struct ConditionResult {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct OnShellReport {
  std::vector<ConditionResult> conditions;
  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Pi(0) = 0 and lim (Pi(s) - Pi(0))/s = 0 (Richardson extrapolation from s < 0).
/// For m = 0 both residuals are infinite: the loop is logarithmic at s = 0.
[[nodiscard]] OnShellReport check_on_shell(const VacuumPolarization& pi, double tol = 1e-8);
/// a + m b = 0 and 2m a' + b + 2m^2 b' = 0 at s = m^2, derivatives by finite differences.
[[nodiscard]] OnShellReport check_on_shell(const SelfEnergy& sigma, double tol = 1e-8);

/// Residuals used by check_on_shell, exposed for direct comparison.
[[nodiscard]] Complex sigma_shell_value(const SelfEnergy& sigma);
[[nodiscard]] Complex sigma_shell_derivative(const SelfEnergy& sigma);
[[nodiscard]] Complex pi_slope_at_zero(const VacuumPolarization& pi);

}  // namespace cqft
