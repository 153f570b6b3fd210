#pragma once

// Momentum-space causal distributions, on-shell measures, retarded/advanced
// propagators and power counting.
//
// Conventions: metric (+,-,-,-); f^(p) = \int f(x) e^{ipx} d^4x;
// Pauli-Jordan D^_m(p) = 2 pi i sgn(p0) delta(p^2 - m^2), so that
// D^ret - D^adv = D^_m with D^ret/adv = 1/(m^2 - p^2 -/+ i eps p0).

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqft/dirac.hpp"

namespace cqft {

using Complex = std::complex<double>;

enum class SupportTag { causal, retarded, advanced, none };

[[nodiscard]] std::string to_string(SupportTag tag);

/// One point of a mass-shell measure: the pairing with a test function f is
/// \int d^3p/(2pi)^3  sum_k weight_k f(p_k).
struct ShellPoint {
  FourVector p{};
  Complex weight;
};

using ShellRule = std::function<std::vector<ShellPoint>(const std::array<double, 3>&)>;

/// A scalar distribution in momentum space. `line` evaluates it along the
/// dispersion variable (k for one-dimensional models, s = p^2 for the
/// Lorentz-invariant ones); `analytic` optionally continues it off the real
/// line; `momentum` is the full four-momentum form when function-like;
/// `shell` is the sampling rule when it is a mass-shell measure.
struct CausalDistribution {
  std::string name;
  std::function<Complex(double)> line;
  std::function<Complex(Complex)> analytic;
  std::function<Complex(const FourVector&)> momentum;
  ShellRule shell;
  std::vector<double> masses;
  int omega = 0;
  SupportTag support = SupportTag::causal;
  std::vector<double> breakpoints;  // kinks and thresholds of `line`
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();

  [[nodiscard]] Complex operator()(double x) const;
  [[nodiscard]] Complex at(Complex z) const;
};

enum class Theory { spinor_qed, yang_mills };

struct ExternalLineSpec {
  int fermion_lines = 0;
  int photon_lines = 0;
  int derivatives = 0;
  // Yang-Mills counts: gauge bosons, ghosts, anti-ghosts, derivatives.
  int bosons = 0;
  int ghosts = 0;
  int anti_ghosts = 0;
  int ym_derivatives = 0;
};

/// Power-counting bound on the singularity order.
[[nodiscard]] int singularity_bound(const ExternalLineSpec& spec, Theory theory);

struct ScalingEstimate {
  double exponent = 0.0;
  double residual = 0.0;
  bool low_confidence = false;
};

/// Slope of log|d(lambda p)| against log lambda over a geometric schedule.
/// Uses the four-momentum form if present, otherwise the line at lambda * direction[0].
[[nodiscard]] ScalingEstimate scaling_degree_estimate(const CausalDistribution& d, const FourVector& direction,
                                                      int samples = 16, double lambda_min = 1e1, double lambda_max = 1e4);

/// Pauli-Jordan distribution as a signed mass-shell measure.
[[nodiscard]] CausalDistribution pauli_jordan(double m);

/// \int d^3p/(2pi)^3 sum_k w_k f(p_k) for a test function depending only on (p0, |p|).
[[nodiscard]] Complex smear_on_shell_radial(const CausalDistribution& d,
                                            const std::function<Complex(double p0, double pabs)>& f);

enum class PropagatorKind { Dret, Dadv, Sret, Sadv, Feynman };

[[nodiscard]] PropagatorKind propagator_kind_from_string(const std::string& name);

/// 1/(m^2 - p^2 - i eps p0) (ret), + i eps p0 (adv), - i eps (Feynman).
/// Throws NumericError when p sits on the shell with eps = 0.
[[nodiscard]] Complex scalar_propagator(PropagatorKind kind, double m, const FourVector& p, double eps);

/// (m + pslash) times the scalar propagator of the matching kind.
[[nodiscard]] Mat4 dirac_propagator(PropagatorKind kind, double m, const FourVector& p, double eps);

/// Built-in one-dimensional models. sgn(t) e^{-|t|}: d^(k) = 2ik/(1+k^2).
[[nodiscard]] CausalDistribution toy_sign_exponential();
/// i (k^2 - 1) theta(k^2 - 1): grows quadratically, vanishes on (-1, 1).
[[nodiscard]] CausalDistribution toy_gapped_quadratic();

/// t e^{-|t|}: d^(k) = 4ik/(1+k^2)^2, retarded part 1/(1-ik)^2.
[[nodiscard]] CausalDistribution toy_double_pole();

/// {"kind": "pauli_jordan" | "sign_exponential" | "double_pole" | "gapped_quadratic", "mass": m}
[[nodiscard]] CausalDistribution distribution_from_json(const nlohmann::json& j);

struct PropagatorSpec {
  PropagatorKind kind = PropagatorKind::Dret;
  double mass = 1.0;
  double eps = 0.0;
};

[[nodiscard]] PropagatorSpec propagator_from_json(const nlohmann::json& j);

}  // namespace cqft
