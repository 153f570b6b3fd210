#pragma once

// Scaling family g_eps(x) = g(eps x), smeared second-order contributions along
// eps -> 0+, and the convergence verdict.
//
// The switching profile is separable: g(x) = h(t) exp(-|x|^2 / (2 w^2)) with
// h(0) = alpha0. Inside the smeared contributions the time profile enters
// through the folded weight w+(kappa) = h^(kappa)/pi on kappa > 0, whose
// integral is alpha0; the retarded propagator on the shell contributes the
// explicit factor 1/(-i eps p0) and the Green function is evaluated at the
// shifted energy p0 + i eps kappa.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqft/dirac.hpp"
#include "cqft/fock_kernel.hpp"
#include "cqft/qed_second_order.hpp"

namespace cqft {

enum class Profile { gaussian, sech, sech2 };

[[nodiscard]] Profile profile_from_string(const std::string& name);
[[nodiscard]] std::string to_string(Profile p);

struct ScalingFamily {
  Profile profile = Profile::gaussian;
  double alpha0 = 1.0;
  double width = 1.0;  // time scale of h
  double spatial_width = 1.0;
  std::vector<double> epsilons;

  /// eps = 2^-3 ... 2^-14.
  static std::vector<double> default_schedule();
  static std::vector<double> geometric(double start, double stop, int steps);

  /// Throws ValidationError unless the schedule is strictly decreasing and positive.
  void validate() const;

  /// h^(kappa) = \int h(t) e^{i kappa t} dt.
  [[nodiscard]] double time_transform(double kappa) const;
  /// w+(kappa) for kappa >= 0.
  [[nodiscard]] double folded_weight(double kappa) const;
  /// Upper end of the kappa range carrying all but ~1e-13 of the weight.
  [[nodiscard]] double kappa_max() const;
  /// g^(q) of the unscaled profile.
  [[nodiscard]] double g_hat(const FourVector& q) const;
  /// eps^-4 g^(p / eps).
  [[nodiscard]] double g_hat_scaled(const FourVector& p, double eps) const;
};

enum class Channel { sigma_into_psi, pi_into_a, pi_into_current };

[[nodiscard]] Channel channel_from_string(const std::string& name);
[[nodiscard]] std::string to_string(Channel c);

/// Single-particle data xi and space-time test data phi, both sampled along a
/// fixed momentum direction on [p_lo, p_hi] (for pi_into_current: along s).
struct TestData {
  std::function<double(double)> xi;
  std::function<double(double)> phi;
  std::array<Complex, 2> spin_weights{Complex(1.0), Complex(0.0)};
  Spinor chi = Spinor::Constant(Complex(0.5));
  std::array<double, 3> direction{0.0, 0.0, 1.0};
  double p_lo = 0.25;
  double p_hi = 2.5;

  static TestData standard();
  static TestData zero();
};

struct GreenFunction {
  const SelfEnergy* sigma = nullptr;
  const VacuumPolarization* pi = nullptr;
};

[[nodiscard]] Complex smeared_contribution(Channel channel, const GreenFunction& green, const TestData& data,
                                           const ScalingFamily& family, double eps);

enum class Verdict { converged, diverged, inconclusive };

[[nodiscard]] std::string to_string(Verdict v);

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<Complex> values;
  Verdict verdict = Verdict::inconclusive;
  double fitted_exponent = 0.0;
  std::optional<Complex> limit_estimate;

  [[nodiscard]] nlohmann::json verdict_json() const;
};

/// Classifies a finished series. Over the last half of the schedule (at least
/// four points): slope s of log|v| against log eps and the ratio r of
/// successive increments |v_{k+1} - v_k|.
///   diverged:  s <= -0.25, or a drift (increments keep their direction and
///              stay above 1e-10 max|v|) with r >= 0.9;
///   converged: s > -0.1 and r < 0.9 (limit by Richardson extrapolation);
///   otherwise inconclusive, as is any schedule with fewer than four points.
[[nodiscard]] SweepResult classify(std::vector<double> epsilons, std::vector<Complex> values);

[[nodiscard]] SweepResult sweep(Channel channel, const GreenFunction& green, const TestData& data,
                                const ScalingFamily& family);

/// The eps -> 0 limit computed without eps: empty if the shell value of the
/// numerator is nonzero (the limit does not exist).
[[nodiscard]] std::optional<Complex> epsilon_free_value(Channel channel, const GreenFunction& green,
                                                        const TestData& data, const ScalingFamily& family,
                                                        double tol = 1e-9);

/// <<S_n(g_eps^n) Phi0, Phi0>> along the schedule. n = 1 vanishes by normal
/// ordering; n = 2 uses the vacuum bubble split with `constants` (three, at s = 0).
[[nodiscard]] SweepResult weak_limit_vacuum(int n, const ScalingFamily& family, double m,
                                            const std::vector<Complex>& constants = {0.0, 0.0, 0.0});

/// Spectral weight of the second-order vacuum bubble (fermion loop times photon).
[[nodiscard]] double vacuum_bubble_spectral(double m, double s);

/// Normal-ordered kernels of Xi(A) Xi(B), one per contraction count
/// (index k holds k contractions). Requires a single statistics on the grid.
[[nodiscard]] std::vector<DiscreteKernel> product_of_limits(const MomentumGrid& grid, const DiscreteKernel& a,
                                                            const DiscreteKernel& b);

}  // namespace cqft
