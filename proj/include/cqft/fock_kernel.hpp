#pragma once

// Hida creation/annihilation operators and integral kernel operators realized
// on a truncated Fock space over a finite momentum grid.
//
// Normalization: the grid delta is delta_{ij} / w_i, so that
//   [d_i, d_j^+]_(-/+) = delta_{ij} / w_i
// and quadrature sums  sum_i w_i f(p_i)  stand in for the momentum integrals.
// Internally d_i = a_i / sqrt(w_i) with a_i the orthonormal-basis ladder
// operator; fermionic modes carry a Jordan-Wigner string over lower fermi modes.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

namespace cqft {

using Complex = std::complex<double>;

enum class Statistics { bose, fermi };

struct GridPoint {
  std::array<double, 3> momentum{};
  int spin = 0;
  int field = 0;
};

struct MomentumGrid {
  std::vector<GridPoint> points;
  std::vector<double> weights;
  std::vector<Statistics> statistics;  // indexed by GridPoint::field
  std::vector<int> krein_sign;         // +1/-1 per point

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] Statistics statistics_of(std::size_t mode) const { return statistics.at(points.at(mode).field); }
  [[nodiscard]] bool krein_trivial() const;

  /// Throws ValidationError on non-positive weights, duplicate points, bad signs.
  void validate() const;

  /// `n` points on [pmin, pmax] along the first momentum axis, one field, trapezoid weights.
  static MomentumGrid line(std::size_t n, double pmin, double pmax, Statistics stats);
};

using Occupation = std::vector<std::uint8_t>;

/// Coefficients in the orthonormal occupation basis. Components with total
/// particle number above `cutoff` are never stored.
struct FockGridState {
  std::size_t modes = 0;
  int cutoff = 0;
  std::map<Occupation, Complex> amplitudes;

  static FockGridState vacuum(std::size_t modes, int cutoff);
  static FockGridState zero(std::size_t modes, int cutoff);
  static FockGridState basis(const Occupation& occ, int cutoff);

  [[nodiscard]] bool is_zero(double tol = 0.0) const;
  [[nodiscard]] Complex amplitude(const Occupation& occ) const;

  FockGridState& add(const FockGridState& other, Complex factor = 1.0);
  FockGridState& scale(Complex factor);
  void prune(double tol = 0.0);
};

[[nodiscard]] int total_particles(const Occupation& occ);

/// Every occupation configuration with total <= max_total respecting Pauli exclusion.
[[nodiscard]] std::vector<Occupation> occupation_basis(const MomentumGrid& grid, int max_total);

/// Random state with unit-scale complex amplitudes on configurations up to `max_total`.
[[nodiscard]] FockGridState random_state(const MomentumGrid& grid, int cutoff, int max_total, std::mt19937_64& rng,
                                         double density = 1.0);

/// d_mode applied to `state`.
[[nodiscard]] FockGridState apply_annihilation(const MomentumGrid& grid, std::size_t mode, const FockGridState& state);

/// d_mode^+ applied to `state`. Throws TruncationError if a nonzero component
/// would exceed the cutoff.
[[nodiscard]] FockGridState apply_creation(const MomentumGrid& grid, std::size_t mode, const FockGridState& state);

/// <<X, Y>> = sum_n X_n conj(Y_n) prod_i krein_i^{n_i}. Linear in X.
[[nodiscard]] Complex pairing(const MomentumGrid& grid, const FockGridState& x, const FockGridState& y);

/// <<d^+_{p1}..d^+_{pl} d_{q1}..d_{qm} Phi, Psi>>.
[[nodiscard]] Complex eta_pairing(const MomentumGrid& grid, std::span<const std::size_t> creation_modes,
                                  std::span<const std::size_t> annihilation_modes, const FockGridState& phi,
                                  const FockGridState& psi);

/// Kernel with l creation and m annihilation slots, the space-time slot
/// already contracted. Values are stored row-major over (p1..pl, q1..qm),
/// each index ranging over the grid.
struct DiscreteKernel {
  int l = 0;
  int m = 0;
  std::size_t modes = 0;
  std::vector<Complex> values;

  static DiscreteKernel zero(int l, int m, std::size_t modes);
  [[nodiscard]] std::size_t tuple_count() const { return values.size(); }
  [[nodiscard]] std::vector<std::size_t> unflatten(std::size_t flat) const;
  [[nodiscard]] std::size_t flatten(std::span<const std::size_t> tuple) const;
  [[nodiscard]] Complex at(std::span<const std::size_t> tuple) const { return values[flatten(tuple)]; }

  /// Kernel of the adjoint operator: slots reversed and swapped, values conjugated.
  [[nodiscard]] DiscreteKernel adjoint() const;
};

/// Xi(kappa) Phi = sum over tuples of  prod(w) kappa(p,q) d^+_p.. d_q.. Phi.
[[nodiscard]] FockGridState apply_xi(const MomentumGrid& grid, const DiscreteKernel& kernel, const FockGridState& phi);

/// <<Xi(kappa) Phi, Psi>> evaluated as the weighted sum of kappa * eta_{Phi,Psi}.
[[nodiscard]] Complex xi_matrix_element(const MomentumGrid& grid, const DiscreteKernel& kernel,
                                        const FockGridState& phi, const FockGridState& psi);

/// max over (i,j) and basis states below the cutoff of
/// |[d_i, d_j^+]_(-/+) - delta_ij / w_i| (anticommutator when both modes are fermionic).
[[nodiscard]] double commutator_check(const MomentumGrid& grid, int cutoff);

nlohmann::json to_json(const MomentumGrid& grid);
nlohmann::json to_json(const FockGridState& state);
MomentumGrid grid_from_json(const nlohmann::json& j);
FockGridState state_from_json(const nlohmann::json& j);

}  // namespace cqft
