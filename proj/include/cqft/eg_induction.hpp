#pragma once

// Inductive construction of the time-ordered products S_n from lower orders:
//   A'_n = sum_{X u Y = Z, X != {}} Sbar(X) S(Y, x_n),
//   R'_n = sum_{X u Y = Z, X != {}} S(Y, x_n) Sbar(X),
//   D_n = R'_n - A'_n,   S_n = ret D_n - R'_n = adv D_n - A'_n,
// with Z = {x_1 .. x_{n-1}}. Each S_k lives in slots 1..k; subsets are
// obtained by relabeling. Split coefficients are kept symbolic as atoms
// "ret:<hash>" / "adv:<hash>" whose meaning is recorded in a registry.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cqft/grassmann_sign.hpp"
#include "cqft/wick_algebra.hpp"

namespace cqft {

using Complex = std::complex<double>;

enum class Interaction { qed, phi3, phi2 };

[[nodiscard]] Interaction interaction_from_string(const std::string& name);

/// S_1(x_slot) = i L(x_slot).
[[nodiscard]] WickPolynomial first_order(Interaction theory, int slot);

struct OrderData {
  std::map<int, WickPolynomial> S;
  std::map<int, WickPolynomial> Sbar;
};

/// Sbar_k for k = 1..n from sum_{X u Y = Z} Sbar(X) S(Y) = 0.
[[nodiscard]] std::map<int, WickPolynomial> invert_series(const std::map<int, WickPolynomial>& S, int n);

/// S(subset) as the order-|subset| term relabeled onto the given slots.
[[nodiscard]] WickPolynomial on_slots(const WickPolynomial& p, std::span<const int> slots);

struct InductiveStep {
  int n = 0;
  WickPolynomial Aprime;
  WickPolynomial Rprime;
  WickPolynomial D;
  std::size_t partitions = 0;  // number of (X, Y) with X nonempty
};

inline constexpr int default_symbolic_cap = 5;

/// `grades` gives the Grassmann grade of each source slot 1..n (all bose if empty).
/// n = 1 gives A' = R' = 0. Throws ValidationError for n above `cap` or missing lower orders.
[[nodiscard]] InductiveStep build_Aprime_Rprime(int n, const OrderData& data, std::span<const Grade> grades = {},
                                                int cap = default_symbolic_cap);

/// Registry of split coefficients: atom name -> leg-free coefficient polynomial.
struct SplitRegistry {
  std::map<std::string, WickPolynomial> retarded;
  std::map<std::string, WickPolynomial> advanced;
};

[[nodiscard]] std::string fnv1a_hex(const std::string& text);

/// One split per distinct leg signature of D; returns the names it registered.
std::vector<std::string> register_splits(const InductiveStep& step, SplitRegistry& registry);

struct AssembledOrder {
  WickPolynomial via_retarded;  // ret D - R'
  WickPolynomial via_advanced;  // adv D - A'
};

/// Throws ValidationError if a coefficient of D has no registered split.
[[nodiscard]] AssembledOrder assemble_Sn(const InductiveStep& step, const SplitRegistry& registry);

/// Replaces every adv atom by its ret atom minus the registered coefficient.
[[nodiscard]] WickPolynomial substitute_advanced(const WickPolynomial& p, const SplitRegistry& registry);

/// Runs the induction up to order n; fills S, Sbar and the registry.
[[nodiscard]] OrderData run_induction(Interaction theory, int n, SplitRegistry& registry,
                                      int cap = default_symbolic_cap);

[[nodiscard]] nlohmann::json to_json(const SplitRegistry& registry);

// One-point ("0+1 dimensional") scalar model on a discrete time lattice:
// phi(t) = (a e^{-i w t} + a^+ e^{i w t}) / sqrt(2 w), D+(t1, t2) = e^{-i w (t1 - t2)} / (2 w).
struct LatticeModel {
  double omega = 1.0;
  double coupling = 1.0;
  double dt = 0.05;
  std::size_t steps = 128;  // lattice points in the relative time
  int levels = 16;          // oscillator truncation
};

using DenseOperator = Eigen::MatrixXcd;

/// Value of a leg-free coefficient at the given slot times (slot k at times[k-1]).
[[nodiscard]] Complex evaluate_coefficient(const WickPolynomial& coefficient, std::span<const double> times,
                                           const LatticeModel& model, const SplitRegistry& registry);

/// Dense operator of a scalar Wick polynomial at the given slot times. Split
/// atoms of order 2 are evaluated through the lattice split of their coefficient.
[[nodiscard]] DenseOperator lattice_operator(const WickPolynomial& p, std::span<const double> times,
                                             const LatticeModel& model, const SplitRegistry& registry);

/// Samples of a two-slot coefficient along t = t1 - t2 at fixed t2, lattice origin steps/2.
[[nodiscard]] std::vector<Complex> coefficient_samples(const WickPolynomial& coefficient, double t2,
                                                       const LatticeModel& model, const SplitRegistry& registry);

struct SupportReport {
  double retarded_leakage = 0.0;  // max |ret| at t < 0
  double advanced_leakage = 0.0;  // max |adv| at t > 0
  double causal_leakage = 0.0;    // max |d| outside the union of both half-lines
  double reconstruction = 0.0;    // max |ret - adv - d|
  [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] SupportReport lattice_support_check(std::span<const Complex> d, std::span<const Complex> ret,
                                                  std::span<const Complex> adv, std::size_t origin);

}  // namespace cqft
