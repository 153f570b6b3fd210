#pragma once

// Symbolic Wick calculus. Fields are sums of an emission (creation) and an
// absorption (annihilation) kernel operator; Wick products concatenate legs
// without contractions; operator products expand by enumerating contractions
// between annihilation legs of the left factor and creation legs of the right.
//
// Coefficients stay symbolic: an exact Gaussian-integer factor times a sorted
// product of atoms (pairing functions, vertex tensors, split distributions).

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqft/grassmann_sign.hpp"

namespace cqft {

enum class FieldKind : int { scalar = 0, psi = 1, psibar = 2, photon = 3 };
enum class Character : int { creation = 0, annihilation = 1 };

[[nodiscard]] Grade grade_of(FieldKind kind);
[[nodiscard]] std::string to_string(FieldKind kind);

/// Spinor/Lorentz index label attached to a space-time slot, e.g. mu@2.
struct IndexRef {
  std::string base;
  int slot = 0;
  auto operator<=>(const IndexRef&) const = default;
};

struct FieldLeg {
  FieldKind field = FieldKind::scalar;
  Character character = Character::creation;
  int slot = 0;
  IndexRef index;

  [[nodiscard]] Grade grade() const { return grade_of(field); }
  auto operator<=>(const FieldLeg&) const = default;
};

/// Canonical order: creation before annihilation, then field, slot, index.
[[nodiscard]] bool canonical_less(const FieldLeg& a, const FieldLeg& b);

struct Atom {
  std::string name;
  std::vector<int> slots;
  std::vector<IndexRef> indices;
  auto operator<=>(const Atom&) const = default;
};

[[nodiscard]] std::string to_string(const Atom& atom);

struct GaussInt {
  std::int64_t re = 0;
  std::int64_t im = 0;

  static constexpr GaussInt one() { return {1, 0}; }
  static constexpr GaussInt i() { return {0, 1}; }
  [[nodiscard]] bool is_zero() const { return re == 0 && im == 0; }
  friend GaussInt operator*(GaussInt a, GaussInt b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussInt operator-(GaussInt a) { return {-a.re, -a.im}; }
  auto operator<=>(const GaussInt&) const = default;
};

struct WickMonomial {
  GaussInt factor = GaussInt::one();
  std::vector<Atom> atoms;     // sorted
  std::vector<FieldLeg> legs;  // canonical normal order
};

/// Sum of normal-ordered monomials; terms with equal (atoms, legs) are merged
/// and zero terms dropped on insertion.
class WickPolynomial {
 public:
  using Key = std::pair<std::vector<Atom>, std::vector<FieldLeg>>;

  WickPolynomial() = default;
  static WickPolynomial identity();
  static WickPolynomial from_monomial(WickMonomial m);

  /// Adds a term. Legs need not be canonical; they are sorted with the
  /// fermionic sign, and a repeated fermionic leg annihilates the term.
  void add(GaussInt factor, std::vector<Atom> atoms, std::vector<FieldLeg> legs);
  void add(const WickPolynomial& other, GaussInt factor = GaussInt::one());

  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] const std::map<Key, GaussInt>& terms() const { return terms_; }
  [[nodiscard]] std::vector<WickMonomial> monomials() const;

  [[nodiscard]] WickPolynomial scaled(GaussInt factor) const;
  /// Slot relabeling applied to legs, index labels and atom arguments.
  [[nodiscard]] WickPolynomial relabeled(const std::map<int, int>& slot_map) const;
  /// Rebuilds every term through `add`; a no-op on already canonical input.
  [[nodiscard]] WickPolynomial canonicalized() const;

  friend bool operator==(const WickPolynomial&, const WickPolynomial&) = default;

 private:
  std::map<Key, GaussInt> terms_;
};

/// A free field at a slot: kind plus index base name ("" for scalars).
struct Field {
  FieldKind kind = FieldKind::scalar;
  int slot = 0;
  std::string index;
};

/// Sorts legs canonically. Returns the fermionic sign, or 0 if a fermionic leg repeats.
int canonicalize_legs(std::vector<FieldLeg>& legs);

/// :F1 F2 ... Fk: with the given coefficient.
[[nodiscard]] WickPolynomial wick_product(std::span<const Field> factors, GaussInt factor = GaussInt::one(),
                                          std::vector<Atom> atoms = {});
/// :A B: without contractions.
[[nodiscard]] WickPolynomial wick_product(const WickPolynomial& a, const WickPolynomial& b);

/// The pairing atom for <leg_a leg_b>, or nothing if the pair does not contract.
[[nodiscard]] bool contracts(const FieldLeg& left, const FieldLeg& right);
[[nodiscard]] Atom contraction_atom(const FieldLeg& left, const FieldLeg& right);

/// Operator product A B expanded into normal-ordered form.
[[nodiscard]] WickPolynomial operator_product(const WickPolynomial& a, const WickPolynomial& b);

/// Leg-free part of P (the vacuum-graph coefficients).
[[nodiscard]] WickPolynomial vacuum_expectation(const WickPolynomial& p);

/// Spinor QED interaction :psibar gamma^mu psi A_mu:(x_slot), coefficient atom gamma(mu, a, b).
[[nodiscard]] WickPolynomial qed_vertex(int slot);
/// Scalar toy interaction :phi^3:(x_slot) with coupling atom lambda.
[[nodiscard]] WickPolynomial phi3_vertex(int slot);
/// :phi^2:(x_slot) with coupling atom lambda.
[[nodiscard]] WickPolynomial phi2_vertex(int slot);

[[nodiscard]] nlohmann::json to_json(const WickPolynomial& p);
[[nodiscard]] std::string to_string(const WickPolynomial& p);

}  // namespace cqft
