#include "cqft/wick_algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cqft/errors.hpp"

namespace cqft {

Grade grade_of(FieldKind kind) {
  return (kind == FieldKind::psi || kind == FieldKind::psibar) ? Grade::fermi : Grade::bose;
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::scalar: return "phi";
    case FieldKind::psi: return "psi";
    case FieldKind::psibar: return "psibar";
    case FieldKind::photon: return "A";
  }
  return "?";
}

bool canonical_less(const FieldLeg& a, const FieldLeg& b) {
  return std::tie(a.character, a.field, a.slot, a.index) < std::tie(b.character, b.field, b.slot, b.index);
}

std::string to_string(const Atom& atom) {
  std::ostringstream os;
  os << atom.name << '(';
  for (std::size_t i = 0; i < atom.slots.size(); ++i) os << (i ? "," : "") << 'x' << atom.slots[i];
  if (!atom.indices.empty()) {
    os << ';';
    for (std::size_t i = 0; i < atom.indices.size(); ++i) {
      os << (i ? "," : "") << atom.indices[i].base << '@' << atom.indices[i].slot;
    }
  }
  os << ')';
  return os.str();
}

int canonicalize_legs(std::vector<FieldLeg>& legs) {
  std::vector<int> perm(legs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return canonical_less(legs[a], legs[b]); });
  std::vector<std::uint8_t> fermi(legs.size());
  for (std::size_t i = 0; i < legs.size(); ++i) fermi[i] = legs[i].grade() == Grade::fermi;
  const int sign = permutation_sign(perm, fermi);
  std::vector<FieldLeg> sorted;
  sorted.reserve(legs.size());
  for (int p : perm) sorted.push_back(legs[p]);
  legs = std::move(sorted);
  for (std::size_t i = 1; i < legs.size(); ++i) {
    if (legs[i].grade() == Grade::fermi && legs[i] == legs[i - 1]) return 0;
  }
  return sign;
}

WickPolynomial WickPolynomial::identity() {
  WickPolynomial p;
  p.add(GaussInt::one(), {}, {});
  return p;
}

WickPolynomial WickPolynomial::from_monomial(WickMonomial m) {
  WickPolynomial p;
  p.add(m.factor, std::move(m.atoms), std::move(m.legs));
  return p;
}

void WickPolynomial::add(GaussInt factor, std::vector<Atom> atoms, std::vector<FieldLeg> legs) {
  if (factor.is_zero()) return;
  const int sign = canonicalize_legs(legs);
  if (sign == 0) return;
  std::sort(atoms.begin(), atoms.end());
  Key key{std::move(atoms), std::move(legs)};
  auto [it, inserted] = terms_.try_emplace(std::move(key), GaussInt{});
  it->second = it->second + (sign > 0 ? factor : -factor);
  if (it->second.is_zero()) terms_.erase(it);
}

void WickPolynomial::add(const WickPolynomial& other, GaussInt factor) {
  for (const auto& [key, f] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(key, GaussInt{});
    it->second = it->second + f * factor;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::vector<WickMonomial> WickPolynomial::monomials() const {
  std::vector<WickMonomial> out;
  out.reserve(terms_.size());
  for (const auto& [key, f] : terms_) out.push_back({f, key.first, key.second});
  return out;
}

WickPolynomial WickPolynomial::scaled(GaussInt factor) const {
  WickPolynomial out;
  if (factor.is_zero()) return out;
  for (const auto& [key, f] : terms_) out.terms_.emplace(key, f * factor);
  return out;
}

WickPolynomial WickPolynomial::relabeled(const std::map<int, int>& slot_map) const {
  auto map_slot = [&](int s) {
    auto it = slot_map.find(s);
    return it == slot_map.end() ? s : it->second;
  };
  WickPolynomial out;
  for (const auto& [key, f] : terms_) {
    std::vector<Atom> atoms = key.first;
    for (auto& a : atoms) {
      for (auto& s : a.slots) s = map_slot(s);
      for (auto& ix : a.indices) ix.slot = map_slot(ix.slot);
    }
    std::vector<FieldLeg> legs = key.second;
    for (auto& l : legs) {
      l.slot = map_slot(l.slot);
      l.index.slot = map_slot(l.index.slot);
    }
    out.add(f, std::move(atoms), std::move(legs));
  }
  return out;
}

WickPolynomial WickPolynomial::canonicalized() const {
  WickPolynomial out;
  for (const auto& [key, f] : terms_) out.add(f, key.first, key.second);
  return out;
}

WickPolynomial wick_product(std::span<const Field> factors, GaussInt factor, std::vector<Atom> atoms) {
  WickPolynomial out;
  const std::size_t n = factors.size();
  if (n > 20) throw ValidationError("wick_product: too many factors");
  for (std::uint32_t choice = 0; choice < (1u << n); ++choice) {
    std::vector<FieldLeg> legs;
    legs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& f = factors[k];
      const Character c = ((choice >> k) & 1u) ? Character::annihilation : Character::creation;
      legs.push_back({f.kind, c, f.slot, IndexRef{f.index, f.index.empty() ? 0 : f.slot}});
    }
    out.add(factor, atoms, std::move(legs));
  }
  return out;
}

WickPolynomial wick_product(const WickPolynomial& a, const WickPolynomial& b) {
  WickPolynomial out;
  for (const auto& [ka, fa] : a.terms()) {
    for (const auto& [kb, fb] : b.terms()) {
      std::vector<Atom> atoms = ka.first;
      atoms.insert(atoms.end(), kb.first.begin(), kb.first.end());
      std::vector<FieldLeg> legs = ka.second;
      legs.insert(legs.end(), kb.second.begin(), kb.second.end());
      out.add(fa * fb, std::move(atoms), std::move(legs));
    }
  }
  return out;
}

bool contracts(const FieldLeg& left, const FieldLeg& right) {
  if (left.character != Character::annihilation || right.character != Character::creation) return false;
  switch (left.field) {
    case FieldKind::scalar: return right.field == FieldKind::scalar;
    case FieldKind::photon: return right.field == FieldKind::photon;
    case FieldKind::psi: return right.field == FieldKind::psibar;
    case FieldKind::psibar: return right.field == FieldKind::psi;
  }
  return false;
}

Atom contraction_atom(const FieldLeg& left, const FieldLeg& right) {
  if (!contracts(left, right)) throw ValidationError("contraction requested for non-pairing legs");
  switch (left.field) {
    case FieldKind::scalar: return {"D+", {left.slot, right.slot}, {}};
    case FieldKind::photon: return {"D0+", {left.slot, right.slot}, {left.index, right.index}};
    case FieldKind::psi: return {"S+", {left.slot, right.slot}, {left.index, right.index}};
    case FieldKind::psibar: return {"S-", {left.slot, right.slot}, {left.index, right.index}};
  }
  throw ValidationError("unknown field kind");
}

namespace {

// All partial matchings between left annihilation legs and right creation legs.
void product_terms(const WickPolynomial::Key& ka, GaussInt fa, const WickPolynomial::Key& kb, GaussInt fb,
                   WickPolynomial& out) {
  const auto& la = ka.second;
  const auto& lb = kb.second;
  const int na = static_cast<int>(la.size());
  const int nb = static_cast<int>(lb.size());
  std::vector<FieldLeg> all(la);
  all.insert(all.end(), lb.begin(), lb.end());
  std::vector<std::uint8_t> fermi(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) fermi[i] = all[i].grade() == Grade::fermi;

  std::vector<int> match(static_cast<std::size_t>(na), -1);
  std::vector<bool> used(static_cast<std::size_t>(nb), false);

  auto emit = [&]() {
    std::vector<int> perm;
    std::vector<bool> taken(all.size(), false);
    std::vector<Atom> atoms = ka.first;
    atoms.insert(atoms.end(), kb.first.begin(), kb.first.end());
    for (int i = 0; i < na; ++i) {
      if (match[i] < 0) continue;
      const int j = na + match[i];
      perm.push_back(i);
      perm.push_back(j);
      taken[i] = taken[j] = true;
      atoms.push_back(contraction_atom(all[i], all[j]));
    }
    std::vector<FieldLeg> rest;
    for (int k = 0; k < na + nb; ++k) {
      if (taken[k]) continue;
      perm.push_back(k);
      rest.push_back(all[k]);
    }
    const int sign = permutation_sign(perm, fermi);
    out.add(sign > 0 ? fa * fb : -(fa * fb), std::move(atoms), std::move(rest));
  };

  auto rec = [&](auto&& self, int i) -> void {
    if (i == na) {
      emit();
      return;
    }
    self(self, i + 1);
    if (la[i].character != Character::annihilation) return;
    for (int j = 0; j < nb; ++j) {
      if (used[j] || !contracts(la[i], lb[j])) continue;
      used[j] = true;
      match[i] = j;
      self(self, i + 1);
      match[i] = -1;
      used[j] = false;
    }
  };
  rec(rec, 0);
}

}  // namespace

WickPolynomial operator_product(const WickPolynomial& a, const WickPolynomial& b) {
  WickPolynomial out;
  for (const auto& [ka, fa] : a.terms()) {
    for (const auto& [kb, fb] : b.terms()) product_terms(ka, fa, kb, fb, out);
  }
  return out;
}

WickPolynomial vacuum_expectation(const WickPolynomial& p) {
  WickPolynomial out;
  for (const auto& [key, f] : p.terms()) {
    if (key.second.empty()) out.add(f, key.first, {});
  }
  return out;
}

WickPolynomial qed_vertex(int slot) {
  const std::vector<Field> fields{{FieldKind::psibar, slot, "a"}, {FieldKind::psi, slot, "b"}, {FieldKind::photon, slot, "mu"}};
  Atom gamma{"gamma", {}, {{"mu", slot}, {"a", slot}, {"b", slot}}};
  return wick_product(fields, GaussInt::one(), {gamma});
}

WickPolynomial phi3_vertex(int slot) {
  const std::vector<Field> fields(3, Field{FieldKind::scalar, slot, ""});
  return wick_product(fields, GaussInt::one(), {Atom{"lambda", {slot}, {}}});
}

WickPolynomial phi2_vertex(int slot) {
  const std::vector<Field> fields(2, Field{FieldKind::scalar, slot, ""});
  return wick_product(fields, GaussInt::one(), {Atom{"lambda", {slot}, {}}});
}

nlohmann::json to_json(const WickPolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, f] : p.terms()) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : key.first) atoms.push_back(to_string(a));
    nlohmann::json legs = nlohmann::json::array();
    for (const auto& l : key.second) {
      std::string idx = l.index.base.empty() ? "" : l.index.base + "@" + std::to_string(l.index.slot);
      legs.push_back({to_string(l.field), l.character == Character::creation ? "+" : "-", l.slot, idx});
    }
    terms.push_back({{"factor", {f.re, f.im}}, {"atoms", atoms}, {"legs", legs}});
  }
  return {{"terms", terms}};
}

std::string to_string(const WickPolynomial& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, f] : p.terms()) {
    os << (first ? "" : " + ") << '(' << f.re << (f.im < 0 ? "" : "+") << f.im << "i)";
    for (const auto& a : key.first) os << ' ' << to_string(a);
    if (!key.second.empty()) {
      os << " :";
      for (const auto& l : key.second) {
        os << ' ' << to_string(l.field) << (l.character == Character::creation ? "+" : "-") << "(x" << l.slot;
        if (!l.index.base.empty()) os << ';' << l.index.base << '@' << l.index.slot;
        os << ')';
      }
      os << " :";
    }
    first = false;
  }
  if (first) os << '0';
  return os.str();
}

}  // namespace cqft
