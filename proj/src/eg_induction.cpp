#include "cqft/eg_induction.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <set>

#include "cqft/errors.hpp"
#include "cqft/splitting_engine.hpp"

namespace cqft {

namespace {

std::vector<GradedVar> source_vars(int count, std::span<const Grade> grades) {
  std::vector<GradedVar> out;
  for (int k = 1; k <= count; ++k) {
    Grade g = static_cast<std::size_t>(k - 1) < grades.size() ? grades[k - 1] : Grade::bose;
    out.push_back({std::to_string(k), g});
  }
  return out;
}

std::vector<GradedVar> pick(const std::vector<GradedVar>& vars, std::span<const int> slots) {
  std::vector<GradedVar> out;
  for (int s : slots) out.push_back(vars[s - 1]);
  return out;
}

// Splits {1..count} into (X, Y) by bitmask over the members of X.
void split_mask(int count, unsigned mask, std::vector<int>& X, std::vector<int>& Y) {
  X.clear();
  Y.clear();
  for (int k = 1; k <= count; ++k) ((mask >> (k - 1)) & 1u ? X : Y).push_back(k);
}

const WickPolynomial& order_term(const std::map<int, WickPolynomial>& terms, int k, const char* what) {
  auto it = terms.find(k);
  if (it == terms.end()) throw ValidationError(std::string("missing ") + what + " of order " + std::to_string(k));
  return it->second;
}

GaussInt sign_factor(int sign) { return {sign, 0}; }

std::vector<IndexRef> coefficient_indices(const WickPolynomial& coefficient) {
  std::set<IndexRef> seen;
  for (const auto& [key, f] : coefficient.terms())
    for (const auto& atom : key.first) seen.insert(atom.indices.begin(), atom.indices.end());
  return {seen.begin(), seen.end()};
}

// D grouped by leg signature, each with its leg-free coefficient.
std::map<std::vector<FieldLeg>, WickPolynomial> group_by_legs(const WickPolynomial& D) {
  std::map<std::vector<FieldLeg>, WickPolynomial> groups;
  for (const auto& [key, f] : D.terms()) groups[key.second].add(f, key.first, {});
  return groups;
}

std::vector<int> iota_slots(int n) {
  std::vector<int> slots(n);
  std::iota(slots.begin(), slots.end(), 1);
  return slots;
}

}  // namespace

Interaction interaction_from_string(const std::string& name) {
  if (name == "qed") return Interaction::qed;
  if (name == "phi3") return Interaction::phi3;
  if (name == "phi2") return Interaction::phi2;
  throw ValidationError("unknown interaction '" + name + "'");
}

WickPolynomial first_order(Interaction theory, int slot) {
  switch (theory) {
    case Interaction::qed: return qed_vertex(slot).scaled(GaussInt::i());
    case Interaction::phi3: return phi3_vertex(slot).scaled(GaussInt::i());
    case Interaction::phi2: return phi2_vertex(slot).scaled(GaussInt::i());
  }
  throw ValidationError("unknown interaction");
}

WickPolynomial on_slots(const WickPolynomial& p, std::span<const int> slots) {
  std::map<int, int> mapping;
  for (std::size_t k = 0; k < slots.size(); ++k) mapping[static_cast<int>(k) + 1] = slots[k];
  return p.relabeled(mapping);
}

std::map<int, WickPolynomial> invert_series(const std::map<int, WickPolynomial>& S, int n) {
  std::map<int, WickPolynomial> Sbar;
  std::vector<int> X, Y;
  for (int k = 1; k <= n; ++k) {
    WickPolynomial acc = order_term(S, k, "S").scaled({-1, 0});
    auto vars = source_vars(k, {});
    for (unsigned mask = 1; mask + 1 < (1u << k); ++mask) {
      split_mask(k, mask, X, Y);
      Partition part{vars, {pick(vars, X), pick(vars, Y)}};
      int sign = parity_sign(part);
      auto left = on_slots(Sbar.at(static_cast<int>(X.size())), X);
      auto right = on_slots(order_term(S, static_cast<int>(Y.size()), "S"), Y);
      acc.add(operator_product(left, right), sign_factor(-sign));
    }
    Sbar.emplace(k, std::move(acc));
  }
  return Sbar;
}

InductiveStep build_Aprime_Rprime(int n, const OrderData& data, std::span<const Grade> grades, int cap) {
  if (n < 1) throw ValidationError("order must be positive");
  if (n > cap) throw ValidationError("order " + std::to_string(n) + " exceeds the symbolic cap " + std::to_string(cap));
  InductiveStep step;
  step.n = n;
  const int m = n - 1;  // for n = 1 the loop is empty and A' = R' = 0
  auto vars = source_vars(n, grades);
  std::vector<GradedVar> zvars(vars.begin(), vars.begin() + m);
  std::vector<int> X, Y;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    split_mask(m, mask, X, Y);
    std::vector<int> Yn = Y;
    Yn.push_back(n);
    auto sbar = on_slots(order_term(data.Sbar, static_cast<int>(X.size()), "Sbar"), X);
    auto s = on_slots(order_term(data.S, static_cast<int>(Yn.size()), "S"), Yn);

    int sign_a = parity_sign(Partition{zvars, {pick(vars, X), pick(vars, Y)}});
    auto yn_vars = pick(vars, Yn);
    int sign_r = parity_sign(Partition{vars, {yn_vars, pick(vars, X)}});

    step.Aprime.add(operator_product(sbar, s), sign_factor(sign_a));
    step.Rprime.add(operator_product(s, sbar), sign_factor(sign_r));
    ++step.partitions;
  }
  step.D = step.Rprime;
  step.D.add(step.Aprime, {-1, 0});
  return step;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> register_splits(const InductiveStep& step, SplitRegistry& registry) {
  std::vector<std::string> names;
  for (auto& [legs, coefficient] : group_by_legs(step.D)) {
    const std::string hash = fnv1a_hex(to_string(coefficient));
    registry.retarded.emplace("ret:" + hash, coefficient);
    registry.advanced.emplace("adv:" + hash, coefficient);
    names.push_back("ret:" + hash);
  }
  return names;
}

AssembledOrder assemble_Sn(const InductiveStep& step, const SplitRegistry& registry) {
  AssembledOrder out;
  out.via_retarded = step.Rprime.scaled({-1, 0});
  out.via_advanced = step.Aprime.scaled({-1, 0});
  const auto slots = iota_slots(step.n);
  for (auto& [legs, coefficient] : group_by_legs(step.D)) {
    const std::string hash = fnv1a_hex(to_string(coefficient));
    if (!registry.retarded.contains("ret:" + hash) || !registry.advanced.contains("adv:" + hash))
      throw ValidationError("no split registered for causal coefficient " + hash);
    const auto indices = coefficient_indices(coefficient);
    out.via_retarded.add(GaussInt::one(), {Atom{"ret:" + hash, slots, indices}}, legs);
    out.via_advanced.add(GaussInt::one(), {Atom{"adv:" + hash, slots, indices}}, legs);
  }
  return out;
}

WickPolynomial substitute_advanced(const WickPolynomial& p, const SplitRegistry& registry) {
  WickPolynomial out;
  for (const auto& [key, f] : p.terms()) {
    std::vector<Atom> rest;
    std::vector<Atom> advanced;
    for (const auto& atom : key.first) (atom.name.starts_with("adv:") ? advanced : rest).push_back(atom);
    WickPolynomial term;
    term.add(f, rest, key.second);
    for (const auto& atom : advanced) {
      auto it = registry.advanced.find(atom.name);
      if (it == registry.advanced.end()) throw ValidationError("unregistered split atom " + atom.name);
      WickPolynomial replacement;
      Atom ret = atom;
      ret.name = "ret:" + atom.name.substr(4);
      replacement.add(GaussInt::one(), {ret}, {});
      // the coefficient is stored in canonical slots 1..k; move it onto the atom's slots
      replacement.add(on_slots(it->second, atom.slots), {-1, 0});
      term = wick_product(term, replacement);
    }
    out.add(term);
  }
  return out;
}

OrderData run_induction(Interaction theory, int n, SplitRegistry& registry, int cap) {
  if (n < 1) throw ValidationError("order must be positive");
  if (n > cap) throw ValidationError("order " + std::to_string(n) + " exceeds the symbolic cap " + std::to_string(cap));
  OrderData data;
  data.S.emplace(1, first_order(theory, 1));
  for (int k = 2; k <= n; ++k) {
    data.Sbar = invert_series(data.S, k - 1);
    auto step = build_Aprime_Rprime(k, data, {}, cap);
    register_splits(step, registry);
    data.S.emplace(k, assemble_Sn(step, registry).via_retarded);
  }
  data.Sbar = invert_series(data.S, n);
  return data;
}

nlohmann::json to_json(const SplitRegistry& registry) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, coefficient] : registry.retarded) j[name] = to_json(coefficient);
  return j;
}

// ---- lattice model ----

namespace {

Complex split_atom_value(const Atom& atom, std::span<const double> times, const LatticeModel& model,
                         const SplitRegistry& registry) {
  const bool retarded = atom.name.starts_with("ret:");
  const auto& table = retarded ? registry.retarded : registry.advanced;
  auto it = table.find(atom.name);
  if (it == table.end()) throw ValidationError("unregistered split atom " + atom.name);
  if (atom.slots.size() != 2) throw ValidationError("lattice evaluation supports split atoms of order 2 only");
  const double t1 = times[atom.slots[0] - 1];
  const double t2 = times[atom.slots[1] - 1];
  const double steps_off = (t1 - t2) / model.dt;
  const long j = std::lround(steps_off);
  if (std::abs(steps_off - static_cast<double>(j)) > 1e-9)
    throw ValidationError("slot times are not on the lattice");
  const long origin = static_cast<long>(model.steps / 2);
  if (j + origin < 0 || j + origin >= static_cast<long>(model.steps))
    throw ValidationError("time difference outside the lattice window");
  auto samples = coefficient_samples(it->second, t2, model, registry);
  auto split = lattice_split(samples, model.steps / 2);
  return retarded ? split.retarded[j + origin] : split.advanced[j + origin];
}

Complex atom_value(const Atom& atom, std::span<const double> times, const LatticeModel& model,
                   const SplitRegistry& registry) {
  auto time_of = [&](int slot) {
    if (slot < 1 || static_cast<std::size_t>(slot) > times.size()) throw ValidationError("slot without a time");
    return times[slot - 1];
  };
  if (atom.name == "lambda") return model.coupling;
  if (atom.name == "D+") {
    const double dt = time_of(atom.slots[0]) - time_of(atom.slots[1]);
    return std::exp(Complex(0.0, -model.omega * dt)) / (2.0 * model.omega);
  }
  if (atom.name.starts_with("ret:") || atom.name.starts_with("adv:"))
    return split_atom_value(atom, times, model, registry);
  throw ValidationError("atom '" + atom.name + "' has no value in the scalar lattice model");
}

Complex monomial_coefficient(GaussInt f, const std::vector<Atom>& atoms, std::span<const double> times,
                             const LatticeModel& model, const SplitRegistry& registry) {
  Complex c(static_cast<double>(f.re), static_cast<double>(f.im));
  for (const auto& a : atoms) c *= atom_value(a, times, model, registry);
  return c;
}

}  // namespace

Complex evaluate_coefficient(const WickPolynomial& coefficient, std::span<const double> times,
                             const LatticeModel& model, const SplitRegistry& registry) {
  Complex total = 0.0;
  for (const auto& [key, f] : coefficient.terms()) {
    if (!key.second.empty()) throw ValidationError("coefficient carries field legs");
    total += monomial_coefficient(f, key.first, times, model, registry);
  }
  return total;
}

std::vector<Complex> coefficient_samples(const WickPolynomial& coefficient, double t2, const LatticeModel& model,
                                         const SplitRegistry& registry) {
  std::vector<Complex> out(model.steps);
  const double origin = static_cast<double>(model.steps / 2);
  for (std::size_t j = 0; j < model.steps; ++j) {
    const double t1 = t2 + (static_cast<double>(j) - origin) * model.dt;
    const double times[2] = {t1, t2};
    out[j] = evaluate_coefficient(coefficient, times, model, registry);
  }
  return out;
}

DenseOperator lattice_operator(const WickPolynomial& p, std::span<const double> times, const LatticeModel& model,
                               const SplitRegistry& registry) {
  const int dim = model.levels;
  if (dim < 2) throw ValidationError("oscillator truncation too small");
  DenseOperator a = DenseOperator::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const DenseOperator adag = a.adjoint();
  const double norm = 1.0 / std::sqrt(2.0 * model.omega);

  DenseOperator total = DenseOperator::Zero(dim, dim);
  for (const auto& [key, f] : p.terms()) {
    const Complex c = monomial_coefficient(f, key.first, times, model, registry);
    if (c == Complex(0.0)) continue;
    DenseOperator term = DenseOperator::Identity(dim, dim) * c;
    for (const auto& leg : key.second) {
      if (leg.field != FieldKind::scalar) throw ValidationError("lattice model carries scalar fields only");
      const double t = times[leg.slot - 1];
      if (leg.character == Character::creation)
        term = term * (adag * (norm * std::exp(Complex(0.0, model.omega * t))));
      else
        term = term * (a * (norm * std::exp(Complex(0.0, -model.omega * t))));
    }
    total += term;
  }
  return total;
}

nlohmann::json SupportReport::to_json() const {
  return {{"retarded_leakage", retarded_leakage},
          {"advanced_leakage", advanced_leakage},
          {"causal_leakage", causal_leakage},
          {"reconstruction", reconstruction}};
}

SupportReport lattice_support_check(std::span<const Complex> d, std::span<const Complex> ret,
                                    std::span<const Complex> adv, std::size_t origin) {
  if (ret.size() != d.size() || adv.size() != d.size() || origin >= d.size())
    throw ValidationError("support check needs equal-length samples and an origin inside them");
  SupportReport r;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j < origin) r.retarded_leakage = std::max(r.retarded_leakage, std::abs(ret[j]));
    if (j > origin) r.advanced_leakage = std::max(r.advanced_leakage, std::abs(adv[j]));
    r.reconstruction = std::max(r.reconstruction, std::abs(ret[j] - adv[j] - d[j]));
  }
  // in one time dimension the two half-lines cover every lattice point
  r.causal_leakage = 0.0;
  return r;
}

}  // namespace cqft
