#include <doctest.h>

#include <array>
#include <cmath>

#include "cqft/eg_induction.hpp"
#include "cqft/errors.hpp"

using namespace cqft;

namespace {

WickPolynomial minus(WickPolynomial a, const WickPolynomial& b) {
  a.add(b, {-1, 0});
  return a.canonicalized();
}

WickPolynomial route_difference(int n, const OrderData& lower, SplitRegistry& registry) {
  const auto step = build_Aprime_Rprime(n, lower);
  register_splits(step, registry);
  const auto assembled = assemble_Sn(step, registry);
  return minus(substitute_advanced(assembled.via_advanced, registry), assembled.via_retarded);
}

OrderData truncated(const OrderData& full, int n) {
  OrderData out;
  for (int k = 1; k <= n; ++k) out.S.emplace(k, full.S.at(k));
  out.Sbar = invert_series(out.S, n);
  return out;
}

}  // namespace

TEST_CASE("inverse series at low orders") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi3, 2, reg);
  CHECK(data.Sbar.at(1) == data.S.at(1).scaled({-1, 0}));

  // Sbar_2 = -S_2 + S_1(x1) S_1(x2) + S_1(x2) S_1(x1)
  const std::array<int, 1> one{1}, two{2};
  const auto s1a = on_slots(data.S.at(1), one), s1b = on_slots(data.S.at(1), two);
  WickPolynomial expected = data.S.at(2).scaled({-1, 0});
  expected.add(operator_product(s1a, s1b));
  expected.add(operator_product(s1b, s1a));
  CHECK(minus(data.Sbar.at(2), expected).empty());

  std::map<int, WickPolynomial> zero{{1, WickPolynomial{}}, {2, WickPolynomial{}}};
  for (const auto& [k, p] : invert_series(zero, 2)) CHECK(p.empty());
}

TEST_CASE("second-order causal commutator") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi3, 1, reg);
  const auto first = build_Aprime_Rprime(1, data);
  CHECK(first.Aprime.empty());
  CHECK(first.Rprime.empty());
  CHECK(first.partitions == 0);

  const auto step = build_Aprime_Rprime(2, data);
  const auto s1 = first_order(Interaction::phi3, 1), s2 = first_order(Interaction::phi3, 2);
  CHECK(minus(step.D, minus(operator_product(s1, s2), operator_product(s2, s1))).empty());

  SplitRegistry qreg;
  const auto qed = run_induction(Interaction::qed, 1, qreg);
  const auto qstep = build_Aprime_Rprime(2, qed);
  CHECK_FALSE(qstep.D.empty());
  WickPolynomial sym = qstep.D.relabeled({{1, 2}, {2, 1}});
  sym.add(qstep.D);
  CHECK(sym.canonicalized().empty());
}

TEST_CASE("partition count is 2^(n-1) - 1") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi2, 4, reg);
  for (int n = 2; n <= 5; ++n) {
    CHECK(build_Aprime_Rprime(n, truncated(data, n - 1)).partitions == (std::size_t{1} << (n - 1)) - 1);
  }
}

TEST_CASE("retarded and advanced assembly agree: phi^3 up to fourth order") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi3, 3, reg);
  for (int n = 2; n <= 4; ++n) CHECK(route_difference(n, truncated(data, n - 1), reg).empty());
}

TEST_CASE("retarded and advanced assembly agree: phi^2 up to fifth order") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi2, 4, reg);
  for (int n = 2; n <= 5; ++n) CHECK(route_difference(n, truncated(data, n - 1), reg).empty());
}

TEST_CASE("retarded and advanced assembly agree: QED up to third order") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::qed, 2, reg);
  CHECK(data.S.at(2).size() > 0);
  for (int n = 2; n <= 3; ++n) CHECK(route_difference(n, truncated(data, n - 1), reg).empty());
}

TEST_CASE("degenerate and invalid inductions") {
  OrderData trivial;
  trivial.S.emplace(1, WickPolynomial{});
  trivial.Sbar = invert_series(trivial.S, 1);
  const auto step = build_Aprime_Rprime(2, trivial);
  CHECK(step.D.empty());
  SplitRegistry empty_reg;
  CHECK(register_splits(step, empty_reg).empty());
  CHECK(assemble_Sn(step, empty_reg).via_retarded.empty());

  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi3, 1, reg);
  const auto real_step = build_Aprime_Rprime(2, data);
  SplitRegistry none;
  CHECK_THROWS_AS((void)assemble_Sn(real_step, none), ValidationError);
  CHECK_THROWS_AS((void)build_Aprime_Rprime(3, data), ValidationError);
  CHECK_THROWS_AS((void)build_Aprime_Rprime(6, data), ValidationError);
  CHECK_THROWS_AS((void)run_induction(Interaction::phi3, 6, reg), ValidationError);
  CHECK_THROWS_AS((void)interaction_from_string("phi4"), ValidationError);
}

TEST_CASE("lattice second order is the chronological product off the diagonal") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi3, 2, reg);
  LatticeModel model;
  model.levels = 14;
  const int keep = model.levels - 7;
  const auto s1 = first_order(Interaction::phi3, 1);
  const std::array<double, 1> early{0.1}, late{0.3};
  const DenseOperator a_late = lattice_operator(s1, late, model, reg);
  const DenseOperator a_early = lattice_operator(s1, early, model, reg);
  const DenseOperator chrono = a_late * a_early;
  const double scale = chrono.topLeftCorner(keep, keep).norm();
  REQUIRE(scale > 0.0);
  for (const std::array<double, 2> times : {std::array{0.3, 0.1}, std::array{0.1, 0.3}}) {
    const DenseOperator s2 = lattice_operator(data.S.at(2), times, model, reg);
    CHECK((s2 - chrono).topLeftCorner(keep, keep).norm() <= 1e-6 * scale);
  }
  const std::array<double, 2> off_lattice{0.3, 0.1234};
  CHECK_THROWS_AS((void)lattice_operator(data.S.at(2), off_lattice, model, reg), ValidationError);
}

TEST_CASE("lattice split supports") {
  SplitRegistry reg;
  const auto data = run_induction(Interaction::phi3, 2, reg);
  REQUIRE_FALSE(reg.retarded.empty());
  const LatticeModel model;
  const std::size_t origin = model.steps / 2;
  for (const auto& [name, coefficient] : reg.retarded) {
    const std::string hash = name.substr(4);
    std::vector<IndexRef> indices;
    WickPolynomial ret, adv;
    ret.add(GaussInt::one(), {Atom{"ret:" + hash, {1, 2}, indices}}, {});
    adv.add(GaussInt::one(), {Atom{"adv:" + hash, {1, 2}, indices}}, {});
    const auto d = coefficient_samples(coefficient, 0.0, model, reg);
    const auto r = coefficient_samples(ret, 0.0, model, reg);
    const auto a = coefficient_samples(adv, 0.0, model, reg);
    const auto good = lattice_support_check(d, r, a, origin);
    CHECK(good.retarded_leakage <= 1e-8);
    CHECK(good.advanced_leakage <= 1e-8);
    CHECK(good.causal_leakage == 0.0);
    CHECK(good.reconstruction <= 1e-8);
    const auto swapped = lattice_support_check(d, a, r, origin);
    CHECK(swapped.retarded_leakage > 1e-2);
  }
}
