#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "cqft/errors.hpp"
#include "cqft/fock_kernel.hpp"
#include "support/oracles.hpp"

using namespace cqft;
using oracle::DenseFock;

namespace {

MomentumGrid four_modes(Statistics st) { return MomentumGrid::line(4, 0.5, 2.0, st); }

}  // namespace

TEST_CASE("annihilation on the vacuum gives zero") {
  const auto grid = four_modes(Statistics::bose);
  CHECK(apply_annihilation(grid, 2, FockGridState::vacuum(4, 3)).is_zero());
}

TEST_CASE("one particle created then annihilated gives 1/w") {
  for (auto st : {Statistics::bose, Statistics::fermi}) {
    const auto grid = four_modes(st);
    const auto one = apply_creation(grid, 1, FockGridState::vacuum(4, 3));
    const auto back = apply_annihilation(grid, 1, one);
    CHECK(back.amplitude(Occupation(4, 0)).real() == doctest::Approx(1.0 / grid.weights[1]).epsilon(1e-14));
    CHECK(apply_annihilation(grid, 2, one).is_zero());
  }
}

TEST_CASE("fermi double creation vanishes, bose double creation carries sqrt 2") {
  auto fgrid = four_modes(Statistics::fermi);
  auto bgrid = four_modes(Statistics::bose);
  const auto vac = FockGridState::vacuum(4, 3);
  CHECK(apply_creation(fgrid, 0, apply_creation(fgrid, 0, vac)).is_zero());
  const auto two = apply_creation(bgrid, 0, apply_creation(bgrid, 0, vac));
  Occupation occ{2, 0, 0, 0};
  CHECK(std::abs(two.amplitude(occ)) == doctest::Approx(std::sqrt(2.0) / bgrid.weights[0]).epsilon(1e-14));
}

TEST_CASE("creation above the cutoff signals truncation") {
  const auto grid = four_modes(Statistics::bose);
  auto s = FockGridState::basis({1, 1, 0, 0}, 2);
  CHECK_THROWS_AS((void)apply_creation(grid, 3, s), TruncationError);
}

TEST_CASE("ladder operators agree with the dense Kronecker oracle") {
  for (auto st : {Statistics::bose, Statistics::fermi}) {
    const auto grid = four_modes(st);
    const int cutoff = 3;
    DenseFock dense(grid, cutoff);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = random_state(grid, cutoff, cutoff - 1, rng);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXcd a = dense.lower[i] * dense.vec(s);
        const Eigen::VectorXcd c = dense.lower[i].adjoint() * dense.vec(s);
        CHECK((dense.vec(apply_annihilation(grid, i, s)) - a).norm() <= 1e-12 * (1 + a.norm()));
        CHECK((dense.vec(apply_creation(grid, i, s)) - c).norm() <= 1e-12 * (1 + c.norm()));
      }
    }
  }
}

TEST_CASE("commutator check on a six-mode grid") {
  for (auto st : {Statistics::bose, Statistics::fermi}) {
    CHECK(commutator_check(MomentumGrid::line(6, 0.5, 2.0, st), 3) <= 1e-12);
  }
}

TEST_CASE("eta pairing special cases") {
  const auto grid = four_modes(Statistics::bose);
  std::mt19937_64 rng(3);
  const auto a = random_state(grid, 3, 2, rng);
  const auto b = random_state(grid, 3, 2, rng);
  CHECK(std::abs(eta_pairing(grid, {}, {}, a, b) - pairing(grid, a, b)) <= 1e-14);

  const auto vac = FockGridState::vacuum(4, 3);
  const auto one = FockGridState::basis({0, 1, 0, 0}, 3);
  const std::size_t m1[] = {1}, m2[] = {2};
  CHECK(std::abs(eta_pairing(grid, {}, m1, one, vac) - 1.0 / std::sqrt(grid.weights[1])) <= 1e-14);
  CHECK(std::abs(eta_pairing(grid, {}, m2, one, vac)) == 0.0);
  CHECK(std::abs(eta_pairing(grid, m1, {}, vac, vac)) == 0.0);
}

TEST_CASE("kernel matrix elements agree with dense operator application") {
  for (auto st : {Statistics::bose, Statistics::fermi}) {
    const auto grid = four_modes(st);
    const int cutoff = 3;
    DenseFock dense(grid, cutoff);
    std::mt19937_64 rng(st == Statistics::bose ? 5 : 6);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
      const int l = static_cast<int>(rng() % 3), m = static_cast<int>(rng() % 3);
      auto k = DiscreteKernel::zero(l, m, grid.size());
      for (auto& v : k.values) v = {g(rng), g(rng)};
      const auto phi = random_state(grid, cutoff, std::max(0, cutoff - l), rng);
      const auto psi = random_state(grid, cutoff, cutoff, rng);

      const Complex expected = oracle::dense_matrix_element(dense, grid, k, phi, psi);
      const Complex got = xi_matrix_element(grid, k, phi, psi);
      CHECK(std::abs(got - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("matrix elements are linear in the kernel and conjugate symmetric") {
  const auto grid = four_modes(Statistics::fermi);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  auto k1 = DiscreteKernel::zero(1, 1, 4), k2 = DiscreteKernel::zero(1, 1, 4);
  for (auto& v : k1.values) v = {g(rng), g(rng)};
  for (auto& v : k2.values) v = {g(rng), g(rng)};
  auto sum = k1;
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] = k1.values[i] + Complex(0, 2) * k2.values[i];
  const auto phi = random_state(grid, 3, 3, rng), psi = random_state(grid, 3, 3, rng);
  const Complex lin = xi_matrix_element(grid, k1, phi, psi) + Complex(0, 2) * xi_matrix_element(grid, k2, phi, psi);
  CHECK(std::abs(xi_matrix_element(grid, sum, phi, psi) - lin) <= 1e-12);
  const Complex fwd = xi_matrix_element(grid, k1, phi, psi);
  const Complex adj = xi_matrix_element(grid, k1.adjoint(), psi, phi);
  CHECK(std::abs(fwd - std::conj(adj)) <= 1e-12);
}

TEST_CASE("krein signs enter the pairing") {
  auto grid = four_modes(Statistics::bose);
  grid.krein_sign = {1, -1, 1, 1};
  const auto one = FockGridState::basis({0, 1, 0, 0}, 2);
  CHECK(pairing(grid, one, one).real() == doctest::Approx(-1.0));
  // <<A Phi, Psi>> = conj(<<A^+ Psi, Phi>>) with the Krein adjoint A^+ = eta A^* eta
  auto eta = [&](FockGridState x) {
    for (auto& [occ, amp] : x.amplitudes)
      for (std::size_t m = 0; m < occ.size(); ++m)
        if (grid.krein_sign[m] < 0 && occ[m] % 2 == 1) amp = -amp;
    return x;
  };
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const auto phi = random_state(grid, 3, 2, rng), psi = random_state(grid, 3, 2, rng);
  auto k = DiscreteKernel::zero(1, 1, 4);
  for (auto& v : k.values) v = {g(rng), g(rng)};
  const Complex lhs = xi_matrix_element(grid, k, phi, psi);
  const Complex rhs = std::conj(pairing(grid, eta(apply_xi(grid, k.adjoint(), eta(psi))), phi));
  CHECK(std::abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("smooth kernels converge under grid refinement") {
  // <<Xi(k) Phi0, Psi>> with Psi = Xi(f) Phi0 approximates \int k f.
  auto value = [](std::size_t n) {
    const auto grid = MomentumGrid::line(n, 0.5, 2.0, Statistics::bose);
    auto k = DiscreteKernel::zero(1, 0, n), f = DiscreteKernel::zero(1, 0, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = grid.points[i].momentum[0];
      k.values[i] = std::exp(-p * p);
      f.values[i] = std::cos(p);
    }
    const auto vac = FockGridState::vacuum(n, 1);
    return xi_matrix_element(grid, k, vac, apply_xi(grid, f, vac)).real();
  };
  const double e1 = std::abs(value(5) - value(40)), e2 = std::abs(value(9) - value(40));
  CHECK(e2 < 0.35 * e1);
}

TEST_CASE("grid and state survive a JSON round trip") {
  const auto grid = four_modes(Statistics::fermi);
  std::mt19937_64 rng(1);
  const auto s = random_state(grid, 2, 2, rng);
  const auto g2 = grid_from_json(to_json(grid));
  const auto s2 = state_from_json(to_json(s));
  CHECK(g2.weights == grid.weights);
  CHECK(std::abs(pairing(grid, s, s) - pairing(g2, s2, s2)) <= 1e-14);
}
