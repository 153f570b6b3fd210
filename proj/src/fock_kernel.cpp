#include "cqft/fock_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "cqft/errors.hpp"

namespace cqft {

bool MomentumGrid::krein_trivial() const {
  return std::all_of(krein_sign.begin(), krein_sign.end(), [](int s) { return s == 1; });
}

void MomentumGrid::validate() const {
  if (weights.size() != points.size() || krein_sign.size() != points.size()) {
    throw ValidationError("grid: points, weights and krein_sign must have equal length");
  }
  std::set<std::tuple<double, double, double, int, int>> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(weights[i] > 0.0)) throw ValidationError("grid: weight " + std::to_string(i) + " is not positive");
    if (krein_sign[i] != 1 && krein_sign[i] != -1) throw ValidationError("grid: krein sign must be +1 or -1");
    const auto& p = points[i];
    if (p.field < 0 || static_cast<std::size_t>(p.field) >= statistics.size()) {
      throw ValidationError("grid: point " + std::to_string(i) + " refers to unknown field");
    }
    if (!seen.emplace(p.momentum[0], p.momentum[1], p.momentum[2], p.spin, p.field).second) {
      throw ValidationError("grid: duplicate (momentum, spin, field) at point " + std::to_string(i));
    }
  }
}

MomentumGrid MomentumGrid::line(std::size_t n, double pmin, double pmax, Statistics stats) {
  if (n < 2) throw ValidationError("grid: need at least two points");
  MomentumGrid g;
  const double h = (pmax - pmin) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    g.points.push_back({{pmin + h * static_cast<double>(i), 0.0, 0.0}, 0, 0});
    g.weights.push_back((i == 0 || i + 1 == n) ? h / 2 : h);
  }
  g.statistics = {stats};
  g.krein_sign.assign(n, 1);
  return g;
}

int total_particles(const Occupation& occ) {
  return std::accumulate(occ.begin(), occ.end(), 0, [](int acc, std::uint8_t n) { return acc + n; });
}

FockGridState FockGridState::vacuum(std::size_t modes, int cutoff) {
  FockGridState s = zero(modes, cutoff);
  s.amplitudes.emplace(Occupation(modes, 0), 1.0);
  return s;
}

FockGridState FockGridState::zero(std::size_t modes, int cutoff) {
  FockGridState s;
  s.modes = modes;
  s.cutoff = cutoff;
  return s;
}

FockGridState FockGridState::basis(const Occupation& occ, int cutoff) {
  if (total_particles(occ) > cutoff) throw TruncationError("basis state above cutoff");
  FockGridState s = zero(occ.size(), cutoff);
  s.amplitudes.emplace(occ, 1.0);
  return s;
}

bool FockGridState::is_zero(double tol) const {
  return std::all_of(amplitudes.begin(), amplitudes.end(), [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

Complex FockGridState::amplitude(const Occupation& occ) const {
  auto it = amplitudes.find(occ);
  return it == amplitudes.end() ? Complex{} : it->second;
}

FockGridState& FockGridState::add(const FockGridState& other, Complex factor) {
  for (const auto& [occ, amp] : other.amplitudes) amplitudes[occ] += factor * amp;
  return *this;
}

FockGridState& FockGridState::scale(Complex factor) {
  for (auto& kv : amplitudes) kv.second *= factor;
  return *this;
}

void FockGridState::prune(double tol) {
  std::erase_if(amplitudes, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

namespace {

void check_mode(const MomentumGrid& grid, std::size_t mode, const FockGridState& state) {
  if (mode >= grid.size()) throw ValidationError("mode index " + std::to_string(mode) + " outside grid");
  if (state.modes != grid.size()) throw ValidationError("state and grid disagree on the number of modes");
}

// Jordan-Wigner string: parity of fermions in modes below `mode`.
double fermi_string(const MomentumGrid& grid, std::size_t mode, const Occupation& occ) {
  int n = 0;
  for (std::size_t k = 0; k < mode; ++k) {
    if (grid.statistics_of(k) == Statistics::fermi) n += occ[k];
  }
  return (n % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

FockGridState apply_annihilation(const MomentumGrid& grid, std::size_t mode, const FockGridState& state) {
  check_mode(grid, mode, state);
  const bool fermi = grid.statistics_of(mode) == Statistics::fermi;
  const double inv_sqrt_w = 1.0 / std::sqrt(grid.weights[mode]);
  FockGridState out = FockGridState::zero(state.modes, state.cutoff);
  for (const auto& [occ, amp] : state.amplitudes) {
    if (occ[mode] == 0) continue;
    Occupation lowered = occ;
    lowered[mode] -= 1;
    double factor = fermi ? fermi_string(grid, mode, occ) : std::sqrt(static_cast<double>(occ[mode]));
    out.amplitudes[lowered] += factor * inv_sqrt_w * amp;
  }
  return out;
}

FockGridState apply_creation(const MomentumGrid& grid, std::size_t mode, const FockGridState& state) {
  check_mode(grid, mode, state);
  const bool fermi = grid.statistics_of(mode) == Statistics::fermi;
  const double inv_sqrt_w = 1.0 / std::sqrt(grid.weights[mode]);
  FockGridState out = FockGridState::zero(state.modes, state.cutoff);
  for (const auto& [occ, amp] : state.amplitudes) {
    if (amp == Complex{}) continue;
    if (fermi && occ[mode] == 1) continue;  // Pauli exclusion
    if (total_particles(occ) + 1 > state.cutoff) {
      throw TruncationError("creation on mode " + std::to_string(mode) + " exceeds particle cutoff " +
                            std::to_string(state.cutoff));
    }
    Occupation raised = occ;
    raised[mode] += 1;
    double factor = fermi ? fermi_string(grid, mode, occ) : std::sqrt(static_cast<double>(raised[mode]));
    out.amplitudes[raised] += factor * inv_sqrt_w * amp;
  }
  return out;
}

Complex pairing(const MomentumGrid& grid, const FockGridState& x, const FockGridState& y) {
  Complex sum{};
  const auto& small = x.amplitudes.size() <= y.amplitudes.size() ? x.amplitudes : y.amplitudes;
  const auto& large = x.amplitudes.size() <= y.amplitudes.size() ? y.amplitudes : x.amplitudes;
  const bool x_is_small = &small == &x.amplitudes;
  for (const auto& [occ, amp] : small) {
    auto it = large.find(occ);
    if (it == large.end()) continue;
    int sign = 1;
    for (std::size_t k = 0; k < occ.size(); ++k) {
      if (grid.krein_sign[k] < 0 && (occ[k] % 2 == 1)) sign = -sign;
    }
    const Complex xv = x_is_small ? amp : it->second;
    const Complex yv = x_is_small ? it->second : amp;
    sum += static_cast<double>(sign) * xv * std::conj(yv);
  }
  return sum;
}

Complex eta_pairing(const MomentumGrid& grid, std::span<const std::size_t> creation_modes,
                    std::span<const std::size_t> annihilation_modes, const FockGridState& phi,
                    const FockGridState& psi) {
  FockGridState cur = phi;
  for (auto it = annihilation_modes.rbegin(); it != annihilation_modes.rend(); ++it) {
    cur = apply_annihilation(grid, *it, cur);
    if (cur.amplitudes.empty()) return {};
  }
  for (auto it = creation_modes.rbegin(); it != creation_modes.rend(); ++it) {
    cur = apply_creation(grid, *it, cur);
    if (cur.amplitudes.empty()) return {};
  }
  return pairing(grid, cur, psi);
}

std::vector<Occupation> occupation_basis(const MomentumGrid& grid, int max_total) {
  std::vector<Occupation> out;
  Occupation occ(grid.size(), 0);
  // Depth-first enumeration over modes.
  auto rec = [&](auto&& self, std::size_t mode, int remaining) -> void {
    if (mode == grid.size()) {
      out.push_back(occ);
      return;
    }
    const int cap = grid.statistics_of(mode) == Statistics::fermi ? std::min(1, remaining) : remaining;
    for (int n = 0; n <= cap; ++n) {
      occ[mode] = static_cast<std::uint8_t>(n);
      self(self, mode + 1, remaining - n);
    }
    occ[mode] = 0;
  };
  rec(rec, 0, max_total);
  return out;
}

FockGridState random_state(const MomentumGrid& grid, int cutoff, int max_total, std::mt19937_64& rng, double density) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  FockGridState s = FockGridState::zero(grid.size(), cutoff);
  for (const auto& occ : occupation_basis(grid, std::min(max_total, cutoff))) {
    if (uni(rng) > density) continue;
    s.amplitudes.emplace(occ, Complex(normal(rng), normal(rng)));
  }
  return s;
}

DiscreteKernel DiscreteKernel::zero(int l, int m, std::size_t modes) {
  if (l < 0 || m < 0) throw ValidationError("kernel: negative slot count");
  DiscreteKernel k;
  k.l = l;
  k.m = m;
  k.modes = modes;
  std::size_t n = 1;
  for (int i = 0; i < l + m; ++i) n *= modes;
  k.values.assign(n, Complex{});
  return k;
}

std::vector<std::size_t> DiscreteKernel::unflatten(std::size_t flat) const {
  std::vector<std::size_t> t(static_cast<std::size_t>(l + m));
  for (std::size_t i = t.size(); i-- > 0;) {
    t[i] = flat % modes;
    flat /= modes;
  }
  return t;
}

std::size_t DiscreteKernel::flatten(std::span<const std::size_t> tuple) const {
  if (tuple.size() != static_cast<std::size_t>(l + m)) throw ValidationError("kernel: tuple length mismatch");
  std::size_t flat = 0;
  for (auto idx : tuple) {
    if (idx >= modes) throw ValidationError("kernel: tuple index outside grid");
    flat = flat * modes + idx;
  }
  return flat;
}

DiscreteKernel DiscreteKernel::adjoint() const {
  DiscreteKernel out = zero(m, l, modes);
  for (std::size_t f = 0; f < values.size(); ++f) {
    auto t = unflatten(f);
    // (d+_{p1}..d+_{pl} d_{q1}..d_{qm})^+ = d+_{qm}..d+_{q1} d_{pl}..d_{p1}
    std::vector<std::size_t> r(t.rbegin(), t.rend());
    out.values[out.flatten(r)] = std::conj(values[f]);
  }
  return out;
}

namespace {

void check_kernel(const MomentumGrid& grid, const DiscreteKernel& kernel) {
  if (kernel.modes != grid.size()) throw ValidationError("kernel defined on a grid of different size");
  std::size_t expected = 1;
  for (int i = 0; i < kernel.l + kernel.m; ++i) expected *= grid.size();
  if (kernel.values.size() != expected) throw ValidationError("kernel value count inconsistent with (l, m)");
}

double tuple_weight(const MomentumGrid& grid, std::span<const std::size_t> tuple) {
  double w = 1.0;
  for (auto i : tuple) w *= grid.weights[i];
  return w;
}

}  // namespace

FockGridState apply_xi(const MomentumGrid& grid, const DiscreteKernel& kernel, const FockGridState& phi) {
  check_kernel(grid, kernel);
  FockGridState out = FockGridState::zero(phi.modes, phi.cutoff);
  for (std::size_t f = 0; f < kernel.values.size(); ++f) {
    const Complex k = kernel.values[f];
    if (k == Complex{}) continue;
    const auto t = kernel.unflatten(f);
    FockGridState cur = phi;
    for (int i = kernel.l + kernel.m - 1; i >= kernel.l && !cur.amplitudes.empty(); --i) {
      cur = apply_annihilation(grid, t[i], cur);
    }
    for (int i = kernel.l - 1; i >= 0 && !cur.amplitudes.empty(); --i) cur = apply_creation(grid, t[i], cur);
    out.add(cur, tuple_weight(grid, t) * k);
  }
  return out;
}

Complex xi_matrix_element(const MomentumGrid& grid, const DiscreteKernel& kernel, const FockGridState& phi,
                          const FockGridState& psi) {
  check_kernel(grid, kernel);
  Complex sum{};
  for (std::size_t f = 0; f < kernel.values.size(); ++f) {
    const Complex k = kernel.values[f];
    if (k == Complex{}) continue;
    const auto t = kernel.unflatten(f);
    std::span<const std::size_t> all(t);
    sum += tuple_weight(grid, t) * k *
           eta_pairing(grid, all.first(static_cast<std::size_t>(kernel.l)), all.subspan(static_cast<std::size_t>(kernel.l)),
                       phi, psi);
  }
  return sum;
}

double commutator_check(const MomentumGrid& grid, int cutoff) {
  grid.validate();
  double worst = 0.0;
  const auto basis = occupation_basis(grid, cutoff - 1);
  for (const auto& occ : basis) {
    const FockGridState x = FockGridState::basis(occ, cutoff);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const bool anti = grid.statistics_of(i) == Statistics::fermi && grid.statistics_of(j) == Statistics::fermi;
        FockGridState lhs = apply_annihilation(grid, i, apply_creation(grid, j, x));
        const FockGridState rhs = apply_creation(grid, j, apply_annihilation(grid, i, x));
        lhs.add(rhs, anti ? 1.0 : -1.0);
        if (i == j) lhs.add(x, -1.0 / grid.weights[i]);
        for (const auto& kv : lhs.amplitudes) worst = std::max(worst, std::abs(kv.second));
      }
    }
  }
  return worst;
}

nlohmann::json to_json(const MomentumGrid& grid) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : grid.points) {
    pts.push_back({{"momentum", p.momentum}, {"spin", p.spin}, {"field", p.field}});
  }
  nlohmann::json stats = nlohmann::json::array();
  for (auto s : grid.statistics) stats.push_back(s == Statistics::bose ? "bose" : "fermi");
  return {{"points", pts}, {"weights", grid.weights}, {"statistics", stats}, {"krein_sign", grid.krein_sign}};
}

nlohmann::json to_json(const FockGridState& state) {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& [occ, amp] : state.amplitudes) {
    std::vector<int> cfg(occ.begin(), occ.end());
    amps.push_back(nlohmann::json::array({cfg, amp.real(), amp.imag()}));
  }
  return {{"modes", state.modes}, {"cutoff", state.cutoff}, {"amplitudes", amps}};
}

MomentumGrid grid_from_json(const nlohmann::json& j) {
  MomentumGrid g;
  for (const auto& p : j.at("points")) {
    g.points.push_back({p.at("momentum").get<std::array<double, 3>>(), p.value("spin", 0), p.value("field", 0)});
  }
  g.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& s : j.at("statistics")) {
    const auto name = s.get<std::string>();
    if (name != "bose" && name != "fermi") throw ValidationError("grid: unknown statistics '" + name + "'");
    g.statistics.push_back(name == "bose" ? Statistics::bose : Statistics::fermi);
  }
  g.krein_sign = j.contains("krein_sign") ? j.at("krein_sign").get<std::vector<int>>()
                                          : std::vector<int>(g.points.size(), 1);
  g.validate();
  return g;
}

FockGridState state_from_json(const nlohmann::json& j) {
  FockGridState s = FockGridState::zero(j.at("modes").get<std::size_t>(), j.at("cutoff").get<int>());
  for (const auto& t : j.at("amplitudes")) {
    const auto cfg = t.at(0).get<std::vector<int>>();
    if (cfg.size() != s.modes) throw ValidationError("state: configuration length mismatch");
    Occupation occ(cfg.begin(), cfg.end());
    if (total_particles(occ) > s.cutoff) throw TruncationError("state: configuration above cutoff");
    s.amplitudes[occ] += Complex(t.at(1).get<double>(), t.at(2).get<double>());
  }
  return s;
}

}  // namespace cqft
