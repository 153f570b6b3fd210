#include "cqft/splitting_engine.hpp"

#include <cmath>
#include <numbers>

#include "cqft/errors.hpp"

namespace cqft {

double SubtractionPoint::location() const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::mass_shell: return parameter * parameter;
    case Kind::value: return parameter;
  }
  return 0.0;
}

int ambiguity_dimension(int omega) { return omega < 0 ? 0 : omega + 1; }

SpectralLine spectral_line(const CausalDistribution& d) {
  if (!d.line) throw ValidationError("distribution '" + d.name + "' has no line representation");
  return {d.line, d.breakpoints, d.support_lo, d.support_hi};
}

namespace {

Complex polynomial(std::span<const Complex> c, Complex dx) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * dx + *it;
  return acc;
}

}  // namespace

SplitResult split(const CausalDistribution& d, const SplitSpec& spec, const QuadratureOptions& opts) {
  if (d.support != SupportTag::causal) throw ValidationError("split requires a distribution with causal support");
  SplitResult out;
  const int dim = ambiguity_dimension(spec.omega);
  out.subtractions = dim;
  if (dim == 0) {
    if (!spec.normalization.empty()) out.warnings.emplace_back("constants ignored");
  } else {
    if (spec.normalization.empty() && !spec.subtraction_point) {
      throw ValidationError("normalization constants or a subtraction point are required for omega >= 0");
    }
    if (!spec.normalization.empty() && static_cast<int>(spec.normalization.size()) != dim) {
      throw ValidationError("expected " + std::to_string(dim) + " normalization constants");
    }
    out.constants = spec.normalization;
    out.constants.resize(static_cast<std::size_t>(dim), Complex(0.0));
    out.x0 = spec.subtraction_point ? spec.subtraction_point->location() : 0.0;
  }

  const SpectralLine line = spectral_line(d);
  const int n = out.subtractions;
  const double x0 = out.x0;
  const std::vector<Complex> c = out.constants;

  auto ret_at = [line, n, x0, c, opts](Complex z) {
    if (z.imag() < 0) throw ValidationError("retarded part is continued only into the upper half-plane");
    return cauchy_transform(line, z, n, x0, opts) + polynomial(c, z - x0);
  };
  auto adv_at = [line, n, x0, c, opts](Complex z) {
    if (z.imag() > 0) throw ValidationError("advanced part is continued only into the lower half-plane");
    if (z.imag() == 0) return cauchy_transform(line, z, n, x0, opts) - line.density(z.real()) + polynomial(c, z - x0);
    return cauchy_transform(line, z, n, x0, opts) + polynomial(c, z - x0);
  };

  auto make = [&](std::string suffix, SupportTag tag) {
    CausalDistribution r;
    r.name = d.name + suffix;
    r.masses = d.masses;
    r.omega = d.omega;
    r.support = tag;
    r.breakpoints = d.breakpoints;
    return r;
  };
  out.retarded = make(".ret", SupportTag::retarded);
  out.retarded.line = [ret_at](double x) { return ret_at(Complex(x, 0.0)); };
  out.retarded.analytic = ret_at;
  out.advanced = make(".adv", SupportTag::advanced);
  out.advanced.line = [adv_at](double x) { return adv_at(Complex(x, 0.0)); };
  out.advanced.analytic = adv_at;
  return out;
}

Complex inverse_fourier_regularized(const std::function<Complex(double)>& f, double t, double cutoff, double dk) {
  if (!(cutoff > 0 && dk > 0)) throw ValidationError("cutoff and step must be positive");
  const double kmax = 7.0 * cutoff;
  const auto steps = static_cast<long>(std::ceil(kmax / dk));
  Complex sum = 0.0;
  for (long j = -steps; j <= steps; ++j) {
    const double k = static_cast<double>(j) * dk;
    const double reg = std::exp(-(k / cutoff) * (k / cutoff));
    sum += f(k) * reg * std::exp(Complex(0.0, -k * t));
  }
  return sum * dk / (2.0 * std::numbers::pi);
}

namespace {

std::vector<Complex> dft(std::span<const Complex> x, int sign) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += x[j] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

LatticeSplit lattice_split(std::span<const Complex> samples, std::size_t origin) {
  const std::size_t n = samples.size();
  if (n == 0 || origin >= n) throw ValidationError("lattice origin out of range");
  std::vector<Complex> step(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) step[j] = j > origin ? 1.0 : (j == origin ? 0.5 : 0.0);

  // Pointwise product in time = circular convolution of the spectra / n.
  const auto d_hat = dft(samples, -1);
  const auto s_hat = dft(step, -1);
  std::vector<Complex> conv(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) acc += d_hat[q] * s_hat[(k + n - q) % n];
    conv[k] = acc / static_cast<double>(n);
  }
  LatticeSplit out;
  out.retarded = dft(conv, +1);
  for (auto& v : out.retarded) v /= static_cast<double>(n);
  out.advanced.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.advanced[j] = out.retarded[j] - samples[j];
  return out;
}

}  // namespace cqft
