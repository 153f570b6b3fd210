#pragma once

// Minkowski vectors with metric (+,-,-,-) and Dirac matrices in the Dirac
// representation.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace cqft {

using FourVector = std::array<double, 4>;
using CFourVector = std::array<std::complex<double>, 4>;
using Mat4 = Eigen::Matrix<std::complex<double>, 4, 4>;
using Spinor = Eigen::Matrix<std::complex<double>, 4, 1>;

[[nodiscard]] double dot(const FourVector& a, const FourVector& b);
[[nodiscard]] std::complex<double> dot(const CFourVector& a, const CFourVector& b);
[[nodiscard]] double energy(const std::array<double, 3>& p, double m);
[[nodiscard]] FourVector on_shell(const std::array<double, 3>& p, double m);
[[nodiscard]] double metric(int mu);  // diagonal entry g^{mu mu}

/// gamma^mu, mu = 0..3.
[[nodiscard]] const Mat4& gamma(int mu);
[[nodiscard]] Mat4 slash(const FourVector& p);
[[nodiscard]] Mat4 slash(const CFourVector& p);

/// Positive-energy spinor with ubar u = 2m; spin 0 is up along z, 1 is down.
[[nodiscard]] Spinor u_spinor(const std::array<double, 3>& p, double m, int spin);

}  // namespace cqft
