#include "cqft/dirac.hpp"

#include <cmath>

namespace cqft {

namespace {

std::array<Mat4, 4> make_gammas() {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  std::array<Eigen::Matrix2cd, 3> sigma;
  sigma[0] << 0, 1, 1, 0;
  sigma[1] << 0, -I, I, 0;
  sigma[2] << 1, 0, 0, -1;
  std::array<Mat4, 4> g;
  g[0].setZero();
  g[0].topLeftCorner<2, 2>().setIdentity();
  g[0].bottomRightCorner<2, 2>() = -Eigen::Matrix2cd::Identity();
  for (int k = 0; k < 3; ++k) {
    g[k + 1].setZero();
    g[k + 1].topRightCorner<2, 2>() = sigma[k];
    g[k + 1].bottomLeftCorner<2, 2>() = -sigma[k];
  }
  return g;
}

}  // namespace

double metric(int mu) { return mu == 0 ? 1.0 : -1.0; }

double dot(const FourVector& a, const FourVector& b) { return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]; }

std::complex<double> dot(const CFourVector& a, const CFourVector& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

double energy(const std::array<double, 3>& p, double m) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m); }

FourVector on_shell(const std::array<double, 3>& p, double m) { return {energy(p, m), p[0], p[1], p[2]}; }

const Mat4& gamma(int mu) {
  static const std::array<Mat4, 4> g = make_gammas();
  return g.at(static_cast<std::size_t>(mu));
}

Mat4 slash(const FourVector& p) {
  return gamma(0) * p[0] - gamma(1) * p[1] - gamma(2) * p[2] - gamma(3) * p[3];
}

Mat4 slash(const CFourVector& p) {
  return gamma(0) * p[0] - gamma(1) * p[1] - gamma(2) * p[2] - gamma(3) * p[3];
}

Spinor u_spinor(const std::array<double, 3>& p, double m, int spin) {
  using C = std::complex<double>;
  const double e = energy(p, m);
  Eigen::Vector2cd chi = spin == 0 ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
  Eigen::Matrix2cd sp;
  sp << C(p[2]), C(p[0], -p[1]), C(p[0], p[1]), C(-p[2]);
  Spinor u;
  const double n = std::sqrt(e + m);
  u.head<2>() = n * chi;
  u.tail<2>() = (sp * chi) / n;
  return u;
}

}  // namespace cqft
