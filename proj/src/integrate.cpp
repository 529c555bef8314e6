#include "dfchain/integrate.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <stdexcept>

namespace dfc {

QuadratureRule gauss_legendre(int n) {
  if (n < 1 || n > 512) throw std::invalid_argument("Gauss-Legendre order must be in 1..512");
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule q;
  q.nodes = (es.eigenvalues().array() + 1.0) / 2.0;
  q.weights = es.eigenvectors().row(0).transpose().array().square();
  q.weights /= q.weights.sum();
  return q;
}

double log_multivariate_beta(const Eigen::VectorXd& theta) {
  double s = -std::lgamma(theta.sum());
  for (Eigen::Index i = 0; i < theta.size(); ++i) s += std::lgamma(theta[i]);
  return s;
}

namespace {

using boost::math::ibeta;

double ibeta_clamped(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return ibeta(a, b, x);
}

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  return ts;
}

// f(y, 1 - y); the complement is exact near y = 1, where the singular
// factor (1 - y)^(c - 1) would otherwise lose its last ulps of mass
template <typename F>
double integrate(F&& f, double a, double b) {
  if (b <= a) return 0.0;
  return integrator().integrate(
      [&](double y, double yc) { return f(y, (yc > 0.0 && b == 1.0) ? yc : 1.0 - y); }, a, b, 1e-10);
}

}  // namespace

CellMoments dirichlet_cell_moments(const SimplexGrid& grid, Eigen::Index cell, const Eigen::VectorXd& theta,
                                   bool with_moments) {
  if (theta.size() != grid.dim() + 1 || (theta.array() <= 0.0).any())
    throw std::invalid_argument("Dirichlet parameters must be positive, one per vertex");
  const double h = 1.0 / grid.resolution();
  const auto k = grid.cell(cell);
  CellMoments out;
  if (grid.dim() == 1) {
    const double a = k.i * h, b = (k.i + 1) * h;
    const double t0 = theta[0], t1 = theta[1];
    out.mass = ibeta_clamped(t1, t0, b) - ibeta_clamped(t1, t0, a);
    if (with_moments) out.m1 = t1 / (t0 + t1) * (ibeta_clamped(t1 + 1, t0, b) - ibeta_clamped(t1 + 1, t0, a));
    return out;
  }
  // Y_1 ~ Beta(t1, t0 + t2); Y_2 / (1 - Y_1) ~ Beta(t2, t0) given Y_1
  const double t0 = theta[0], t1 = theta[1], t2 = theta[2];
  const double diag = (k.i + k.j + 1) * h;
  const double y1a = k.i * h, y1b = (k.i + 1) * h;
  auto bounds = [&](double r) {
    const double lo = k.down ? (diag - 1.0) + r : k.j * h;
    const double hi = k.down ? (k.j + 1) * h : (diag - 1.0) + r;
    return std::pair<double, double>{lo / r, hi / r};
  };
  const double log_norm = std::lgamma(t1) + std::lgamma(t0 + t2) - std::lgamma(t0 + t1 + t2);
  auto marginal = [&](double y1, double r) {
    return std::exp((t1 - 1.0) * std::log(y1) + (t0 + t2 - 1.0) * std::log(r) - log_norm);
  };
  out.mass = integrate(
      [&](double y1, double r) {
        if (r <= 0.0) return 0.0;
        const auto [zl, zh] = bounds(r);
        return marginal(y1, r) * (ibeta_clamped(t2, t0, zh) - ibeta_clamped(t2, t0, zl));
      },
      y1a, y1b);
  if (!with_moments) return out;
  out.m1 = integrate(
      [&](double y1, double r) {
        if (r <= 0.0) return 0.0;
        const auto [zl, zh] = bounds(r);
        return y1 * marginal(y1, r) * (ibeta_clamped(t2, t0, zh) - ibeta_clamped(t2, t0, zl));
      },
      y1a, y1b);
  out.m2 = integrate(
      [&](double y1, double r) {
        if (r <= 0.0) return 0.0;
        const auto [zl, zh] = bounds(r);
        return marginal(y1, r) * r * t2 / (t2 + t0) *
               (ibeta_clamped(t2 + 1, t0, zh) - ibeta_clamped(t2 + 1, t0, zl));
      },
      y1a, y1b);
  return out;
}

Eigen::VectorXd dirichlet_cell_masses(const SimplexGrid& grid, const Eigen::VectorXd& theta) {
  Eigen::VectorXd m(grid.size());
  for (Eigen::Index c = 0; c < grid.size(); ++c) m[c] = std::max(0.0, dirichlet_cell_moments(grid, c, theta).mass);
  return m;
}

}  // namespace dfc
