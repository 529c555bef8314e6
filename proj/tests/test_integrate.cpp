#include "dfchain/integrate.hpp"

#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <random>

using namespace dfc;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 32}) {
    const QuadratureRule q = gauss_legendre(n);
    CHECK(q.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k < 2 * n; ++k) {
      const double got = (q.weights.array() * q.nodes.array().pow(k)).sum();
      CHECK(got == doctest::Approx(1.0 / (k + 1)).epsilon(1e-12));
    }
  }
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("Beta cell masses on the interval") {
  const SimplexGrid g(1, 10);
  const Eigen::VectorXd m = dirichlet_cell_masses(g, Eigen::Vector2d(0.4, 0.6));
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-14));
  // x_1 ~ Beta(0.6, 0.4)
  CHECK(m[3] == doctest::Approx(boost::math::ibeta(0.6, 0.4, 0.4) - boost::math::ibeta(0.6, 0.4, 0.3)).epsilon(1e-13));
}

TEST_CASE("Dirichlet cell masses against Monte Carlo") {
  const Eigen::Vector3d theta(0.3, 0.5, 0.2);
  const SimplexGrid g(2, 6);
  const Eigen::VectorXd m = dirichlet_cell_masses(g, theta);
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 gen(17);
  std::gamma_distribution<double> g0(theta[0]), g1(theta[1]), g2(theta[2]);
  const int n = 1000000;
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(g.size());
  for (int k = 0; k < n; ++k) {
    const double a = g0(gen), b = g1(gen), c = g2(gen), s = a + b + c;
    hits[g.locate(b / s, c / s)] += 1;
  }
  for (Eigen::Index c = 0; c < g.size(); ++c) {
    const double sd = std::sqrt(m[c] * (1 - m[c]) / n);
    CHECK(std::abs(hits[c] / n - m[c]) <= 5 * sd + 1e-9);
  }
}

TEST_CASE("cell moments add up to the Dirichlet mean") {
  const Eigen::Vector3d theta(0.1, 0.2, 0.3);
  const SimplexGrid g(2, 8);
  double m1 = 0, m2 = 0, mass = 0;
  for (Eigen::Index c = 0; c < g.size(); ++c) {
    const CellMoments cm = dirichlet_cell_moments(g, c, theta, true);
    mass += cm.mass;
    m1 += cm.m1;
    m2 += cm.m2;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m1 == doctest::Approx(0.2 / 0.6).epsilon(1e-10));
  CHECK(m2 == doctest::Approx(0.3 / 0.6).epsilon(1e-10));
  CHECK(log_multivariate_beta(Eigen::Vector2d(1, 1)) == doctest::Approx(0.0));
}
