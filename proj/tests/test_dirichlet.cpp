#include "dfchain/dirichlet.hpp"

#include <doctest.h>

#include <cmath>

using namespace dfc;

TEST_CASE("density") {
  const DirichletParams p(Eigen::Vector3d(1, 1, 1));
  CHECK(density(p, Point{0.2, 0.3}).value == doctest::Approx(2.0));
  const DirichletParams q(Eigen::Vector3d(2, 3, 4));
  // Gamma(9) / (Gamma(2) Gamma(3) Gamma(4)) y0 y1^2 y2^3
  const double c = 40320.0 / (1 * 2 * 6);
  CHECK(density(q, Point{0.2, 0.3}).value == doctest::Approx(c * 0.5 * 0.04 * 0.027).epsilon(1e-12));
  const DensityValue edge = density(DirichletParams(Eigen::Vector3d(0.5, 1, 1)), Point{0.5, 0.5});
  CHECK(edge.infinite);
  CHECK(density(q, Point{0.0, 0.3}).value == 0.0);
  CHECK_THROWS(DirichletParams(Eigen::Vector3d(1, 0, 1)));
}

TEST_CASE("moments") {
  const Moments m = moments(DirichletParams(Eigen::Vector3d(0.1, 0.2, 0.3)));
  CHECK(m.mean[0] == doctest::Approx(1.0 / 6));
  CHECK(m.mean[2] == doctest::Approx(0.5));
  // var = a_i (s - a_i) / (s^2 (s + 1)), cov = -a_i a_j / (s^2 (s + 1))
  const double s = 0.6, k = s * s * (s + 1);
  CHECK(m.cov(1, 1) == doctest::Approx(0.2 * 0.4 / k));
  CHECK(m.cov(0, 2) == doctest::Approx(-0.03 / k));
}

TEST_CASE("sampler and goodness of fit") {
  const DirichletParams p(Eigen::Vector3d(0.1, 0.2, 0.3));
  Philox4x32 rng(3, 0);
  Eigen::MatrixXd x(20000, 2);
  for (Eigen::Index k = 0; k < x.rows(); ++k) x.row(k) = sample(p, rng).coords().transpose();
  CHECK(x.col(0).mean() == doctest::Approx(1.0 / 3).epsilon(0.02));
  const FitReport ok = goodness_of_fit(x, p, 16);
  CHECK(ok.pass);
  CHECK(ok.tests == 7);
  const FitReport bad = goodness_of_fit(x, DirichletParams(Eigen::Vector3d(0.15, 0.2, 0.3)), 16);
  CHECK_FALSE(bad.pass);
  CHECK(to_json(ok)["pass"] == true);
}

TEST_CASE("Kolmogorov tail") {
  // the classical 5% and 1% points of sqrt(n) D
  const std::int64_t n = 1000000;
  CHECK(kolmogorov_pvalue(1.3581 / std::sqrt(double(n)), n) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(kolmogorov_pvalue(1.6276 / std::sqrt(double(n)), n) == doctest::Approx(0.01).epsilon(0.01));
  CHECK(kolmogorov_pvalue(0.0, n) == doctest::Approx(1.0));
}

TEST_CASE("cell masses") {
  const SimplexGrid g(2, 10);
  const Eigen::VectorXd m = cell_masses(DirichletParams(Eigen::Vector3d(0.3, 0.5, 0.2)), g);
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.minCoeff() > 0.0);
}
