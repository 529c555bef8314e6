#include "dfchain/simplex.hpp"

#include <doctest.h>

#include <random>

using namespace dfc;

TEST_CASE("vertices") {
  CHECK(vertex(0, 2).coords() == Eigen::Vector2d(0, 0));
  CHECK(vertex(1, 2).coords() == Eigen::Vector2d(1, 0));
  CHECK(vertex(2, 3).coords() == Eigen::Vector3d(0, 1, 0));
  CHECK_THROWS_AS(vertex(3, 2), DomainError);
  CHECK_THROWS_AS(vertex(-1, 2), DomainError);
}

TEST_CASE("segment map") {
  const Point x{0.3, 0.4};
  CHECK(segment_map(1, 0.0, x).coords() == Eigen::Vector2d(1, 0));
  CHECK(segment_map(0, 1.0, x).coords() == x.coords());
  const Point y = segment_map(2, 0.5, x);
  CHECK(y[0] == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(segment_map(1, 1.5, x), DomainError);
  CHECK_THROWS_AS(segment_map(1, -0.1, x), DomainError);
  // a vertex maps to itself
  CHECK(segment_map(2, 0.3, vertex(2, 2)).coords() == vertex(2, 2).coords());
}

TEST_CASE("segment parameter") {
  const Point x{0.3, 0.4};
  CHECK(segment_param(x, Point{0.15, 0.2}, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(segment_param(x, Point{0.825, 0.1}, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(segment_param(x, Point{0.5, 0.5}, 2), DomainError);
  CHECK_THROWS_AS(segment_param(vertex(1, 2), Point{0.5, 0.5}, 1), DomainError);
}

TEST_CASE("round trip and closure on random inputs") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::exponential_distribution<double> E(1.0);
  for (int d = 1; d <= 5; ++d)
    for (int n = 0; n < 2000; ++n) {
      Bary b(d + 1);
      for (int k = 0; k <= d; ++k) b[k] = E(gen);
      const Point x = Point::from_barycentric(b / b.sum());
      const int i = int(gen() % (d + 1));
      const double t = 0.01 + 0.98 * U(gen);
      const Point y = segment_map(i, t, x);
      CHECK((y.coords().array() >= 0.0).all());
      CHECK(y.coords().sum() <= 1.0);
      if ((x.coords() - vertex(i, d).coords()).norm() > 1e-6) CHECK(std::abs(segment_param(x, y, i) - t) <= 1e-10);
      CHECK(std::abs(y.barycentric().sum() - 1.0) <= 1e-14);
    }
}

TEST_CASE("membership tolerance") {
  // within 1e-12 is clamped, beyond it rejected
  const Point a{-5e-13, 0.5};
  CHECK(a[0] == 0.0);
  const Point b{0.6, 0.4 + 5e-13};
  CHECK(b.coords().sum() <= 1.0);
  CHECK_THROWS_AS((Point{-1e-9, 0.5}), DomainError);
  CHECK_THROWS_AS((Point{0.6, 0.4 + 1e-9}), DomainError);
  CHECK_THROWS_AS((Point{std::nan(""), 0.1}), DomainError);
  CHECK(Point{0.2, 0.3}.bary(0) == doctest::Approx(0.5));
}
