#include "dfchain/grid.hpp"

#include <doctest.h>

#include <random>

using namespace dfc;

TEST_CASE("index and cell are inverse") {
  for (int m : {1, 2, 5, 64}) {
    const SimplexGrid g(2, m);
    CHECK(g.size() == Eigen::Index(m) * m);
    for (Eigen::Index c = 0; c < g.size(); ++c) CHECK(g.index(g.cell(c)) == c);
  }
}

TEST_CASE("centers locate to their own cell") {
  const SimplexGrid g(2, 17);
  for (Eigen::Index c = 0; c < g.size(); ++c) CHECK(g.locate(g.center(c)) == c);
  const SimplexGrid h(1, 9);
  for (Eigen::Index c = 0; c < h.size(); ++c) CHECK(h.locate(h.center(c)) == c);
}

TEST_CASE("locate agrees with a brute-force point-in-triangle test") {
  const int m = 13;
  const SimplexGrid g(2, m);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> U(0, 1);
  for (int n = 0; n < 5000; ++n) {
    double a = U(gen), b = U(gen);
    if (a + b > 1) a = 1 - a, b = 1 - b;
    int found = -1;
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      const auto v = g.corners(c);
      // barycentric weights of (a, b) in the cell triangle
      const double x0 = double(v[0][0]) / m, y0 = double(v[0][1]) / m;
      const double x1 = double(v[1][0]) / m - x0, y1 = double(v[1][1]) / m - y0;
      const double x2 = double(v[2][0]) / m - x0, y2 = double(v[2][1]) / m - y0;
      const double det = x1 * y2 - x2 * y1;
      const double s = ((a - x0) * y2 - x2 * (b - y0)) / det, t = (x1 * (b - y0) - (a - x0) * y1) / det;
      if (s > 1e-12 && t > 1e-12 && s + t < 1 - 1e-12) found = int(c);
    }
    if (found >= 0) CHECK(g.locate(a, b) == found);
  }
}

TEST_CASE("traverse splits a segment into cell pieces") {
  const SimplexGrid g(2, 20);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> U(0, 1);
  for (int n = 0; n < 500; ++n) {
    double a = U(gen), b = U(gen);
    if (a + b > 1) a = 1 - a, b = 1 - b;
    const Point x{a, b};
    const Point e = vertex(int(gen() % 3), 2);
    double total = 0, last = 0;
    bool ordered = true;
    g.traverse(x, e, [&](Eigen::Index c, double s0, double s1) {
      ordered = ordered && s0 >= last - 1e-15 && s1 > s0;
      last = s1;
      total += s1 - s0;
      const double s = 0.5 * (s0 + s1);
      CHECK(g.locate(x[0] + s * (e[0] - x[0]), x[1] + s * (e[1] - x[1])) == c);
    });
    CHECK(ordered);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("densities") {
  const SimplexGrid g(2, 8);
  const GridDensity u = GridDensity::uniform(g);
  CHECK(u.mass.sum() == doctest::Approx(1.0));
  CHECK(u.density()[0] == doctest::Approx(2.0));
  CHECK_THROWS(GridDensity(g, Eigen::VectorXd::Zero(g.size())));
  CHECK_THROWS(SimplexGrid(3, 4));
  CHECK_THROWS(SimplexGrid(2, 0));
  CHECK(l1_distance(u, u) == 0.0);
}
