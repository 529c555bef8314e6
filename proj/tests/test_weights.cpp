#include "dfchain/weights.hpp"

#include <doctest.h>

#include <cmath>

using namespace dfc;

namespace {
Eigen::VectorXd v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }
}  // namespace

TEST_CASE("constant and affine evaluation") {
  const Bary p = eval(WeightSpec::constant(v3(0.3, 0.5, 0.2)), Point{0.1, 0.7});
  CHECK(p[0] == 0.3);
  CHECK(p[1] == 0.5);
  const Bary q = eval(WeightSpec::affine(v3(0.1, 0.2, 0.3)), Point{0.5, 0.25});
  CHECK(q[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(q[2] == doctest::Approx(0.4).epsilon(1e-14));
  // |theta| = 1 is the constant case
  const Bary r = eval(WeightSpec::affine(v3(0.2, 0.3, 0.5)), Point{0.6, 0.1});
  CHECK((r - v3(0.2, 0.3, 0.5)).norm() < 1e-15);
  CHECK_THROWS(WeightSpec::affine(v3(0.5, 0.5, 0.5)));
  CHECK_THROWS(WeightSpec::constant(v3(0.5, 0.6, 0.1)));
}

TEST_CASE("programmatic output is validated") {
  const WeightSpec bad = WeightSpec::programmatic(2, "bad", [](const Bary& y) {
    Bary p = y;
    p[0] += 0.1;
    return p;
  });
  try {
    eval(bad, Point{0.2, 0.3});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.x[1] == doctest::Approx(0.2));
  }
  const WeightSpec neg = WeightSpec::programmatic(1, "neg", [](const Bary&) { return Bary(Eigen::Vector2d(1.5, -0.5)); });
  CHECK_THROWS_AS(eval(neg, Point{0.5}), ValidationError);
}

TEST_CASE("tabulated interpolation") {
  Eigen::MatrixXd V(3, 3);
  V << 1, 0, 0, 0, 0.5, 0.5, 0.2, 0.2, 0.6;
  const WeightSpec s = WeightSpec::vertex_interpolated(V);
  // barycentric mix of the rows
  const Point x{0.25, 0.5};
  const Bary want = 0.25 * V.row(0).transpose() + 0.25 * V.row(1).transpose() + 0.5 * V.row(2).transpose();
  CHECK((eval(s, x) - want).norm() < 1e-14);
  for (int i = 0; i < 3; ++i) CHECK((eval(s, vertex(i, 2)) - V.row(i).transpose()).norm() < 1e-15);
}

TEST_CASE("boundary profile") {
  const BoundaryProfile bp = boundary_profile(WeightSpec::builtin("shadowed_hexagon", 2), 64);
  for (int i = 0; i < 3; ++i) {
    CHECK(bp.vertex_values.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(bp.edge_support[i].size() == 2);
    CHECK(bp.edge_support[i][0].lo == 0.0);
    CHECK(bp.edge_support[i][0].hi == doctest::Approx(1.0 / 3).epsilon(1e-8));
    CHECK(bp.edge_support[i][1].lo == doctest::Approx(2.0 / 3).epsilon(1e-8));
    CHECK(bp.edge_support[i][1].hi == 1.0);
  }
  CHECK(bp.vertex_values(0, 0) == doctest::Approx(0.6));
  const BoundaryProfile b3 = boundary_profile(WeightSpec::builtin("barycentric", 2), 32);
  for (int i = 0; i < 3; ++i) CHECK(b3.empty(i));
  CHECK_THROWS(boundary_profile(WeightSpec::builtin("barycentric", 2), 8));
  CHECK_THROWS(boundary_profile(WeightSpec::builtin("barycentric", 3), 32));
}

TEST_CASE("Holder constants of affine weights") {
  // p_i = theta_i + 0.4 y_i: Lipschitz constant 0.4 for i >= 1, 0.4 sqrt 2 for p_0 = theta_0 + 0.4 (1 - y_1 - y_2)
  const HolderEstimate h = holder_constant(WeightSpec::affine(v3(0.1, 0.2, 0.3)), 1.0, 20000);
  CHECK(h.per_weight[1] <= 0.4 + 1e-9);
  CHECK(h.per_weight[1] > 0.39);
  CHECK(h.per_weight[2] > 0.39);
  CHECK(h.per_weight[0] <= 0.4 * std::sqrt(2.0) + 1e-9);
  CHECK(h.per_weight[0] > 0.4 * std::sqrt(2.0) * 0.98);
  CHECK_FALSE(h.possibly_not_holder);
  // a jump is flagged
  const WeightSpec step = WeightSpec::programmatic(1, "step", [](const Bary& y) {
    return Bary(y[1] < 0.5 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1));
  });
  CHECK(holder_constant(step, 1.0, 20000).possibly_not_holder);
}

TEST_CASE("json round trip and diagnostics") {
  const auto j = nlohmann::json::parse(R"({"kind":"tabulated","dim":2,"grid":{"resolution":1,"interpolation":"linear",
    "values":[[1,0,0],[0,0.5,0.5],[0,0.5,0.5]]}})");
  const WeightSpec s = weights_from_json(j);
  CHECK(s.kind() == WeightKind::Tabulated);
  CHECK(to_json(s)["grid"]["values"] == j["grid"]["values"]);
  const WeightSpec a = weights_from_json(to_json(WeightSpec::affine(v3(0.1, 0.2, 0.3))));
  CHECK(eval(a, Point{0.5, 0.25})[1] == doctest::Approx(0.4));
  CHECK_THROWS_AS(weights_from_json(nlohmann::json::parse(R"({"kind":"constant"})")), std::invalid_argument);
  CHECK_THROWS_AS(weights_from_json(nlohmann::json::parse(R"({"kind":"cubic","p":[1]})")), std::invalid_argument);
  CHECK_THROWS_AS(load_weights("/nonexistent.json"), std::invalid_argument);
}
