#include "dfchain/absorbing.hpp"
#include "dfchain/validation.hpp"

#include <doctest.h>

using namespace dfc;

namespace {
WeightSpec d1(double p00, double p11) {
  Eigen::MatrixXd V(2, 2);
  V << p00, 1 - p00, 1 - p11, p11;
  return WeightSpec::vertex_interpolated(V);
}
}  // namespace

TEST_CASE("interval classes") {
  CHECK(classify_d1(d1(1, 1)).kind == D1Class::BothEndpoints);
  CHECK(classify_d1(WeightSpec::constant(Eigen::Vector2d(0.5, 0.5))).kind == D1Class::FullInterval);
  // {1} is absorbing when p_1(1) = 1: the chain at 1 moves to t + (1 - t) = 1
  const D1Classification one = classify_d1(d1(0.9, 1));
  CHECK(one.kind == D1Class::OnlyOne);
  REQUIRE(one.members.size() == 1);
  CHECK(one.members[0].a == 1);
  CHECK(classify_d1(d1(1, 0.9)).kind == D1Class::OnlyZero);
  CHECK(classify_d1(d1(1 - 1e-7, 0.5)).warnings.size() == 1);
  CHECK(classify_d1(d1(1 - 1e-7, 0.5)).kind == D1Class::FullInterval);
}

TEST_CASE("triangle fixtures") {
  for (D2Class c : {D2Class::ThreeVertices, D2Class::TwoVertices, D2Class::OneVertex, D2Class::OneEdge,
                    D2Class::VertexPlusOppositeEdge, D2Class::InteriorCompact}) {
    const D2Classification r = classify_d2(d2_fixture(c));
    CHECK(r.kind == c);
    CHECK_FALSE(r.trace.empty());
  }
  const D2Classification vpe = classify_d2(d2_fixture(D2Class::VertexPlusOppositeEdge));
  REQUIRE(vpe.members.size() == 2);
  CHECK(vpe.members[0].label() == "e0");
  CHECK(vpe.members[1].label() == "[e1,e2]");
  const D2Classification flat = classify_d2(WeightSpec::constant(Eigen::Vector3d(1. / 3, 1. / 3, 1. / 3)));
  CHECK(flat.reached_full_simplex);
  CHECK_THROWS(classify_d2(d2_fixture(D2Class::OneEdge), KnOptions{8, 64, 1e-4}));
}

TEST_CASE("K_n iteration") {
  const SimplexGrid g(2, 32);
  const WeightSpec flat = WeightSpec::constant(Eigen::Vector3d(0.3, 0.3, 0.4));
  CHECK(iterate_Kn(flat, Region2D::full(g)).is_full());
  // a small blob around the barycenter grows to the whole triangle in one step
  Region2D blob(g);
  for (Eigen::Index c = 0; c < g.size(); ++c)
    if ((g.center(c).coords() - barycenter<double>(2).coords()).norm() < 0.15) blob.insert(c);
  const Region2D next = iterate_Kn(flat, blob);
  CHECK(next.count() >= blob.count());
  for (Eigen::Index c = 0; c < g.size(); ++c)
    if (blob.contains(c)) CHECK(next.contains(c));
  CHECK(next.count() > 2 * blob.count());
  // the shadowed hexagon is a fixed point already at K_0
  const WeightSpec hex = WeightSpec::builtin("shadowed_hexagon", 2);
  const Region2D k0 = initial_region(boundary_profile(hex, 65), g);
  CHECK(iterate_Kn(hex, k0) == k0);
  CHECK_FALSE(k0.is_full());
  CHECK(k0.boundary().size() == 2);
}

TEST_CASE("escape estimates") {
  const WeightSpec bar = WeightSpec::builtin("barycentric", 2);
  const SimplexGrid g(2, 16);
  CHECK(verify_absorbing(bar, MemberSet{MemberSet::Kind::Region, 0, 0, Region2D::full(g)}).max_escape == 0.0);
  CHECK(verify_absorbing(bar, MemberSet{MemberSet::Kind::Vertex, 0, 0, std::nullopt}).max_escape == 0.0);
  Eigen::MatrixXd V(3, 3);
  V << 1, 0, 0, 0.5, 0.5, 0, 0, 0, 1;
  const EscapeReport e = verify_absorbing(WeightSpec::vertex_interpolated(V), MemberSet{MemberSet::Kind::Vertex, 1, 1, std::nullopt});
  CHECK(e.max_escape >= 0.5);
  REQUIRE(e.witnesses.size() == 1);
  CHECK(e.witnesses[0][1] == 1.0);
}

TEST_CASE("report json") {
  const auto j = to_json(classify_d2(d2_fixture(D2Class::InteriorCompact)));
  CHECK(j["class"] == "InteriorCompact");
  CHECK(j["kn"]["converged"] == true);
  CHECK(j["thresholds"]["eps_one"] == 1e-9);
  CHECK(to_json(classify_d1(d1(1, 1)))["members"].size() == 2);
}
