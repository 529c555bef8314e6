#include "dfchain/absorbing.hpp"
#include "dfchain/ifs.hpp"
#include "dfchain/validation.hpp"

#include <doctest.h>

using namespace dfc;

TEST_CASE("contraction coefficient") {
  CHECK(contraction_coefficient(1.0) == 0.5);
  CHECK(contraction_coefficient(0.5) == doctest::Approx(2.0 / 3));
  CHECK(contraction_coefficient(1e-9) < 1.0);
  CHECK(contraction_coefficient(1e-9) > 0.999999);
  CHECK(contraction_coefficient(0.3) > contraction_coefficient(0.4));
  CHECK_THROWS(contraction_coefficient(0.0));
  CHECK_THROWS(contraction_coefficient(1.5));
}

TEST_CASE("verdicts") {
  CHECK(check_uniqueness(WeightSpec::constant(Eigen::Vector3d(0.3, 0.5, 0.2))).verdict == Verdict::UniqueByConstantWeights);
  const UniquenessReport a = check_uniqueness(WeightSpec::affine(Eigen::Vector3d(0.1, 0.2, 0.3)));
  CHECK(a.verdict == Verdict::UniqueByH1H2H3);
  CHECK(a.certified);
  REQUIRE(a.h3_index);
  CHECK(a.delta == 0.1);
  CHECK(a.r == 0.5);
  const UniquenessReport b = check_uniqueness(WeightSpec::builtin("barycentric", 2));
  CHECK(b.verdict == Verdict::Inconclusive);
  CHECK_FALSE(b.h3_index);
  // a programmatic spec bounded away from zero gets an uncertified verdict
  const WeightSpec soft = WeightSpec::programmatic(2, "soft", [](const Bary& y) { return Bary(0.25 * y.array() + 0.25); });
  const UniquenessReport c = check_uniqueness(soft);
  CHECK(c.verdict == Verdict::UniqueByH1H2H3);
  CHECK_FALSE(c.certified);
  CHECK(c.delta == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("grid minimum matches the analytic affine minimum") {
  const Eigen::Vector3d theta(0.1, 0.2, 0.3);
  const WeightSpec aff = WeightSpec::affine(theta);
  const WeightSpec same = WeightSpec::programmatic(2, "affine", [&](const Bary& y) {
    return Bary(theta + 0.4 * y);
  });
  const UniquenessReport r = check_uniqueness(same);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r.min_weight[i] - theta[i]) <= 1e-6);
  CHECK(to_json(check_uniqueness(aff))["h3"]["delta"] == 0.1);
}

TEST_CASE("never unique when several minimal sets exist") {
  for (D2Class c : {D2Class::ThreeVertices, D2Class::TwoVertices, D2Class::VertexPlusOppositeEdge}) {
    const WeightSpec s = d2_fixture(c);
    CHECK(classify_d2(s).members.size() > 1);
    CHECK(check_uniqueness(s).verdict == Verdict::Inconclusive);
  }
}
