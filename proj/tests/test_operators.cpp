#include "dfchain/integrate.hpp"
#include "dfchain/operators.hpp"

#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <random>

using namespace dfc;

namespace {

double dirichlet_pdf(const Eigen::VectorXd& theta, const Bary& b) {
  double l = -log_multivariate_beta(theta);
  for (Eigen::Index i = 0; i < theta.size(); ++i) l += (theta[i] - 1) * std::log(b[i]);
  return std::exp(l);
}

}  // namespace

TEST_CASE("P fixes constants and keeps functions nonnegative") {
  const SimplexGrid g(2, 12);
  const WeightSpec s = WeightSpec::affine(Eigen::Vector3d(0.1, 0.2, 0.3));
  const GridFunction p1 = apply_P(GridFunction(g, Eigen::VectorXd::Ones(g.size())), s);
  CHECK((p1.value.array() == 1.0).all());
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd v(g.size());
    for (auto& x : v) x = U(gen) < 0.5 ? 0.0 : U(gen);
    CHECK(apply_P(GridFunction(g, v), s).value.minCoeff() >= 0.0);
  }
}

TEST_CASE("kernel rows are probability vectors") {
  const SimplexGrid g(2, 16);
  const TransferOperator op(WeightSpec::builtin("shadowed_hexagon", 2), g);
  const KernelMatrix& K = op.kernel();
  for (Eigen::Index r = 0; r < K.rows(); ++r) {
    double s = 0;
    for (KernelMatrix::InnerIterator it(K, r); it; ++it) {
      CHECK(it.value() >= 0.0);
      s += it.value();
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the two pointwise forms of P* agree and fix the Dirichlet density") {
  // constant weights p have invariant law Dir(p)
  const Eigen::Vector3d p(0.3, 0.5, 0.2);
  const WeightSpec s = WeightSpec::constant(p);
  auto g = [&](const Bary& b) { return dirichlet_pdf(p, b); };
  for (const Point& y : {Point{0.2, 0.3}, Point{0.6, 0.1}, Point{0.05, 0.9}}) {
    const double t = pstar_pointwise(s, g, y, PstarForm::T);
    const double u = pstar_pointwise(s, g, y, PstarForm::S);
    CHECK(t == doctest::Approx(u).epsilon(1e-7));
    CHECK(t == doctest::Approx(g(y.barycentric())).epsilon(1e-6));
  }
  // affine weights keep Dir(theta)
  const WeightSpec a = WeightSpec::affine(Eigen::Vector3d(0.1, 0.2, 0.3));
  auto h = [&](const Bary& b) { return dirichlet_pdf(Eigen::Vector3d(0.1, 0.2, 0.3), b); };
  const Point y{0.3, 0.3};
  CHECK(pstar_pointwise(a, h, y, PstarForm::T) == doctest::Approx(h(y.barycentric())).epsilon(1e-6));
}

TEST_CASE("d = 1 closed form is the Beta law for constant weights") {
  const WeightSpec s = WeightSpec::constant(Eigen::Vector2d(0.4, 0.6));
  const SimplexGrid g(1, 32);
  const GridDensity cf = d1_closed_form(s, g);
  for (Eigen::Index c = 0; c < g.size(); ++c) {
    const double a = double(c) / 32, b = double(c + 1) / 32;
    CHECK(cf.mass[c] == doctest::Approx(boost::math::ibeta(0.6, 0.4, b) - boost::math::ibeta(0.6, 0.4, a)).epsilon(1e-8));
  }
  // shape check on an interior point: value ratio is y^(p1-1)(1-y)^(p0-1)
  const double r = d1_closed_form_value(s, 0.3) / d1_closed_form_value(s, 0.7);
  CHECK(r == doctest::Approx(std::pow(0.3 / 0.7, -0.4) * std::pow(0.7 / 0.3, -0.6)).epsilon(1e-8));
  CHECK_THROWS_AS(d1_closed_form(WeightSpec::builtin("barycentric", 1), g), std::domain_error);
}

TEST_CASE("power iteration") {
  const SimplexGrid g(2, 32);
  const Eigen::Vector3d p(0.3, 0.5, 0.2);
  const TransferOperator op(WeightSpec::constant(p), g);
  const PowerResult r = power_iterate(op, GridDensity::uniform(g));
  CHECK(r.status == PowerStatus::Converged);
  CHECK(l1_distance(r.density, GridDensity(g, dirichlet_cell_masses(g, p))) < 0.01);
  const GridDensity once = apply_Pstar(op, r.density);
  CHECK(once.mass.sum() == doctest::Approx(1.0).epsilon(1e-13));
  // p_i = x_i drives everything to the vertices
  const TransferOperator op3(WeightSpec::builtin("barycentric", 2), g);
  CHECK(power_iterate(op3, GridDensity::uniform(g)).status == PowerStatus::Degenerate);
  const RateEstimate re = estimate_rate(op, GridDensity::uniform(g), r.density);
  CHECK(re.rho > 0.0);
  CHECK(re.rho < 1.0);
}
