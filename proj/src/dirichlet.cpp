#include "dfchain/dirichlet.hpp"

#include "dfchain/integrate.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dfc {

DirichletParams::DirichletParams(Eigen::VectorXd t) : theta(std::move(t)) {
  if (theta.size() < 2 || theta.size() > kMaxDim + 1) throw std::invalid_argument("Dirichlet: wrong number of parameters");
  if (!theta.allFinite() || (theta.array() <= 0.0).any()) throw std::invalid_argument("Dirichlet: parameters must be positive");
}

DensityValue density(const DirichletParams& p, const Point& y) {
  if (y.dim() != p.dim()) throw DomainError("point dimension does not match Dirichlet parameters");
  const Bary b = y.barycentric();
  DensityValue out;
  double lv = std::lgamma(p.total());
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) {
    lv -= std::lgamma(p.theta[i]);
    if (p.theta[i] == 1.0) continue;
    if (b[i] <= 0.0) {
      if (p.theta[i] < 1.0) {
        out.infinite = true;
        out.value = out.log_value = std::numeric_limits<double>::infinity();
        return out;
      }
      out.value = 0.0;
      out.log_value = -std::numeric_limits<double>::infinity();
      return out;
    }
    lv += (p.theta[i] - 1.0) * std::log(b[i]);
  }
  out.log_value = lv;
  out.value = std::exp(lv);
  return out;
}

Moments moments(const DirichletParams& p) {
  const double s = p.total();
  Moments m;
  m.mean = p.theta / s;
  m.cov = (Eigen::MatrixXd(m.mean.asDiagonal()) - m.mean * m.mean.transpose()) / (s + 1.0);
  return m;
}

Point sample(const DirichletParams& p, Philox4x32& rng) {
  Bary g(p.theta.size());
  for (;;) {
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = std::gamma_distribution<double>(p.theta[i], 1.0)(rng);
    const double s = g.sum();
    if (s > 0.0 && std::isfinite(s)) return Point::from_barycentric(g / s);
  }
}

Eigen::VectorXd cell_masses(const DirichletParams& p, const SimplexGrid& grid) {
  if (grid.dim() != p.dim()) throw std::invalid_argument("grid dimension does not match Dirichlet parameters");
  return dirichlet_cell_masses(grid, p.theta);
}

double kolmogorov_pvalue(double d, std::int64_t n) {
  const double sn = std::sqrt(double(n));
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 0.2) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

FitReport goodness_of_fit(const Eigen::MatrixXd& samples, const DirichletParams& p, int resolution, double alpha) {
  const int d = p.dim();
  if (samples.cols() != d) throw std::invalid_argument("sample dimension does not match Dirichlet parameters");
  if (samples.rows() < 10) throw std::invalid_argument("need at least 10 samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
  FitReport r;
  r.alpha = alpha;
  r.n = samples.rows();
  const double n = double(r.n);

  const SimplexGrid grid(d, resolution);
  const Eigen::VectorXd mass = cell_masses(p, grid);
  Eigen::VectorXd observed = Eigen::VectorXd::Zero(grid.size());
  for (Eigen::Index k = 0; k < samples.rows(); ++k)
    observed[grid.locate(Point(Coords<double>(samples.row(k).transpose())))] += 1.0;
  std::vector<double> be, bo;
  double e = 0.0, o = 0.0;
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    e += n * mass[c];
    o += observed[c];
    if (e >= 5.0) {
      be.push_back(e);
      bo.push_back(o);
      e = o = 0.0;
    }
  }
  if (!be.empty()) {
    be.back() += e;
    bo.back() += o;
  }
  for (std::size_t k = 0; k < be.size(); ++k) r.chi2 += (bo[k] - be[k]) * (bo[k] - be[k]) / be[k];
  r.dof = int(be.size()) - 1;
  r.chi2_p = r.dof > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.chi2)) : 1.0;

  const Moments mo = moments(p);
  const double s = p.total();
  for (int i = 0; i <= d; ++i) {
    Eigen::VectorXd v(samples.rows());
    for (Eigen::Index k = 0; k < samples.rows(); ++k)
      v[k] = i == 0 ? 1.0 - samples.row(k).sum() : samples(k, i - 1);
    const double z = (v.mean() - mo.mean[i]) / std::sqrt(mo.cov(i, i) / n);
    r.z.push_back(z);
    r.z_p.push_back(std::erfc(std::abs(z) / std::sqrt(2.0)));
    // marginal of coordinate i is Beta(theta_i, |theta| - theta_i)
    // x_0 = 1 - sum x_i only resolves to ~1e-16, so the sup runs over x >= kKsFloor
    std::sort(v.data(), v.data() + v.size());
    const Eigen::Index below = std::lower_bound(v.data(), v.data() + v.size(), kKsFloor) - v.data();
    const double f0 = boost::math::ibeta(p.theta[i], s - p.theta[i], kKsFloor);
    double dmax = std::abs(below / n - f0);
    for (Eigen::Index k = below; k < v.size(); ++k) {
      const double x = std::clamp(v[k], 0.0, 1.0);
      const double F = boost::math::ibeta(p.theta[i], s - p.theta[i], x);
      dmax = std::max({dmax, (k + 1) / n - F, F - k / n});
    }
    r.ks.push_back(dmax);
    r.ks_p.push_back(kolmogorov_pvalue(dmax, r.n));
  }
  r.tests = 1 + 2 * (d + 1);
  const double each = alpha / r.tests;
  r.pass = r.chi2_p >= each;
  for (int i = 0; i <= d; ++i) r.pass = r.pass && r.z_p[i] >= each && r.ks_p[i] >= each;
  return r;
}

nlohmann::json to_json(const FitReport& r) {
  return {{"alpha", r.alpha},       {"n", r.n},       {"chi2", r.chi2}, {"dof", r.dof},
          {"chi2_p", r.chi2_p},     {"z", r.z},       {"z_p", r.z_p},   {"ks", r.ks},
          {"ks_p", r.ks_p},         {"tests", r.tests}, {"per_test_alpha", r.alpha / r.tests},
          {"pass", r.pass}};
}

}  // namespace dfc
