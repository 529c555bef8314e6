#pragma once

#include "dfchain/grid.hpp"
#include "dfchain/rng.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dfc {

struct DirichletParams {
  Eigen::VectorXd theta;  // theta_0 .. theta_d, all positive

  DirichletParams() = default;
  explicit DirichletParams(Eigen::VectorXd t);
  int dim() const { return int(theta.size()) - 1; }
  double total() const { return theta.sum(); }
};

// Density with respect to Lebesgue measure on the coordinates x_1..x_d.
// On a face with theta_i < 1 the density is infinite and flagged as such.
struct DensityValue {
  double value = 0.0;
  double log_value = 0.0;
  bool infinite = false;
};

DensityValue density(const DirichletParams& p, const Point& y);

struct Moments {
  Eigen::VectorXd mean;  // over all d + 1 barycentric coordinates
  Eigen::MatrixXd cov;
};

Moments moments(const DirichletParams& p);

Point sample(const DirichletParams& p, Philox4x32& rng);

Eigen::VectorXd cell_masses(const DirichletParams& p, const SimplexGrid& grid);

// Left end of the marginal KS tests; below it coordinates are rounding noise.
inline constexpr double kKsFloor = 1e-12;

struct FitReport {
  double alpha = 0.01;
  std::int64_t n = 0;
  // chi-square on grid cells, sparse cells merged to expected count >= 5
  double chi2 = 0.0;
  int dof = 0;
  double chi2_p = 1.0;
  // per barycentric coordinate
  std::vector<double> z;
  std::vector<double> z_p;
  std::vector<double> ks;
  std::vector<double> ks_p;
  int tests = 0;  // the family level alpha is split evenly across tests
  bool pass = false;
};

// Samples are rows of x_1..x_d coordinates.
FitReport goodness_of_fit(const Eigen::MatrixXd& samples, const DirichletParams& p, int resolution, double alpha = 0.01);

nlohmann::json to_json(const FitReport& r);

// P(sup |F_n - F| > d) for large n with the usual finite-sample correction
double kolmogorov_pvalue(double d, std::int64_t n);

}  // namespace dfc
