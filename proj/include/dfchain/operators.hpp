#pragma once

#include "dfchain/grid.hpp"
#include "dfchain/weights.hpp"

#include <Eigen/QR>
#include <Eigen/SparseCore>

#include <functional>
#include <string>
#include <vector>

namespace dfc {

using KernelMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Pf at cell centers: sum_i p_i(x) int_0^1 f(t x + (1 - t) e_i) dt with an
// n-node Gauss-Legendre rule, f looked up on its grid. Pf is exactly 1 when f
// is identically 1.
GridFunction apply_P(const GridFunction& f, const WeightSpec& spec, int nodes = 32);

struct KernelOptions {
  // each cell row is the average over substeps^d weighted start points
  int substeps = 4;
  // lower clamp on the local boundary exponents used to place start points
  double exponent_floor = 0.05;
  int threads = 1;
};

// Row-stochastic cell-to-cell transition matrix of the chain on a grid.
// Row c is the law of the next cell when the current point is spread over c
// with the boundary-layer shape prod_i y_i^(a_i - 1), a_i = p_i on the nearby
// face; segment pieces are assigned to cells exactly.
class TransferOperator {
 public:
  TransferOperator(const WeightSpec& spec, const SimplexGrid& grid, const KernelOptions& opts = {});

  const SimplexGrid& grid() const { return grid_; }
  const KernelMatrix& kernel() const { return K_; }
  const KernelOptions& options() const { return opts_; }

 private:
  SimplexGrid grid_;
  KernelOptions opts_;
  KernelMatrix K_;
};

// Start points of one cell row: positions and normalized weights.
struct StartSamples {
  std::vector<Point> points;
  std::vector<double> weights;
};
StartSamples cell_start_samples(const WeightSpec& spec, const SimplexGrid& grid, Eigen::Index cell,
                                const KernelOptions& opts);

// Push-forward of cell masses: K^T g. Conserves total mass.
GridDensity apply_Pstar(const TransferOperator& op, const GridDensity& g);

enum class PowerStatus { Converged, NotConverged, Degenerate };
std::string to_string(PowerStatus s);

struct PowerResult {
  GridDensity density;
  int iterations = 0;
  double last_step = 0.0;
  PowerStatus status = PowerStatus::NotConverged;
  std::vector<double> steps;  // ||g_{k+1} - g_k||_1
  double vertex_mass = 0.0;   // mass in the cells containing a vertex
};

// Iterates g <- P* g until the L1 step drops below tol. A limit that piles
// at least 90% of its mass into the vertex cells is reported Degenerate.
PowerResult power_iterate(const TransferOperator& op, const GridDensity& g0, double tol = 1e-8, int max_iter = 10000);

struct RateEstimate {
  double rho = 0.0;       // fitted geometric factor per iteration
  double residual = 0.0;  // rms of the log-linear fit residuals
  int first = 0;
  int last = 0;
  std::vector<double> errors;  // ||g_k - g_inf||_1
};

// Fits log ||g_k - g_inf||_1 against k over [skip, first k with error < floor).
// A negative skip starts the fit halfway to the floor.
RateEstimate estimate_rate(const TransferOperator& op, const GridDensity& g0, const GridDensity& g_inf,
                           int max_iter = 200, double floor = 1e-6, int skip = -1);

// Invariant density for d = 1 from the closed form
//   g(y) = C exp(int_{1/2}^y p_1/(1-t) dt - int_{1/2}^y p_0/t dt),
// valid when p_1(0) > 0 and p_0(1) > 0; integrated over the cells.
GridDensity d1_closed_form(const WeightSpec& spec, const SimplexGrid& grid);

// Unnormalized closed-form density value at y (d = 1).
double d1_closed_form_value(const WeightSpec& spec, double y);

// Pointwise P* of a density g at an interior point, by the two equivalent
// changes of variable (t in [1 - y_i, 1] or s = 1/t). g takes barycentric
// coordinates so densities singular on a face can be evaluated next to it.
enum class PstarForm { T, S };
double pstar_pointwise(const WeightSpec& spec, const std::function<double(const Bary&)>& g, const Point& y,
                       PstarForm form);

enum class ColorScale { Linear, Log };

void write_density_csv(const std::string& path, const GridDensity& g);
void write_density_svg(const std::string& path, const GridDensity& g, ColorScale scale = ColorScale::Log);

}  // namespace dfc
