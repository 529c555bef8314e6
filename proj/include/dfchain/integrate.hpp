#pragma once

#include "dfchain/grid.hpp"

#include <Eigen/Core>

namespace dfc {

// Gauss-Legendre rule on [0,1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

QuadratureRule gauss_legendre(int n);

// Dirichlet(theta) probability of a grid cell, with E[Y_1; cell] and
// E[Y_2; cell] when requested. Faces where theta_i < 1 are integrable
// singularities and are handled by the quadrature, not by sampling.
struct CellMoments {
  double mass = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

CellMoments dirichlet_cell_moments(const SimplexGrid& grid, Eigen::Index cell, const Eigen::VectorXd& theta,
                                   bool with_moments = false);

Eigen::VectorXd dirichlet_cell_masses(const SimplexGrid& grid, const Eigen::VectorXd& theta);

// log of prod Gamma(theta_i) / Gamma(|theta|)
double log_multivariate_beta(const Eigen::VectorXd& theta);

}  // namespace dfc
