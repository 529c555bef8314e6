#pragma once

#include "dfchain/simplex.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace dfc {

// Regular triangulation of the simplex at resolution m: m intervals for d = 1,
// m^2 congruent triangles for d = 2. Row j of the d = 2 grid holds the up cells
// (i/m, j/m), ((i+1)/m, j/m), (i/m, (j+1)/m) for i < m - j followed by the down
// cells ((i+1)/m, j/m), ((i+1)/m, (j+1)/m), (i/m, (j+1)/m) for i < m - j - 1.
class SimplexGrid {
 public:
  using Index = Eigen::Index;

  struct Cell {
    int i = 0;
    int j = 0;
    bool down = false;
  };

  SimplexGrid() = default;
  SimplexGrid(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return m_; }
  Index size() const { return size_; }
  double cell_volume() const { return dim_ == 1 ? 1.0 / m_ : 0.5 / (double(m_) * m_); }

  Cell cell(Index c) const;
  Index index(const Cell& c) const;
  Index index(int i, int j, bool down) const { return index(Cell{i, j, down}); }

  Point center(Index c) const;
  // lattice corners as integer pairs (a, b) meaning (a/m, b/m); d = 1 uses b = 0
  std::array<std::array<int, 2>, 3> corners(Index c) const;
  int corner_count() const { return dim_ + 1; }

  Index locate(const Point& x) const;
  Index locate(double x1, double x2) const;

  // Walks the segment a + s (b - a), s in [0,1], calling visit(cell, s0, s1)
  // for every piece of positive length, in order of increasing s.
  template <typename Visit>
  void traverse(const Point& a, const Point& b, Visit&& visit) const;

  bool operator==(const SimplexGrid& o) const { return dim_ == o.dim_ && m_ == o.m_; }
  bool operator!=(const SimplexGrid& o) const { return !(*this == o); }

 private:
  Index row_offset(int j) const { return 2 * Index(m_) * j - Index(j) * j; }
  void crossings(double y0, double dy, std::vector<double>& out) const;

  int dim_ = 0;
  int m_ = 0;
  Index size_ = 0;
};

// Cell masses on a grid; nonnegative and summing to 1.
struct GridDensity {
  SimplexGrid grid;
  Eigen::VectorXd mass;

  GridDensity() = default;
  GridDensity(SimplexGrid g, Eigen::VectorXd m);
  static GridDensity uniform(const SimplexGrid& g);

  // mass / cell volume
  Eigen::VectorXd density() const { return mass / grid.cell_volume(); }
};

// Values at cell centers.
struct GridFunction {
  SimplexGrid grid;
  Eigen::VectorXd value;

  GridFunction() = default;
  GridFunction(SimplexGrid g, Eigen::VectorXd v);

  double operator()(const Point& x) const { return value[grid.locate(x)]; }
};

double l1_distance(const GridDensity& a, const GridDensity& b);

// ---------------------------------------------------------------------------

template <typename Visit>
void SimplexGrid::traverse(const Point& a, const Point& b, Visit&& visit) const {
  thread_local std::vector<double> cuts;
  cuts.clear();
  cuts.push_back(0.0);
  const double a1 = a[0], d1 = b[0] - a[0];
  crossings(a1, d1, cuts);
  double a2 = 0.0, d2 = 0.0;
  if (dim_ == 2) {
    a2 = a[1];
    d2 = b[1] - a[1];
    crossings(a2, d2, cuts);
    crossings(a1 + a2, d1 + d2, cuts);
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double s0 = cuts[k], s1 = cuts[k + 1];
    if (s1 - s0 <= 0.0) continue;
    const double s = 0.5 * (s0 + s1);
    const Index c = locate(a1 + s * d1, a2 + s * d2);
    visit(c, s0, s1);
  }
}

}  // namespace dfc
