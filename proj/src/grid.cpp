#include "dfchain/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dfc {

SimplexGrid::SimplexGrid(int dim, int resolution) : dim_(dim), m_(resolution) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grids exist for d = 1 and d = 2 only");
  if (resolution < 1 || resolution > 4096) throw std::invalid_argument("grid resolution must be in 1..4096");
  size_ = dim == 1 ? Index(m_) : Index(m_) * m_;
}

SimplexGrid::Cell SimplexGrid::cell(Index c) const {
  if (dim_ == 1) return Cell{int(c), 0, false};
  // invert row_offset(j) <= c
  int j = int(std::floor(m_ - std::sqrt(double(m_) * m_ - double(c))));
  j = std::clamp(j, 0, m_ - 1);
  while (j > 0 && row_offset(j) > c) --j;
  while (j + 1 < m_ && row_offset(j + 1) <= c) ++j;
  const Index r = c - row_offset(j);
  const int ups = m_ - j;
  if (r < ups) return Cell{int(r), j, false};
  return Cell{int(r - ups), j, true};
}

SimplexGrid::Index SimplexGrid::index(const Cell& c) const {
  if (dim_ == 1) return c.i;
  return row_offset(c.j) + (c.down ? (m_ - c.j) + c.i : c.i);
}

std::array<std::array<int, 2>, 3> SimplexGrid::corners(Index c) const {
  const Cell k = cell(c);
  if (dim_ == 1) return {{{k.i, 0}, {k.i + 1, 0}, {k.i, 0}}};
  if (!k.down) return {{{k.i, k.j}, {k.i + 1, k.j}, {k.i, k.j + 1}}};
  return {{{k.i + 1, k.j}, {k.i + 1, k.j + 1}, {k.i, k.j + 1}}};
}

Point SimplexGrid::center(Index c) const {
  const Cell k = cell(c);
  if (dim_ == 1) return Point{(k.i + 0.5) / m_};
  const double off = k.down ? 2.0 / 3.0 : 1.0 / 3.0;
  return Point{(k.i + off) / m_, (k.j + off) / m_};
}

SimplexGrid::Index SimplexGrid::locate(double x1, double x2) const {
  if (dim_ == 1) return std::clamp(int(std::floor(x1 * m_)), 0, m_ - 1);
  const double u = x1 * m_, v = x2 * m_;
  const int j = std::clamp(int(std::floor(v)), 0, m_ - 1);
  const int i = std::clamp(int(std::floor(u)), 0, m_ - 1 - j);
  const double r = (u - i) + (v - j);
  const bool down = r > 1.0 && i + j < m_ - 1;
  return index(Cell{i, j, down});
}

SimplexGrid::Index SimplexGrid::locate(const Point& x) const {
  if (x.dim() != dim_) throw std::invalid_argument("point dimension does not match grid");
  return locate(x[0], dim_ == 2 ? x[1] : 0.0);
}

void SimplexGrid::crossings(double y0, double dy, std::vector<double>& out) const {
  if (dy == 0.0) return;
  const double y1 = y0 + dy;
  const double lo = std::min(y0, y1) * m_, hi = std::max(y0, y1) * m_;
  for (int k = int(std::ceil(lo)); k <= int(std::floor(hi)); ++k) {
    const double s = (double(k) / m_ - y0) / dy;
    if (s > 0.0 && s < 1.0) out.push_back(s);
  }
}

GridDensity::GridDensity(SimplexGrid g, Eigen::VectorXd m) : grid(g), mass(std::move(m)) {
  if (mass.size() != grid.size()) throw std::invalid_argument("mass vector does not match grid size");
  if ((mass.array() < -1e-14).any()) throw std::invalid_argument("negative cell mass");
  if (std::abs(mass.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("cell masses sum to " + std::to_string(mass.sum()));
}

GridDensity GridDensity::uniform(const SimplexGrid& g) {
  return GridDensity(g, Eigen::VectorXd::Constant(g.size(), 1.0 / double(g.size())));
}

GridFunction::GridFunction(SimplexGrid g, Eigen::VectorXd v) : grid(g), value(std::move(v)) {
  if (value.size() != grid.size()) throw std::invalid_argument("value vector does not match grid size");
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  if (a.grid != b.grid) throw std::invalid_argument("densities live on different grids");
  return (a.mass - b.mass).lpNorm<1>();
}

}  // namespace dfc
