#include "dfchain/operators.hpp"

#include "dfchain/integrate.hpp"
#include "dfchain/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dfc {

using Index = Eigen::Index;

GridFunction apply_P(const GridFunction& f, const WeightSpec& spec, int nodes) {
  const SimplexGrid& g = f.grid;
  if (spec.dim() != g.dim()) throw std::invalid_argument("weights and grid dimensions differ");
  const QuadratureRule q = gauss_legendre(nodes);
  const int d = g.dim();
  Eigen::VectorXd out(g.size());
  for (Index c = 0; c < g.size(); ++c) {
    const Point x = g.center(c);
    const Bary p = eval(spec, x);
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= d; ++i) {
      double acc = 0.0, wsum = 0.0;
      for (int k = 0; k < nodes; ++k) {
        acc += q.weights[k] * f.value[g.locate(segment_map(i, q.nodes[k], x))];
        wsum += q.weights[k];
      }
      // the ratios make P1 = 1 hold bit for bit
      num += p[i] * (acc / wsum);
      den += p[i];
    }
    out[c] = num / den;
  }
  return GridFunction(g, out);
}

namespace {

Bary local_exponents(const WeightSpec& spec, const Point& x, double floor) {
  const int d = spec.dim();
  Bary a(d + 1);
  const Bary b = x.barycentric();
  for (int i = 0; i <= d; ++i) {
    Bary f = b;
    f[i] = 0.0;
    f /= f.sum();
    a[i] = std::clamp(eval(spec, Point::from_barycentric(f))[i], floor, 1.0);
  }
  return a;
}

double log_shape(const Bary& a, const Bary& y) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    if (a[i] != 1.0) s += (a[i] - 1.0) * std::log(y[i]);
  return s;
}

}  // namespace

StartSamples cell_start_samples(const WeightSpec& spec, const SimplexGrid& grid, Index cell,
                                const KernelOptions& opts) {
  const int q = opts.substeps;
  if (q < 1 || q > 64) throw std::invalid_argument("substeps must be in 1..64");
  const int m = grid.resolution();
  const SimplexGrid fine(grid.dim(), m * q);
  const Bary a = local_exponents(spec, grid.center(cell), opts.exponent_floor);
  const Eigen::VectorXd theta = a;
  const double log_b = log_multivariate_beta(theta);
  const auto k = grid.cell(cell);
  const int M = m * q;

  StartSamples s;
  std::vector<double> logw;
  auto add = [&](Index f) {
    const auto cs = fine.corners(f);
    bool singular = false;
    for (int v = 0; v < grid.dim() + 1; ++v) {
      const int A = cs[v][0], B = cs[v][1];
      if (grid.dim() == 1) {
        singular |= (A == 0 && a[1] < 1.0) || (A == M && a[0] < 1.0);
      } else {
        singular |= (A == 0 && a[1] < 1.0) || (B == 0 && a[2] < 1.0) || (A + B == M && a[0] < 1.0);
      }
    }
    if (singular) {
      const CellMoments cm = dirichlet_cell_moments(fine, f, theta, true);
      if (cm.mass > 1e-300) {
        Coords<double> c(grid.dim());
        c[0] = cm.m1 / cm.mass;
        if (grid.dim() == 2) c[1] = cm.m2 / cm.mass;
        s.points.emplace_back(c);
        logw.push_back(log_b + std::log(cm.mass));
        return;
      }
    }
    const Point c = fine.center(f);
    s.points.push_back(c);
    logw.push_back(log_shape(a, c.barycentric()) + std::log(fine.cell_volume()));
  };

  if (grid.dim() == 1) {
    for (int r = 0; r < q; ++r) add(Index(k.i) * q + r);
  } else {
    for (int J = k.j * q; J < (k.j + 1) * q; ++J) {
      for (int I = k.i * q; I < (k.i + 1) * q; ++I) {
        for (bool down : {false, true}) {
          if (I + J + (down ? 1 : 0) > M - 1) continue;
          const bool inside = k.down ? (I + J + (down ? 1 : 0) >= (k.i + k.j + 1) * q)
                                     : (I + J + (down ? 2 : 1) <= (k.i + k.j + 1) * q);
          if (inside) add(fine.index(I, J, down));
        }
      }
    }
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double lw : logw) {
    s.weights.push_back(std::exp(lw - top));
    total += s.weights.back();
  }
  for (double& w : s.weights) w /= total;
  return s;
}

TransferOperator::TransferOperator(const WeightSpec& spec, const SimplexGrid& grid, const KernelOptions& opts)
    : grid_(grid), opts_(opts) {
  if (spec.dim() != grid.dim()) throw std::invalid_argument("weights and grid dimensions differ");
  const Index n = grid.size();
  const int d = grid.dim();
  const int threads = std::max(1, opts.threads);

  struct Part {
    std::vector<int> cols;
    std::vector<double> vals;
    std::vector<Index> row_len;
  };
  std::vector<Part> parts(threads);
  parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end, int w) {
    Part& part = parts[w];
    std::vector<double> acc(n, 0.0);
    std::vector<int> touched;
    for (Index c = begin; c < end; ++c) {
      const StartSamples ss = cell_start_samples(spec, grid, c, opts);
      for (std::size_t k = 0; k < ss.points.size(); ++k) {
        const Point& x = ss.points[k];
        const Bary p = eval(spec, x);
        for (int i = 0; i <= d; ++i) {
          const double wi = ss.weights[k] * p[i];
          if (wi <= 0.0) continue;
          grid.traverse(vertex(i, d), x, [&](Index cell, double s0, double s1) {
            if (acc[cell] == 0.0) touched.push_back(int(cell));
            acc[cell] += wi * (s1 - s0);
          });
        }
      }
      std::sort(touched.begin(), touched.end());
      double sum = 0.0;
      for (int t : touched) sum += acc[t];
      Index len = 0;
      for (int t : touched) {
        if (acc[t] > 0.0) {
          part.cols.push_back(t);
          part.vals.push_back(acc[t] / sum);
          ++len;
        }
        acc[t] = 0.0;
      }
      part.row_len.push_back(len);
      touched.clear();
    }
  });

  Index nnz = 0;
  for (const auto& p : parts) nnz += Index(p.cols.size());
  K_.resize(n, n);
  K_.reserve(nnz);
  Index row = 0;
  for (const auto& p : parts) {
    std::size_t at = 0;
    for (Index len : p.row_len) {
      K_.startVec(row);
      for (Index e = 0; e < len; ++e, ++at) K_.insertBack(row, p.cols[at]) = p.vals[at];
      ++row;
    }
  }
  K_.finalize();
}

GridDensity apply_Pstar(const TransferOperator& op, const GridDensity& g) {
  if (g.grid != op.grid()) throw std::invalid_argument("density grid does not match the operator");
  Eigen::VectorXd out = op.kernel().transpose() * g.mass;
  return GridDensity(g.grid, std::move(out));
}

std::string to_string(PowerStatus s) {
  switch (s) {
    case PowerStatus::Converged: return "converged";
    case PowerStatus::NotConverged: return "not_converged";
    case PowerStatus::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

double vertex_cell_mass(const GridDensity& g) {
  const SimplexGrid& grid = g.grid;
  const int d = grid.dim();
  std::vector<Index> cells;
  for (int i = 0; i <= d; ++i) cells.push_back(grid.locate(vertex(i, d)));
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  double s = 0.0;
  for (Index c : cells) s += g.mass[c];
  return s;
}

}  // namespace

PowerResult power_iterate(const TransferOperator& op, const GridDensity& g0, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (g0.grid != op.grid()) throw std::invalid_argument("density grid does not match the operator");
  const KernelMatrix& K = op.kernel();
  Eigen::VectorXd g = g0.mass, next(g.size());
  PowerResult r;
  for (int it = 1; it <= max_iter; ++it) {
    next.noalias() = K.transpose() * g;
    next /= next.sum();
    const double step = (next - g).lpNorm<1>();
    g.swap(next);
    r.steps.push_back(step);
    r.iterations = it;
    r.last_step = step;
    if (step < tol) {
      r.status = PowerStatus::Converged;
      break;
    }
  }
  r.density = GridDensity(op.grid(), g.cwiseMax(0.0) / g.cwiseMax(0.0).sum());
  r.vertex_mass = vertex_cell_mass(r.density);
  if (r.vertex_mass >= 0.9) r.status = PowerStatus::Degenerate;
  return r;
}

RateEstimate estimate_rate(const TransferOperator& op, const GridDensity& g0, const GridDensity& g_inf, int max_iter,
                           double floor, int skip) {
  RateEstimate est;
  Eigen::VectorXd g = g0.mass;
  est.errors.push_back((g - g_inf.mass).lpNorm<1>());
  for (int k = 1; k <= max_iter && est.errors.back() >= floor; ++k) {
    g = op.kernel().transpose() * g;
    est.errors.push_back((g - g_inf.mass).lpNorm<1>());
  }
  int last = int(est.errors.size()) - 1;
  if (est.errors[last] < floor) --last;
  // the early iterates carry the faster modes; by default fit the later half
  if (skip < 0) skip = std::max(2, last / 2);
  est.first = skip;
  est.last = last;
  const int n = last - skip + 1;
  if (n < 3) throw std::runtime_error("too few iterates above the floor to fit a rate");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k) {
    A(k, 0) = 1.0;
    A(k, 1) = skip + k;
    b[k] = std::log(est.errors[skip + k]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  est.rho = std::exp(coef[1]);
  est.residual = std::sqrt((A * coef - b).squaredNorm() / n);
  return est;
}

namespace {

struct D1Form {
  double p0_at_0, p1_at_1;
  const WeightSpec* spec;

  // the smooth part of the exponent after the endpoint powers are split off
  double remainder(double y) const {
    auto f = [this](double t) {
      const Bary p = eval(*spec, Point{t});
      return (p[1] - p1_at_1) / (1.0 - t) - (p[0] - p0_at_0) / t;
    };
    if (y == 0.5) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.5, y, 12, 1e-12);
  }

  double value(double y) const { return value(y, 1.0 - y); }
  // with 1 - y passed separately, for accuracy next to y = 1
  double value(double y, double one_minus_y) const {
    return std::pow(2.0 * y, -p0_at_0) * std::pow(2.0 * one_minus_y, -p1_at_1) * std::exp(remainder(y));
  }
};

D1Form d1_form(const WeightSpec& spec) {
  if (spec.dim() != 1) throw std::invalid_argument("the closed form exists for d = 1 only");
  const Bary at0 = eval(spec, Point{0.0});
  const Bary at1 = eval(spec, Point{1.0});
  if (at0[1] <= kEpsPositive || at1[0] <= kEpsPositive)
    throw std::domain_error("closed form needs p_1(0) > 0 and p_0(1) > 0 (got p_1(0) = " + std::to_string(at0[1]) +
                            ", p_0(1) = " + std::to_string(at1[0]) + ")");
  return D1Form{at0[0], at1[1], &spec};
}

}  // namespace

double d1_closed_form_value(const WeightSpec& spec, double y) {
  if (!(y > 0.0 && y < 1.0)) throw std::domain_error("closed form is evaluated on the open interval");
  return d1_form(spec).value(y);
}

GridDensity d1_closed_form(const WeightSpec& spec, const SimplexGrid& grid) {
  const D1Form form = d1_form(spec);
  if (grid.dim() != 1) throw std::invalid_argument("grid must be one-dimensional");
  boost::math::quadrature::tanh_sinh<double> ts;
  const int m = grid.resolution();
  Eigen::VectorXd mass(m);
  for (int k = 0; k < m; ++k)
    mass[k] = ts.integrate(
        [&](double y, double yc) {
          // on the last cell yc = 1 - y exactly in the upper half
          return form.value(y, k + 1 == m && yc > 0.0 ? yc : 1.0 - y);
        },
        double(k) / m, double(k + 1) / m, 1e-12);
  return GridDensity(grid, mass / mass.sum());
}

double pstar_pointwise(const WeightSpec& spec, const std::function<double(const Bary&)>& g, const Point& y,
                       PstarForm form) {
  const int d = spec.dim();
  const Bary yb = y.barycentric();
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (int i = 0; i <= d; ++i) {
    const double a = 1.0 - yb[i];
    if (a <= kGeomEps) throw std::domain_error("pointwise P* needs an interior point");
    // preimage x with y = t x + (1 - t) e_i, barycentric; gap = t - a comes
    // from the endpoint distance so x_i stays accurate near the face
    auto G = [&](double t, double gap) {
      Bary x = yb / t;
      x[i] = gap / t;
      if (!(x[i] > 0.0)) return 0.0;
      return eval(spec, Point::from_barycentric(x / x.sum()))[i] * g(x);
    };
    if (form == PstarForm::T) {
      total += ts.integrate(
          [&](double t, double tc) { return std::pow(t, -d) * G(t, tc < 0.0 ? -tc : t - a); }, a, 1.0, 1e-10);
    } else {
      // s = 1/t; t - a = a (1/a - s) / s
      total += ts.integrate(
          [&](double s, double sc) {
            const double gap = sc > 0.0 ? a * sc / s : 1.0 / s - a;
            return std::pow(s, d - 2) * G(1.0 / s, gap);
          },
          1.0, 1.0 / a, 1e-10);
    }
  }
  return total;
}

void write_density_csv(const std::string& path, const GridDensity& g) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  const int d = g.grid.dim();
  std::fprintf(f, d == 1 ? "cell_id,x1,mass\n" : "cell_id,x1,x2,mass\n");
  for (Index c = 0; c < g.grid.size(); ++c) {
    const Point x = g.grid.center(c);
    std::fprintf(f, "%ld", long(c));
    for (int k = 0; k < d; ++k) std::fprintf(f, ",%.17g", x[k]);
    std::fprintf(f, ",%.17g\n", g.mass[c]);
  }
  std::fclose(f);
}

namespace {

std::string color(double v) {
  // five-stop blue-green-yellow ramp, v in [0,1]
  static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  v = std::clamp(v, 0.0, 1.0) * 4.0;
  const int k = std::min(3, int(v));
  const double f = v - k;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", int(stops[k][0] + f * (stops[k + 1][0] - stops[k][0])),
                int(stops[k][1] + f * (stops[k + 1][1] - stops[k][1])),
                int(stops[k][2] + f * (stops[k + 1][2] - stops[k][2])));
  return buf;
}

}  // namespace

void write_density_svg(const std::string& path, const GridDensity& g, ColorScale scale) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const Eigen::VectorXd dens = g.density();
  const double hi = dens.maxCoeff();
  double lo = hi;
  for (Index c = 0; c < dens.size(); ++c)
    if (dens[c] > 0.0) lo = std::min(lo, dens[c]);
  auto level = [&](double v) {
    if (hi <= 0.0) return 0.0;
    if (scale == ColorScale::Linear) return v / hi;
    if (v <= 0.0 || hi <= lo) return v > 0.0 ? 1.0 : 0.0;
    return (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo));
  };
  const double W = 600.0, pad = 20.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad << "\" height=\"" << W + 2 * pad
      << "\">\n";
  const SimplexGrid& grid = g.grid;
  const int m = grid.resolution();
  for (Index c = 0; c < grid.size(); ++c) {
    const std::string fill = color(level(dens[c]));
    if (grid.dim() == 1) {
      const double x = pad + W * c / m, h = W * level(dens[c]);
      out << "<rect x=\"" << x << "\" y=\"" << pad + W - h << "\" width=\"" << W / m << "\" height=\"" << h
          << "\" fill=\"" << fill << "\"/>\n";
      continue;
    }
    out << "<polygon points=\"";
    for (const auto& v : grid.corners(c))
      out << pad + W * v[0] / m << ',' << pad + W - W * v[1] / m << ' ';
    out << "\" fill=\"" << fill << "\" stroke=\"" << fill << "\" stroke-width=\"0.3\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace dfc
