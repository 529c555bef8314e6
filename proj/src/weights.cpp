#include "dfchain/weights.hpp"

#include "dfchain/rng.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dfc {

namespace {

using Index = Eigen::Index;

void check_probability(const Eigen::VectorXd& p, const char* what) {
  if (p.size() < 2 || p.size() > kMaxDim + 1) throw std::invalid_argument(std::string(what) + ": wrong length");
  if (!p.allFinite() || (p.array() < 0.0).any()) throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
  if (std::abs(p.sum() - 1.0) > 1e-10) throw std::invalid_argument(std::string(what) + ": entries do not sum to 1");
}

Index node_index(int n, int a, int b) { return Index(b) * (n + 1) - Index(b) * (b - 1) / 2 + a; }

Bary interpolate(const TabulatedWeights& t, const Point& x) {
  const SimplexGrid& g = t.mesh;
  const Index c = g.locate(x);
  if (t.rule == Interpolation::Piecewise) return t.values.row(c).transpose();
  const int n = g.resolution();
  const auto k = g.cell(c);
  if (g.dim() == 1) {
    const double lam = std::clamp(x[0] * n - k.i, 0.0, 1.0);
    return ((1.0 - lam) * t.values.row(k.i) + lam * t.values.row(k.i + 1)).transpose();
  }
  const double u = x[0] * n, v = x[1] * n;
  double l1, l2;
  Index n0, n1, n2;
  if (!k.down) {
    l1 = u - k.i;
    l2 = v - k.j;
    n0 = node_index(n, k.i, k.j);
    n1 = node_index(n, k.i + 1, k.j);
    n2 = node_index(n, k.i, k.j + 1);
  } else {
    l2 = k.i + 1 - u;
    l1 = v - k.j - l2;
    n0 = node_index(n, k.i + 1, k.j);
    n1 = node_index(n, k.i + 1, k.j + 1);
    n2 = node_index(n, k.i, k.j + 1);
  }
  l1 = std::clamp(l1, 0.0, 1.0);
  l2 = std::clamp(l2, 0.0, 1.0 - l1);
  const double l0 = 1.0 - l1 - l2;
  return (l0 * t.values.row(n0) + l1 * t.values.row(n1) + l2 * t.values.row(n2)).transpose();
}

Bary finish(Bary p, const Point& x, const std::string& who) {
  const double s = p.sum();
  if (p.size() != x.dim() + 1 || !p.allFinite() || (p.array() < -1e-10).any() || std::abs(s - 1.0) > 1e-10) {
    std::ostringstream os;
    os << who << " weights are not a probability vector at x = (";
    for (int k = 0; k < x.dim(); ++k) os << (k ? ", " : "") << x[k];
    os << ")";
    throw ValidationError(os.str(), x.barycentric());
  }
  p = p.cwiseMax(0.0);
  return p / p.sum();
}

// Continuous weights whose minimal absorbing set is the simplex minus an open
// hexagon G = {y_i > y_k / 2 for all i != k}: p_i vanishes exactly on the
// points whose segment towards e_i would cross G.
Bary shadowed_hexagon(const Bary& y) {
  constexpr double a = 1.0 / 3.0, r = 0.5;
  Bary c(3);
  for (int i = 0; i < 3; ++i) {
    const double yj = y[(i + 1) % 3], yk = y[(i + 2) % 3];
    c[i] = std::max({a * (yj + yk) - yj, a * (yj + yk) - yk, y[i] - r * std::max(yj, yk), 0.0});
  }
  return c / c.sum();
}

}  // namespace

WeightSpec WeightSpec::constant(const Eigen::VectorXd& p) {
  check_probability(p, "constant weights");
  return WeightSpec(int(p.size()) - 1, ConstantWeights{p});
}

WeightSpec WeightSpec::affine(const Eigen::VectorXd& theta) {
  if (theta.size() < 2 || theta.size() > kMaxDim + 1) throw std::invalid_argument("affine weights: wrong length");
  if (!theta.allFinite() || (theta.array() < 0.0).any()) throw std::invalid_argument("affine weights: theta must be nonnegative");
  if (theta.sum() > 1.0 + 1e-12) throw std::invalid_argument("affine weights: |theta| exceeds 1");
  return WeightSpec(int(theta.size()) - 1, AffineWeights{theta});
}

WeightSpec WeightSpec::tabulated(int dim, int resolution, Interpolation rule, const Eigen::MatrixXd& values) {
  SimplexGrid mesh(dim, resolution);
  const Index rows = rule == Interpolation::Piecewise
                         ? mesh.size()
                         : (dim == 1 ? Index(resolution) + 1 : Index(resolution + 1) * (resolution + 2) / 2);
  if (values.rows() != rows || values.cols() != dim + 1)
    throw std::invalid_argument("tabulated weights: expected " + std::to_string(rows) + " rows of length " +
                                std::to_string(dim + 1));
  for (Index r = 0; r < values.rows(); ++r) check_probability(values.row(r).transpose(), "tabulated weights");
  return WeightSpec(dim, TabulatedWeights{mesh, rule, values});
}

WeightSpec WeightSpec::vertex_interpolated(const Eigen::MatrixXd& v) {
  const int d = int(v.rows()) - 1;
  if (d == 1) return tabulated(1, 1, Interpolation::Linear, v);
  if (d != 2) throw std::invalid_argument("vertex interpolation needs d = 1 or 2");
  // node order of the n = 1 mesh: (0,0), (1,0), (0,1)
  return tabulated(2, 1, Interpolation::Linear, v);
}

WeightSpec WeightSpec::programmatic(int dim, std::string name, WeightCallback fn) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("programmatic weights: bad dimension");
  if (!fn) throw std::invalid_argument("programmatic weights: empty callback");
  return WeightSpec(dim, ProgrammaticWeights{std::move(name), std::move(fn)});
}

WeightSpec WeightSpec::builtin(const std::string& name, int dim) {
  if (name == "barycentric") return programmatic(dim, name, [](const Bary& y) { return y; });
  if (name == "shadowed_hexagon") {
    if (dim != 2) throw std::invalid_argument("shadowed_hexagon is defined on the triangle only");
    return programmatic(2, name, shadowed_hexagon);
  }
  throw std::invalid_argument("unknown programmatic weights '" + name + "'");
}

std::string WeightSpec::kind_name() const {
  switch (kind()) {
    case WeightKind::Constant: return "constant";
    case WeightKind::Affine: return "affine";
    case WeightKind::Tabulated: return "tabulated";
    case WeightKind::Programmatic: return "programmatic";
  }
  return "?";
}

Bary eval(const WeightSpec& spec, const Point& x) {
  if (x.dim() != spec.dim()) throw DomainError("point dimension does not match weights");
  return std::visit(
      [&](const auto& w) -> Bary {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, ConstantWeights>) {
          return w.p;
        } else if constexpr (std::is_same_v<T, AffineWeights>) {
          const double s = w.theta.sum();
          Bary p = w.theta + (1.0 - s) * x.barycentric();
          return p / p.sum();
        } else if constexpr (std::is_same_v<T, TabulatedWeights>) {
          Bary p = interpolate(w, x);
          return p / p.sum();
        } else {
          return finish(w.fn(x.barycentric()), x, "programmatic '" + w.name + "'");
        }
      },
      spec.storage());
}

std::array<int, 2> opposite_edge(int i) {
  switch (i) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    case 2: return {0, 1};
  }
  throw DomainError("edge index out of range");
}

Point edge_point(int i, double u) {
  const auto [a, b] = opposite_edge(i);
  Bary y = Bary::Zero(3);
  y[a] = 1.0 - u;
  y[b] = u;
  return Point::from_barycentric(y);
}

BoundaryProfile boundary_profile(const WeightSpec& spec, int resolution) {
  const int d = spec.dim();
  if (d > 2) throw std::invalid_argument("boundary profiles are computed for d <= 2");
  if (resolution < 16) throw std::invalid_argument("boundary profile needs at least 16 samples per edge");
  BoundaryProfile out;
  out.resolution = resolution;
  out.vertex_values.resize(d + 1, d + 1);
  for (int i = 0; i <= d; ++i) out.vertex_values.row(i) = eval(spec, vertex(i, d)).transpose();
  if (d == 1) return out;

  const double h = 1.0 / (resolution - 1);
  out.edge_support.resize(3);
  for (int i = 0; i < 3; ++i) {
    std::vector<bool> pos(resolution);
    for (int k = 0; k < resolution; ++k) pos[k] = eval(spec, edge_point(i, k * h))[i] > kEpsPositive;
    // a single non-positive sample between two runs is below the sampling resolution
    for (int k = 1; k + 1 < resolution; ++k)
      if (!pos[k] && pos[k - 1] && pos[k + 1]) pos[k] = true;
    auto& runs = out.edge_support[i];
    for (int k = 0; k < resolution;) {
      if (!pos[k]) {
        ++k;
        continue;
      }
      int e = k;
      while (e + 1 < resolution && pos[e + 1]) ++e;
      // move each end out to the sign change by bisection
      auto positive = [&](double u) { return eval(spec, edge_point(i, u))[i] > kEpsPositive; };
      auto refine = [&](double in, double out) {
        for (int it = 0; it < 60 && std::abs(out - in) > 1e-13; ++it) {
          const double mid = 0.5 * (in + out);
          (positive(mid) ? in : out) = mid;
        }
        return in;
      };
      const double lo = k > 0 ? refine(k * h, (k - 1) * h) : 0.0;
      const double hi = e + 1 < resolution ? refine(e * h, (e + 1) * h) : 1.0;
      runs.push_back({lo, hi});
      k = e + 1;
    }
  }
  return out;
}

HolderEstimate holder_constant(const WeightSpec& spec, double alpha, int samples, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("Holder exponent must be in (0,1]");
  if (samples < 10) throw std::invalid_argument("need at least 10 samples");
  const int d = spec.dim();
  constexpr int kScales = 5;
  HolderEstimate est;
  est.alpha = alpha;
  est.per_weight = Eigen::VectorXd::Zero(d + 1);
  Philox4x32 rng(seed, 0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int per_scale = std::max(2, samples / kScales);
  for (int s = 0; s < kScales; ++s) {
    const double h = 0.2 * std::pow(0.25, s);
    double best = 0.0;
    for (int n = 0; n < per_scale; ++n) {
      Bary b(d + 1);
      for (int k = 0; k <= d; ++k) b[k] = expo(rng);
      const Point x = Point::from_barycentric(b / b.sum());
      Coords<double> dir(d);
      for (int k = 0; k < d; ++k) dir[k] = gauss(rng);
      dir *= h / dir.norm();
      Coords<double> yc = x.coords() + dir;
      if ((yc.array() < 0.0).any() || yc.sum() > 1.0) yc = x.coords() - dir;
      if ((yc.array() < 0.0).any() || yc.sum() > 1.0) continue;
      const Point y(yc);
      const double dist = std::pow((y.coords() - x.coords()).norm(), alpha);
      if (dist <= 0.0) continue;
      const Bary diff = (eval(spec, x) - eval(spec, y)).cwiseAbs() / dist;
      est.per_weight = est.per_weight.cwiseMax(diff.head(d + 1));
      best = std::max(best, diff.maxCoeff());
    }
    est.scales.push_back(h);
    est.by_scale.push_back(best);
  }
  est.constant = est.per_weight.maxCoeff();
  // a Holder function keeps the ratio bounded as the separation shrinks; a
  // jump makes it grow like h^-alpha
  const double late = est.by_scale[kScales - 1], early = est.by_scale[kScales - 3];
  est.possibly_not_holder = late > 3.0 * early && late > 1e-12;
  return est;
}

WeightSpec weights_from_json(const nlohmann::json& j) {
  auto vec = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw std::invalid_argument(std::string("weights: missing array '") + key + "'");
    std::vector<double> v = j[key].get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), Index(v.size())));
  };
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("weights: expected an object with a 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") return WeightSpec::constant(vec("p"));
  if (kind == "affine") return WeightSpec::affine(vec("theta"));
  if (kind == "tabulated") {
    const auto& g = j.at("grid");
    const int dim = j.value("dim", 0);
    const int n = g.at("resolution").get<int>();
    const std::string rule = g.value("interpolation", "linear");
    if (rule != "linear" && rule != "piecewise") throw std::invalid_argument("weights: unknown interpolation '" + rule + "'");
    const auto rows = g.at("values").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw std::invalid_argument("weights: empty table");
    Eigen::MatrixXd v(Index(rows.size()), Index(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) throw std::invalid_argument("weights: ragged table");
      for (std::size_t c = 0; c < rows[r].size(); ++c) v(Index(r), Index(c)) = rows[r][c];
    }
    return WeightSpec::tabulated(dim > 0 ? dim : int(v.cols()) - 1, n,
                                 rule == "linear" ? Interpolation::Linear : Interpolation::Piecewise, v);
  }
  if (kind == "programmatic") return WeightSpec::builtin(j.at("name").get<std::string>(), j.at("dim").get<int>());
  throw std::invalid_argument("weights: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const WeightSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind_name();
  j["dim"] = spec.dim();
  auto arr = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  std::visit(
      [&](const auto& w) {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, ConstantWeights>) {
          j["p"] = arr(w.p);
        } else if constexpr (std::is_same_v<T, AffineWeights>) {
          j["theta"] = arr(w.theta);
        } else if constexpr (std::is_same_v<T, TabulatedWeights>) {
          std::vector<std::vector<double>> rows;
          for (Index r = 0; r < w.values.rows(); ++r) rows.push_back(arr(w.values.row(r).transpose()));
          j["grid"] = {{"resolution", w.mesh.resolution()},
                       {"interpolation", w.rule == Interpolation::Linear ? "linear" : "piecewise"},
                       {"values", rows}};
        } else {
          j["name"] = w.name;
        }
      },
      spec.storage());
  return j;
}

WeightSpec load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open weight spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("weight spec '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return weights_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("weight spec '" + path + "': " + e.what());
  }
}

}  // namespace dfc
