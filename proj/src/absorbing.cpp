#include "dfchain/absorbing.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dfc {

using Index = Eigen::Index;

Region2D::Region2D(const SimplexGrid& g) : grid_(g), member_(std::size_t(g.size()), 0) {
  if (g.dim() != 2) throw std::invalid_argument("regions live on the triangle");
}

Region2D Region2D::full(const SimplexGrid& g) {
  Region2D r(g);
  std::fill(r.member_.begin(), r.member_.end(), 1);
  return r;
}

Index Region2D::count() const { return Index(std::count(member_.begin(), member_.end(), std::uint8_t(1))); }

std::vector<Index> Region2D::neighbours(Index c) const {
  const int m = grid_.resolution();
  std::vector<Index> out;
  for (const auto& v : grid_.corners(c)) {
    const int a = v[0], b = v[1];
    const int up[3][2] = {{a, b}, {a - 1, b}, {a, b - 1}};
    const int dn[3][2] = {{a - 1, b}, {a - 1, b - 1}, {a, b - 1}};
    for (const auto& u : up)
      if (u[0] >= 0 && u[1] >= 0 && u[0] + u[1] <= m - 1) out.push_back(grid_.index(u[0], u[1], false));
    for (const auto& u : dn)
      if (u[0] >= 0 && u[1] >= 0 && u[0] + u[1] <= m - 2) out.push_back(grid_.index(u[0], u[1], true));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint8_t> Region2D::interior() const {
  std::vector<std::uint8_t> out(member_.size(), 0);
  for (Index c = 0; c < grid_.size(); ++c) {
    if (!contains(c)) continue;
    bool all = true;
    for (Index n : neighbours(c)) all = all && contains(n);
    out[std::size_t(c)] = all;
  }
  return out;
}

std::vector<std::uint8_t> Region2D::exterior() const {
  std::vector<std::uint8_t> out(member_.size(), 0);
  for (Index c = 0; c < grid_.size(); ++c) {
    if (contains(c)) continue;
    bool none = true;
    for (Index n : neighbours(c)) none = none && !contains(n);
    out[std::size_t(c)] = none;
  }
  return out;
}

std::vector<Region2D::Polygon> Region2D::boundary() const {
  const int m = grid_.resolution();
  using V = std::pair<int, int>;
  // directed edges with the member cell on the left
  std::multimap<V, V> edges;
  auto other = [&](Index c, int e) -> Index {
    // neighbour across edge e (corner e to corner e+1), -1 outside
    const auto k = grid_.cell(c);
    if (!k.down) {
      if (e == 0) return k.j > 0 ? grid_.index(k.i, k.j - 1, true) : -1;
      if (e == 1) return k.i + k.j < m - 1 ? grid_.index(k.i, k.j, true) : -1;
      return k.i > 0 ? grid_.index(k.i - 1, k.j, true) : -1;
    }
    if (e == 0) return grid_.index(k.i + 1, k.j, false);
    if (e == 1) return grid_.index(k.i, k.j + 1, false);
    return grid_.index(k.i, k.j, false);
  };
  for (Index c = 0; c < grid_.size(); ++c) {
    if (!contains(c)) continue;
    const auto cs = grid_.corners(c);
    for (int e = 0; e < 3; ++e) {
      const Index n = other(c, e);
      if (n >= 0 && contains(n)) continue;
      edges.emplace(V{cs[e][0], cs[e][1]}, V{cs[(e + 1) % 3][0], cs[(e + 1) % 3][1]});
    }
  }
  std::vector<Polygon> loops;
  while (!edges.empty()) {
    auto it = edges.begin();
    const V start = it->first;
    std::vector<V> loop{start};
    V cur = it->second;
    edges.erase(it);
    while (cur != start) {
      loop.push_back(cur);
      auto nx = edges.find(cur);
      if (nx == edges.end()) break;
      cur = nx->second;
      edges.erase(nx);
    }
    // drop collinear vertices
    Polygon poly;
    const std::size_t n = loop.size();
    for (std::size_t k = 0; k < n; ++k) {
      const V& a = loop[(k + n - 1) % n];
      const V& b = loop[k];
      const V& c = loop[(k + 1) % n];
      const long cross = long(b.first - a.first) * (c.second - b.second) - long(b.second - a.second) * (c.first - b.first);
      if (cross != 0) poly.push_back({double(b.first) / m, double(b.second) / m});
    }
    loops.push_back(std::move(poly));
  }
  return loops;
}

std::string MemberSet::label() const {
  switch (kind) {
    case Kind::Vertex: return "e" + std::to_string(a);
    case Kind::Edge: return "[e" + std::to_string(a) + ",e" + std::to_string(b) + "]";
    case Kind::Region: return region && region->is_full() ? "simplex" : "region";
  }
  return "?";
}

std::string to_string(D1Class c) {
  switch (c) {
    case D1Class::FullInterval: return "FullInterval";
    case D1Class::OnlyZero: return "OnlyZero";
    case D1Class::OnlyOne: return "OnlyOne";
    case D1Class::BothEndpoints: return "BothEndpoints";
  }
  return "?";
}

std::string to_string(D2Class c) {
  switch (c) {
    case D2Class::ThreeVertices: return "ThreeVertices";
    case D2Class::TwoVertices: return "TwoVertices";
    case D2Class::OneVertex: return "OneVertex";
    case D2Class::OneEdge: return "OneEdge";
    case D2Class::VertexPlusOppositeEdge: return "VertexPlusOppositeEdge";
    case D2Class::InteriorCompact: return "InteriorCompact";
  }
  return "?";
}

namespace {

bool is_one(double v) { return v >= 1.0 - kEpsOne; }

void borderline(double v, const std::string& what, std::vector<std::string>& warnings) {
  if (!is_one(v) && v >= 1.0 - kEpsBorderline) {
    std::ostringstream os;
    os.precision(17);
    os << what << " = " << v << " is within 1e-6 of 1 but treated as below 1";
    warnings.push_back(os.str());
  }
}

MemberSet vertex_set(int i) { return MemberSet{MemberSet::Kind::Vertex, i, i, std::nullopt}; }

MemberSet edge_set(int a, int b) { return MemberSet{MemberSet::Kind::Edge, a, b, std::nullopt}; }

}  // namespace

D1Classification classify_d1(const WeightSpec& spec) {
  if (spec.dim() != 1) throw std::invalid_argument("classify_d1 needs d = 1");
  D1Classification c;
  c.p0_at_0 = eval(spec, vertex(0, 1))[0];
  c.p1_at_1 = eval(spec, vertex(1, 1))[1];
  borderline(c.p0_at_0, "p_0(0)", c.warnings);
  borderline(c.p1_at_1, "p_1(1)", c.warnings);
  const bool zero = is_one(c.p0_at_0), one = is_one(c.p1_at_1);
  if (zero && one) {
    c.kind = D1Class::BothEndpoints;
    c.members = {vertex_set(0), vertex_set(1)};
  } else if (zero) {
    c.kind = D1Class::OnlyZero;
    c.members = {vertex_set(0)};
  } else if (one) {
    c.kind = D1Class::OnlyOne;
    c.members = {vertex_set(1)};
  } else {
    c.kind = D1Class::FullInterval;
    c.members = {edge_set(0, 1)};
  }
  return c;
}

Region2D initial_region(const BoundaryProfile& profile, const SimplexGrid& grid) {
  Region2D r(grid);
  for (Index c = 0; c < grid.size(); ++c) {
    const Bary b = grid.center(c).barycentric();
    for (int i = 0; i < 3 && !r.contains(c); ++i) {
      const auto [lo, hi] = opposite_edge(i);
      const double u = b[hi] / (b[lo] + b[hi]);
      for (const Interval& iv : profile.edge_support[i])
        if (u >= iv.lo && u <= iv.hi) {
          r.insert(c);
          break;
        }
    }
  }
  return r;
}

Region2D iterate_Kn(const WeightSpec& spec, const Region2D& prev) {
  const SimplexGrid& grid = prev.grid();
  const int m = grid.resolution();
  const std::vector<std::uint8_t> inner = prev.interior();
  Region2D next = prev;
  for (Index c = 0; c < grid.size(); ++c) {
    if (prev.contains(c)) continue;
    const Point y = grid.center(c);
    const Bary b = y.barycentric();
    for (int i = 0; i < 3 && !next.contains(c); ++i) {
      // z = y + s (y - e_i) stays in the triangle for s <= b_i / (1 - b_i)
      const double smax = b[i] / (1.0 - b[i]);
      const Coords<double> dir = y.coords() - vertex(i, 2).coords();
      const int n = int(std::ceil(4.0 * m * smax * dir.norm())) + 1;
      for (int k = 1; k <= n; ++k) {
        Coords<double> zc = y.coords() + (smax * k / n) * dir;
        zc = zc.cwiseMax(0.0);
        if (zc.sum() > 1.0) zc /= zc.sum();
        const Point z(zc);
        if (!inner[std::size_t(grid.locate(z))]) continue;
        if (eval(spec, z)[i] > kEpsPositive) {
          next.insert(c);
          break;
        }
      }
    }
  }
  return next;
}

D2Classification classify_d2(const WeightSpec& spec, const KnOptions& opts) {
  if (spec.dim() != 2) throw std::invalid_argument("classify_d2 needs d = 2");
  if (opts.resolution < 16) throw std::invalid_argument("resolution below 16 cannot resolve the edge supports");
  D2Classification out;
  out.profile = boundary_profile(spec, std::max(3, opts.resolution + 1));
  std::vector<int> absorbing;
  for (int i = 0; i < 3; ++i) {
    const double v = out.profile.vertex_values(i, i);
    borderline(v, "p_" + std::to_string(i) + "(e_" + std::to_string(i) + ")", out.warnings);
    if (is_one(v)) {
      absorbing.push_back(i);
      out.trace.push_back({"vertex_absorbing", "p_" + std::to_string(i) + "(e_" + std::to_string(i) + ") = 1, so {e_" +
                                                   std::to_string(i) + "} is a minimal absorbing set"});
    } else {
      out.trace.push_back({"vertex_leaks", "p_" + std::to_string(i) + "(e_" + std::to_string(i) + ") < 1"});
    }
  }
  for (int i = 0; i < 3; ++i)
    if (out.profile.empty(i))
      out.trace.push_back({"edge_support_empty", "p_" + std::to_string(i) + " vanishes on the edge opposite e_" +
                                                     std::to_string(i) + ", which is therefore absorbing"});

  if (absorbing.size() == 3) {
    out.kind = D2Class::ThreeVertices;
    for (int i : absorbing) out.members.push_back(vertex_set(i));
    return out;
  }
  if (absorbing.size() == 2) {
    out.kind = D2Class::TwoVertices;
    for (int i : absorbing) out.members.push_back(vertex_set(i));
    return out;
  }
  if (absorbing.size() == 1) {
    const int k = absorbing[0];
    out.members.push_back(vertex_set(k));
    if (out.profile.empty(k)) {
      const auto [a, b] = opposite_edge(k);
      out.kind = D2Class::VertexPlusOppositeEdge;
      out.members.push_back(edge_set(a, b));
    } else {
      out.kind = D2Class::OneVertex;
    }
    return out;
  }
  std::vector<int> empties;
  for (int i = 0; i < 3; ++i)
    if (out.profile.empty(i)) empties.push_back(i);
  if (!empties.empty()) {
    if (empties.size() > 1) out.warnings.push_back("several weights vanish on their opposite edges; reporting the first");
    const auto [a, b] = opposite_edge(empties[0]);
    out.kind = D2Class::OneEdge;
    out.members.push_back(edge_set(a, b));
    return out;
  }

  out.kind = D2Class::InteriorCompact;
  const SimplexGrid grid(2, opts.resolution);
  const double tol_cells = opts.area_tol * 0.5 / grid.cell_volume();
  Region2D K = initial_region(out.profile, grid);
  out.stage.assign(std::size_t(grid.size()), -1);
  for (Index c = 0; c < grid.size(); ++c)
    if (K.contains(c)) out.stage[std::size_t(c)] = 0;
  out.kn_area.push_back(K.area());
  out.trace.push_back({"cone_fill", "K_0 = union of cones from each vertex over the support of its weight"});
  auto full = [&](const Region2D& r) { return double(grid.size() - r.count()) < tol_cells; };
  out.reached_full_simplex = full(K);
  out.kn_converged = out.reached_full_simplex;
  for (int n = 1; n <= opts.max_iter && !out.kn_converged; ++n) {
    Region2D next = iterate_Kn(spec, K);
    const Index added = next.count() - K.count();
    for (Index c = 0; c < grid.size(); ++c)
      if (next.contains(c) && out.stage[std::size_t(c)] < 0) out.stage[std::size_t(c)] = n;
    out.kn_area.push_back(next.area());
    K = std::move(next);
    out.reached_full_simplex = full(K);
    out.kn_converged = out.reached_full_simplex || double(added) < tol_cells;
  }
  if (!out.kn_converged) out.warnings.push_back("K_n did not settle within the iteration cap");
  out.trace.push_back({"kn_fixed_point", "K_n settled after " + std::to_string(out.kn_area.size() - 1) +
                                             " steps with area " + std::to_string(K.area())});
  if (out.reached_full_simplex) K = Region2D::full(grid);
  MemberSet ms{MemberSet::Kind::Region, 0, 0, std::move(K)};
  out.members.push_back(std::move(ms));
  return out;
}

EscapeReport verify_absorbing(const WeightSpec& spec, const MemberSet& set, int samples) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const int d = spec.dim();
  EscapeReport r;
  auto record = [&](double e, const Point& x) {
    if (e > 0.0 && r.witnesses.size() < 10) r.witnesses.push_back(x.barycentric());
    r.max_escape = std::max(r.max_escape, e);
    r.mean_escape += e;
    ++r.samples;
  };
  switch (set.kind) {
    case MemberSet::Kind::Vertex: {
      const Bary p = eval(spec, vertex(set.a, d));
      record(1.0 - p[set.a], vertex(set.a, d));
      break;
    }
    case MemberSet::Kind::Edge: {
      if (d == 1) {
        record(0.0, vertex(0, 1));
        break;
      }
      const int k = 3 - set.a - set.b;
      for (int s = 0; s < samples; ++s) {
        const double u = samples == 1 ? 0.5 : double(s) / (samples - 1);
        const Point x = edge_point(k, u);
        record(eval(spec, x)[k], x);
      }
      break;
    }
    case MemberSet::Kind::Region: {
      const Region2D& reg = *set.region;
      const SimplexGrid& g = reg.grid();
      const std::vector<std::uint8_t> outside = reg.exterior();
      std::vector<Index> cells;
      for (Index c = 0; c < g.size(); ++c)
        if (reg.contains(c)) cells.push_back(c);
      const std::size_t stride = std::max<std::size_t>(1, cells.size() / std::size_t(samples));
      for (std::size_t k = 0; k < cells.size(); k += stride) {
        const Point x = g.center(cells[k]);
        const Bary p = eval(spec, x);
        double e = 0.0;
        for (int i = 0; i <= d; ++i) {
          if (p[i] <= 0.0) continue;
          double out_len = 0.0;
          g.traverse(vertex(i, d), x, [&](Index c, double s0, double s1) {
            if (outside[std::size_t(c)]) out_len += s1 - s0;
          });
          e += p[i] * out_len;
        }
        record(e, x);
      }
      break;
    }
  }
  r.mean_escape /= std::max(1, r.samples);
  return r;
}

namespace {

nlohmann::json member_json(const MemberSet& m) {
  nlohmann::json j{{"label", m.label()}};
  switch (m.kind) {
    case MemberSet::Kind::Vertex:
      j["kind"] = "vertex";
      j["vertex"] = m.a;
      break;
    case MemberSet::Kind::Edge:
      j["kind"] = "edge";
      j["vertices"] = {m.a, m.b};
      break;
    case MemberSet::Kind::Region: {
      j["kind"] = "region";
      j["resolution"] = m.region->grid().resolution();
      j["area"] = m.region->area();
      j["full"] = m.region->is_full();
      nlohmann::json loops = nlohmann::json::array();
      for (const auto& poly : m.region->boundary()) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& v : poly) pts.push_back({v[0], v[1]});
        loops.push_back(pts);
      }
      j["boundary"] = loops;
      break;
    }
  }
  return j;
}

constexpr const char* kRegularityNote =
    "assumes continuous weights; the d = 2 rules also need Holder weights, which is not certified here "
    "(check-uniqueness reports an empirical Holder estimate)";

}  // namespace

nlohmann::json to_json(const D1Classification& c) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : c.members) members.push_back(member_json(m));
  return {{"dim", 1},
          {"class", to_string(c.kind)},
          {"members", members},
          {"p0_at_0", c.p0_at_0},
          {"p1_at_1", c.p1_at_1},
          {"thresholds", {{"eps_one", kEpsOne}, {"eps_borderline", kEpsBorderline}}},
          {"warnings", c.warnings},
          {"note", kRegularityNote}};
}

nlohmann::json to_json(const D2Classification& c) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : c.members) members.push_back(member_json(m));
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& s : c.trace) trace.push_back({{"rule", s.rule}, {"detail", s.detail}});
  nlohmann::json profile;
  std::vector<std::vector<double>> vv;
  for (Index i = 0; i < c.profile.vertex_values.rows(); ++i) {
    const Eigen::VectorXd row = c.profile.vertex_values.row(i).transpose();
    vv.emplace_back(row.data(), row.data() + row.size());
  }
  profile["vertex_values"] = vv;
  profile["samples_per_edge"] = c.profile.resolution;
  nlohmann::json sup = nlohmann::json::array();
  for (const auto& runs : c.profile.edge_support) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& iv : runs) r.push_back({iv.lo, iv.hi});
    sup.push_back(r);
  }
  profile["edge_support"] = sup;
  nlohmann::json j{{"dim", 2},
                   {"class", to_string(c.kind)},
                   {"members", members},
                   {"trace", trace},
                   {"profile", profile},
                   {"thresholds",
                    {{"eps_positive", kEpsPositive}, {"eps_one", kEpsOne}, {"eps_borderline", kEpsBorderline}}},
                   {"warnings", c.warnings},
                   {"note", kRegularityNote}};
  if (c.kind == D2Class::InteriorCompact) {
    j["kn"] = {{"area", c.kn_area},
               {"converged", c.kn_converged},
               {"reached_full_simplex", c.reached_full_simplex}};
  }
  return j;
}

void write_classification_svg(const std::string& path, const D2Classification& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const double W = 600.0, pad = 20.0;
  auto px = [&](double x1, double x2) {
    std::ostringstream os;
    os << pad + W * x1 << ',' << pad + W - W * x2;
    return os.str();
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad << "\" height=\"" << W + 2 * pad
      << "\">\n";
  out << "<polygon points=\"" << px(0, 0) << ' ' << px(1, 0) << ' ' << px(0, 1)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& m : c.members) {
    if (m.kind != MemberSet::Kind::Region) continue;
    const SimplexGrid& g = m.region->grid();
    const int stages = int(c.kn_area.size());
    for (Index k = 0; k < g.size(); ++k) {
      const int s = c.stage.empty() ? 0 : c.stage[std::size_t(k)];
      if (s < 0) continue;
      // K_0 dark, later stages lighter
      const int shade = 60 + (stages > 1 ? 160 * s / (stages - 1) : 0);
      out << "<polygon points=\"";
      for (const auto& v : g.corners(k)) out << px(double(v[0]) / g.resolution(), double(v[1]) / g.resolution()) << ' ';
      out << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"none\"/>\n";
    }
  }
  for (const auto& m : c.members) {
    if (m.kind == MemberSet::Kind::Vertex) {
      const double x1 = m.a == 1 ? 1.0 : 0.0, x2 = m.a == 2 ? 1.0 : 0.0;
      const auto p = px(x1, x2);
      out << "<circle cx=\"" << p.substr(0, p.find(',')) << "\" cy=\"" << p.substr(p.find(',') + 1)
          << "\" r=\"8\" fill=\"red\"/>\n";
    } else if (m.kind == MemberSet::Kind::Edge) {
      auto corner = [&](int v) { return px(v == 1 ? 1.0 : 0.0, v == 2 ? 1.0 : 0.0); };
      const auto a = corner(m.a), b = corner(m.b);
      out << "<polyline points=\"" << a << ' ' << b << "\" stroke=\"red\" stroke-width=\"6\" fill=\"none\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace dfc
