#pragma once

#include "dfchain/grid.hpp"
#include "dfchain/weights.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dfc {

// Set of grid cells standing in for a closed subset of the triangle.
class Region2D {
 public:
  using Index = Eigen::Index;
  using Polygon = std::vector<std::array<double, 2>>;

  Region2D() = default;
  explicit Region2D(const SimplexGrid& g);
  static Region2D full(const SimplexGrid& g);

  const SimplexGrid& grid() const { return grid_; }
  bool contains(Index c) const { return member_[std::size_t(c)] != 0; }
  void insert(Index c) { member_[std::size_t(c)] = 1; }
  Index count() const;
  double area() const { return double(count()) * grid_.cell_volume(); }
  bool is_full() const { return count() == grid_.size(); }

  // members all of whose vertex-neighbours are members too
  std::vector<std::uint8_t> interior() const;
  // non-members all of whose vertex-neighbours are non-members too
  std::vector<std::uint8_t> exterior() const;
  // cells sharing at least one lattice vertex with c, c included
  std::vector<Index> neighbours(Index c) const;

  // boundary loops, counterclockwise around members
  std::vector<Polygon> boundary() const;

  bool operator==(const Region2D& o) const { return grid_ == o.grid_ && member_ == o.member_; }

 private:
  SimplexGrid grid_;
  std::vector<std::uint8_t> member_;
};

struct MemberSet {
  enum class Kind { Vertex, Edge, Region } kind = Kind::Vertex;
  int a = 0;  // vertex, or first edge endpoint
  int b = 0;  // second edge endpoint
  std::optional<Region2D> region;
  std::string label() const;
};

enum class D1Class { FullInterval, OnlyZero, OnlyOne, BothEndpoints };
std::string to_string(D1Class c);

struct D1Classification {
  D1Class kind = D1Class::FullInterval;
  double p1_at_1 = 0.0;
  double p0_at_0 = 0.0;
  std::vector<MemberSet> members;
  std::vector<std::string> warnings;
};

// {e_i} is absorbing exactly when p_i(e_i) = 1, so the minimal absorbing
// sets are the absorbing endpoints, or the whole interval if neither is.
D1Classification classify_d1(const WeightSpec& spec);

enum class D2Class { ThreeVertices, TwoVertices, OneVertex, OneEdge, VertexPlusOppositeEdge, InteriorCompact };
std::string to_string(D2Class c);

struct RuleStep {
  std::string rule;
  std::string detail;
};

struct KnOptions {
  int resolution = 64;
  int max_iter = 64;
  double area_tol = 1e-4;  // relative to the area of the triangle
};

struct D2Classification {
  D2Class kind = D2Class::InteriorCompact;
  std::vector<MemberSet> members;
  BoundaryProfile profile;
  std::vector<RuleStep> trace;
  std::vector<std::string> warnings;
  // filled for InteriorCompact
  std::vector<double> kn_area;     // area of K_0, K_1, ...
  std::vector<int> stage;          // per cell: first n with the cell in K_n, -1 if never
  bool kn_converged = false;
  bool reached_full_simplex = false;
};

// K_0: union over i of the cones from e_i through the sampled support of
// p_i on the opposite edge; a cell belongs when its center does.
Region2D initial_region(const BoundaryProfile& profile, const SimplexGrid& grid);

// One step K_n -> K_{n+1}: add every cell whose center lies on a segment
// from e_i to a point z of K_n with p_i(z) > eps. z is only trusted when it
// sits in an interior cell of K_n, so boundary cells cannot leak.
Region2D iterate_Kn(const WeightSpec& spec, const Region2D& prev);

D2Classification classify_d2(const WeightSpec& spec, const KnOptions& opts = {});

struct EscapeReport {
  double max_escape = 0.0;
  double mean_escape = 0.0;
  int samples = 0;
  std::vector<Bary> witnesses;  // points with escape > 0, at most 10
};

// Samples P(x, complement) = sum_i p_i(x) * |segment (x, e_i) outside| over
// points x of the set. Region complements are taken one cell away from the
// region so raster boundaries do not count as escape.
EscapeReport verify_absorbing(const WeightSpec& spec, const MemberSet& set, int samples = 1000);

nlohmann::json to_json(const D1Classification& c);
nlohmann::json to_json(const D2Classification& c);
void write_classification_svg(const std::string& path, const D2Classification& c);

}  // namespace dfc
