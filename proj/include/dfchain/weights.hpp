#pragma once

#include "dfchain/grid.hpp"
#include "dfchain/simplex.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dfc {

// Thrown when weights evaluate to something that is not a probability vector.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, Bary where) : std::runtime_error(what), x(std::move(where)) {}
  Bary x;
};

struct ConstantWeights {
  Eigen::VectorXd p;
};

// p_i(x) = theta_i + (1 - |theta|) x_i
struct AffineWeights {
  Eigen::VectorXd theta;
};

enum class Interpolation { Linear, Piecewise };

// Values on a regular mesh of the simplex. Linear: one row per mesh node
// (a/n, b/n), ordered b-major, interpolated barycentrically inside mesh
// cells. Piecewise: one row per mesh cell in SimplexGrid order.
struct TabulatedWeights {
  SimplexGrid mesh;
  Interpolation rule = Interpolation::Linear;
  Eigen::MatrixXd values;
};

using WeightCallback = std::function<Bary(const Bary& barycentric)>;

struct ProgrammaticWeights {
  std::string name;
  WeightCallback fn;
};

enum class WeightKind { Constant, Affine, Tabulated, Programmatic };

class WeightSpec {
 public:
  using Storage = std::variant<ConstantWeights, AffineWeights, TabulatedWeights, ProgrammaticWeights>;

  WeightSpec() = default;

  static WeightSpec constant(const Eigen::VectorXd& p);
  static WeightSpec affine(const Eigen::VectorXd& theta);
  static WeightSpec tabulated(int dim, int resolution, Interpolation rule, const Eigen::MatrixXd& values);
  // p(x) = sum_j x_j V.row(j): linear interpolation between the vertex values
  static WeightSpec vertex_interpolated(const Eigen::MatrixXd& vertex_values);
  static WeightSpec programmatic(int dim, std::string name, WeightCallback fn);
  // Named callbacks usable from JSON: "barycentric", "shadowed_hexagon".
  static WeightSpec builtin(const std::string& name, int dim);

  int dim() const { return dim_; }
  WeightKind kind() const { return static_cast<WeightKind>(storage_.index()); }
  const Storage& storage() const { return storage_; }
  std::string kind_name() const;

 private:
  WeightSpec(int dim, Storage s) : dim_(dim), storage_(std::move(s)) {}
  int dim_ = 0;
  Storage storage_;
};

// Probability vector (p_0, ..., p_d) at x. Throws ValidationError on bad output.
Bary eval(const WeightSpec& spec, const Point& x);

// Weights restricted to the boundary, sampled for the classifier.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BoundaryProfile {
  int resolution = 0;
  // row i: p(e_i)
  Eigen::MatrixXd vertex_values;
  // edge_support[i]: closure of {p_i > eps} on the edge opposite e_i, as
  // parameter intervals u in [0,1], u = 0 at the lower-index endpoint.
  std::vector<std::vector<Interval>> edge_support;
  bool empty(int i) const { return edge_support[i].empty(); }
};

inline constexpr double kEpsPositive = 1e-9;
inline constexpr double kEpsOne = 1e-9;
inline constexpr double kEpsBorderline = 1e-6;

// Endpoints (a, b) of the edge opposite vertex i in Delta_2, a < b.
std::array<int, 2> opposite_edge(int i);
Point edge_point(int i, double u);

BoundaryProfile boundary_profile(const WeightSpec& spec, int resolution);

struct HolderEstimate {
  double alpha = 1.0;
  double constant = 0.0;         // max over weights
  Eigen::VectorXd per_weight;    // m_alpha(p_j), j = 0..d
  std::vector<double> scales;    // pair separations probed
  std::vector<double> by_scale;  // max ratio seen at each separation
  bool possibly_not_holder = false;
};

// Sampled Holder seminorm max_j sup |p_j(x) - p_j(y)| / |x - y|^alpha,
// Euclidean distance in the coordinates x_1..x_d.
HolderEstimate holder_constant(const WeightSpec& spec, double alpha, int samples, std::uint64_t seed = 7);

WeightSpec weights_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WeightSpec& spec);
WeightSpec load_weights(const std::string& path);

}  // namespace dfc
