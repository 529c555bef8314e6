#pragma once

#include "dfchain/rng.hpp"
#include "dfchain/weights.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dfc {

struct ChainConfig {
  WeightSpec spec;
  Point start;
  std::int64_t steps = 0;    // transitions, burn-in included
  std::int64_t burn_in = 0;  // states before this step are not recorded
  std::int64_t thin = 1;     // record every thin-th state
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // replica index
};

void validate(const ChainConfig& c);

struct StepResult {
  Point next;
  int vertex = -1;
  double t = 1.0;
};

// One transition: vertex i with probability p_i(x), t uniform on [0,1].
StepResult step(const Point& x, const WeightSpec& spec, Philox4x32& rng);

// Recorded states; row k of x is the state after transition steps[k]. The
// move that produced it is (vertex[k], t[k]); the start state has vertex -1.
struct Trajectory {
  int dim = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<std::int64_t> steps;
  Eigen::MatrixXd x;
  std::vector<int> vertex;
  std::vector<double> t;

  Point point(Eigen::Index k) const { return Point(Coords<double>(x.row(k).transpose())); }
  Eigen::Index size() const { return x.rows(); }
};

Trajectory simulate(const ChainConfig& c);

using Observable = std::function<Eigen::VectorXd(const Point&)>;

// f(x) = (x_0, ..., x_d)
Observable barycentric_coordinates();

struct ErgodicResult {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;  // batch means
  std::int64_t samples = 0;
  int batches = 0;
};

// Time average of f over the recorded states, streamed without storing the path.
ErgodicResult ergodic_average(const ChainConfig& c, const Observable& f);

struct Target {
  enum class Kind { Vertex, Edge } kind = Kind::Vertex;
  int a = 0;  // vertex index, or first edge endpoint
  int b = 0;  // second edge endpoint
  std::string label() const;
};

double distance(const Point& x, const Target& t);

struct AbsorptionResult {
  std::vector<Target> targets;
  std::vector<std::int64_t> counts;
  std::vector<double> frequencies;
  std::int64_t unresolved_count = 0;
  double unresolved = 0.0;
  std::int64_t replicas = 0;
};

// Runs replicas from c.start for c.steps transitions; a replica is assigned to
// the nearest target within radius, else counted unresolved. Replica r uses
// stream r of c.seed, so results do not depend on the thread count.
AbsorptionResult absorption_experiment(const ChainConfig& c, const std::vector<Target>& targets, double radius,
                                       std::int64_t replicas, int threads = 1);

// Final states of independent replicas (stream r for replica r).
Eigen::MatrixXd final_states(const ChainConfig& c, std::int64_t replicas, int threads = 1);

void write_trajectory_csv(const std::string& path, const Trajectory& tr);
nlohmann::json sidecar(const ChainConfig& c);

}  // namespace dfc
