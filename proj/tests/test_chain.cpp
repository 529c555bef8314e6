#include "dfchain/chain.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace dfc;

namespace {
ChainConfig config(const WeightSpec& s, const Point& x0, std::int64_t steps, std::uint64_t seed) {
  ChainConfig c;
  c.spec = s;
  c.start = x0;
  c.steps = steps;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_CASE("a step moves toward the chosen vertex") {
  const WeightSpec s = WeightSpec::constant(Eigen::Vector3d(0.3, 0.5, 0.2));
  Philox4x32 rng(1, 0);
  Point x{0.2, 0.2};
  int counts[3] = {0, 0, 0};
  for (int k = 0; k < 30000; ++k) {
    const StepResult r = step(x, s, rng);
    CHECK(r.t >= 0.0);
    CHECK(r.t <= 1.0);
    const Point y = segment_map(r.vertex, r.t, x);
    CHECK((y.coords() - r.next.coords()).norm() == 0.0);
    ++counts[r.vertex];
    x = r.next;
  }
  CHECK(counts[1] / 30000.0 == doctest::Approx(0.5).epsilon(0.03));
  CHECK(counts[2] / 30000.0 == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("vertex with p_i(e_i) = 1 is never left") {
  const WeightSpec s = WeightSpec::builtin("barycentric", 2);
  Philox4x32 rng(5, 0);
  Point x = vertex(2, 2);
  for (int k = 0; k < 100; ++k) x = step(x, s, rng).next;
  CHECK(x.coords() == vertex(2, 2).coords());
}

TEST_CASE("simulate records burn-in and thinning") {
  ChainConfig c = config(WeightSpec::affine(Eigen::Vector3d(0.1, 0.2, 0.3)), Point{0.3, 0.4}, 1000, 9);
  const Trajectory full = simulate(c);
  CHECK(full.size() == 1001);
  CHECK(full.vertex[0] == -1);
  c.burn_in = 100;
  c.thin = 10;
  const Trajectory part = simulate(c);
  CHECK(part.size() == 91);
  CHECK(part.steps.front() == 100);
  for (Eigen::Index k = 0; k < part.size(); ++k) CHECK(part.x.row(k) == full.x.row(part.steps[k]));
  c.thin = 0;
  CHECK_THROWS(simulate(c));
}

TEST_CASE("ergodic average for constant weights") {
  // stationary law Dir(p), mean p
  ChainConfig c = config(WeightSpec::constant(Eigen::Vector3d(0.3, 0.5, 0.2)), barycenter<double>(2), 200000, 4);
  c.burn_in = 100;
  const ErgodicResult r = ergodic_average(c, barycentric_coordinates());
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r.mean[i] - (i == 0 ? 0.3 : i == 1 ? 0.5 : 0.2)) <= 5 * r.std_error[i]);
}

TEST_CASE("absorption does not depend on the thread count") {
  const ChainConfig c = config(WeightSpec::builtin("barycentric", 2), Point{0.3, 0.4}, 300, 11);
  const std::vector<Target> t = {{Target::Kind::Vertex, 0, 0}, {Target::Kind::Vertex, 1, 1}, {Target::Kind::Vertex, 2, 2}};
  const AbsorptionResult a = absorption_experiment(c, t, 1e-3, 500, 1);
  const AbsorptionResult b = absorption_experiment(c, t, 1e-3, 500, 4);
  CHECK(a.counts == b.counts);
  CHECK(a.counts[0] + a.counts[1] + a.counts[2] + a.unresolved_count == 500);
  CHECK(distance(Point{0.5, 0.0}, Target{Target::Kind::Edge, 0, 1}) == 0.0);
  CHECK(distance(Point{0.5, 0.5}, Target{Target::Kind::Vertex, 0, 0}) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("trajectory csv") {
  const auto path = std::filesystem::temp_directory_path() / "dfchain_traj_test.csv";
  const Trajectory tr = simulate(config(WeightSpec::constant(Eigen::Vector2d(0.5, 0.5)), Point{0.5}, 3, 2));
  write_trajectory_csv(path.string(), tr);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "step,x1,i,t");
  CHECK(first == "0,0.5,,");
  std::filesystem::remove(path);
  CHECK(sidecar(config(WeightSpec::constant(Eigen::Vector2d(0.5, 0.5)), Point{0.5}, 3, 2))["seed"] == 2);
}
