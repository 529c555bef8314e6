#include "dfchain/chain.hpp"

#include "dfchain/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dfc {

void validate(const ChainConfig& c) {
  if (c.start.dim() != c.spec.dim()) throw std::invalid_argument("start point dimension does not match weights");
  if (c.steps < 0) throw std::invalid_argument("steps must be nonnegative");
  if (c.burn_in < 0 || (c.burn_in > 0 && c.burn_in >= c.steps)) throw std::invalid_argument("burn_in must be below steps");
  if (c.thin < 1) throw std::invalid_argument("thin must be positive");
}

StepResult step(const Point& x, const WeightSpec& spec, Philox4x32& rng) {
  const Bary p = eval(spec, x);
  const double u = rng.open01();
  int i = int(p.size()) - 1;
  double acc = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc && p[k] > 0.0) {
      i = k;
      break;
    }
  }
  while (p[i] <= 0.0 && i > 0) --i;  // rounding left u past the last positive weight
  const double t = rng.closed01();
  return {segment_map(i, t, x), i, t};
}

Trajectory simulate(const ChainConfig& c) {
  validate(c);
  Philox4x32 rng(c.seed, c.stream);
  Trajectory tr;
  tr.dim = c.start.dim();
  tr.seed = c.seed;
  tr.stream = c.stream;
  const std::int64_t first = c.burn_in;
  const std::int64_t n = (c.steps - first) / c.thin + 1;
  tr.x.resize(n, tr.dim);
  Point x = c.start;
  int vi = -1;
  double t = 1.0;
  Eigen::Index row = 0;
  for (std::int64_t k = 0;; ++k) {
    if (k >= first && (k - first) % c.thin == 0) {
      tr.steps.push_back(k);
      tr.x.row(row++) = x.coords().transpose();
      tr.vertex.push_back(vi);
      tr.t.push_back(t);
    }
    if (k == c.steps) break;
    const StepResult s = step(x, c.spec, rng);
    x = s.next;
    vi = s.vertex;
    t = s.t;
  }
  return tr;
}

Observable barycentric_coordinates() {
  return [](const Point& x) { return Eigen::VectorXd(x.barycentric()); };
}

ErgodicResult ergodic_average(const ChainConfig& c, const Observable& f) {
  validate(c);
  const std::int64_t n = (c.steps - c.burn_in) / c.thin + 1;
  const int batches = int(std::clamp<std::int64_t>(std::int64_t(std::sqrt(double(n))), 2, 1000));
  const std::int64_t per = n / batches;
  if (per < 1) throw std::invalid_argument("too few recorded states for batch means");
  Philox4x32 rng(c.seed, c.stream);
  Point x = c.start;
  Eigen::VectorXd total, batch;
  Eigen::MatrixXd means;
  std::int64_t rec = 0, in_batch = 0;
  int b = 0;
  for (std::int64_t k = 0;; ++k) {
    if (k >= c.burn_in && (k - c.burn_in) % c.thin == 0) {
      const Eigen::VectorXd v = f(x);
      if (rec == 0) {
        total = Eigen::VectorXd::Zero(v.size());
        batch = total;
        means.resize(v.size(), batches);
      }
      total += v;
      ++rec;
      // the last per * batches records form the batches
      if (b < batches && rec > n - per * batches) {
        batch += v;
        if (++in_batch == per) {
          means.col(b++) = batch / double(per);
          batch.setZero();
          in_batch = 0;
        }
      }
    }
    if (k == c.steps) break;
    x = step(x, c.spec, rng).next;
  }
  ErgodicResult r;
  r.samples = rec;
  r.batches = batches;
  r.mean = total / double(rec);
  const Eigen::VectorXd bm = means.rowwise().mean();
  const Eigen::VectorXd var = (means.colwise() - bm).array().square().rowwise().sum() / double(batches - 1);
  r.std_error = (var / double(batches)).cwiseSqrt();
  return r;
}

std::string Target::label() const {
  if (kind == Kind::Vertex) return "e" + std::to_string(a);
  return "[e" + std::to_string(a) + ",e" + std::to_string(b) + "]";
}

double distance(const Point& x, const Target& t) {
  const int d = x.dim();
  const auto ea = vertex(t.a, d).coords();
  if (t.kind == Target::Kind::Vertex) return (x.coords() - ea).norm();
  const auto eb = vertex(t.b, d).coords();
  const Coords<double> u = eb - ea;
  const double s = std::clamp((x.coords() - ea).dot(u) / u.squaredNorm(), 0.0, 1.0);
  return (x.coords() - ea - s * u).norm();
}

Eigen::MatrixXd final_states(const ChainConfig& c, std::int64_t replicas, int threads) {
  validate(c);
  Eigen::MatrixXd out(replicas, c.start.dim());
  parallel_for(replicas, threads, [&](std::int64_t begin, std::int64_t end, int) {
    for (std::int64_t r = begin; r < end; ++r) {
      Philox4x32 rng(c.seed, std::uint64_t(r));
      Point x = c.start;
      for (std::int64_t k = 0; k < c.steps; ++k) x = step(x, c.spec, rng).next;
      out.row(r) = x.coords().transpose();
    }
  });
  return out;
}

AbsorptionResult absorption_experiment(const ChainConfig& c, const std::vector<Target>& targets, double radius,
                                       std::int64_t replicas, int threads) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (replicas < 1) throw std::invalid_argument("need at least one replica");
  const Eigen::MatrixXd fin = final_states(c, replicas, threads);
  AbsorptionResult r;
  r.targets = targets;
  r.replicas = replicas;
  r.counts.assign(targets.size(), 0);
  for (std::int64_t k = 0; k < replicas; ++k) {
    const Point x(Coords<double>(fin.row(k).transpose()));
    int best = -1;
    double bd = radius;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const double dj = distance(x, targets[j]);
      if (dj <= bd) {
        bd = dj;
        best = int(j);
      }
    }
    if (best < 0)
      ++r.unresolved_count;
    else
      ++r.counts[best];
  }
  for (auto n : r.counts) r.frequencies.push_back(double(n) / double(replicas));
  r.unresolved = double(r.unresolved_count) / double(replicas);
  return r;
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "step");
  for (int k = 1; k <= tr.dim; ++k) std::fprintf(f, ",x%d", k);
  std::fprintf(f, ",i,t\n");
  for (Eigen::Index r = 0; r < tr.size(); ++r) {
    std::fprintf(f, "%lld", static_cast<long long>(tr.steps[r]));
    for (int k = 0; k < tr.dim; ++k) std::fprintf(f, ",%.17g", tr.x(r, k));
    if (tr.vertex[r] < 0)
      std::fprintf(f, ",,\n");
    else
      std::fprintf(f, ",%d,%.17g\n", tr.vertex[r], tr.t[r]);
  }
  std::fclose(f);
}

nlohmann::json sidecar(const ChainConfig& c) {
  const auto& s = c.start.coords();
  return {{"weights", to_json(c.spec)},
          {"start", std::vector<double>(s.data(), s.data() + s.size())},
          {"steps", c.steps},
          {"burn_in", c.burn_in},
          {"thin", c.thin},
          {"seed", c.seed},
          {"stream", c.stream},
          {"rng", "philox4x32-10"}};
}

}  // namespace dfc
