#include "dfchain/validation.hpp"

#include "dfchain/chain.hpp"
#include "dfchain/dirichlet.hpp"
#include "dfchain/ifs.hpp"
#include "dfchain/integrate.hpp"
#include "dfchain/operators.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace dfc {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Recorder {
  CriterionResult r;
  Recorder(int id, std::string name) {
    r.id = id;
    r.name = std::move(name);
    r.pass = true;
    r.metrics = nlohmann::json::object();
  }
  void check(bool ok, const std::string& line) {
    r.pass = r.pass && ok;
    r.checks.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
  }
};

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> v) {
  Eigen::MatrixXd m(Eigen::Index(v.size()), Eigen::Index(v.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : v) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

void write_json(const std::string& dir, const std::string& name, const nlohmann::json& j) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / name) << j.dump(2) << '\n';
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Target target_of(const MemberSet& m) {
  return m.kind == MemberSet::Kind::Vertex ? Target{Target::Kind::Vertex, m.a, m.a}
                                           : Target{Target::Kind::Edge, m.a, m.b};
}

}  // namespace

WeightSpec d1_fixture(D1Class c) {
  switch (c) {
    case D1Class::FullInterval: return WeightSpec::constant(vec({0.5, 0.5}));
    case D1Class::OnlyZero: return WeightSpec::vertex_interpolated(rows({{1.0, 0.0}, {0.1, 0.9}}));
    case D1Class::OnlyOne: return WeightSpec::vertex_interpolated(rows({{0.9, 0.1}, {0.0, 1.0}}));
    case D1Class::BothEndpoints: return WeightSpec::builtin("barycentric", 1);
  }
  throw std::invalid_argument("unknown class");
}

WeightSpec d2_fixture(D2Class c) {
  // row j is p(e_j)
  switch (c) {
    case D2Class::ThreeVertices: return WeightSpec::builtin("barycentric", 2);
    case D2Class::TwoVertices:
      return WeightSpec::vertex_interpolated(rows({{1, 0, 0}, {0, 1, 0}, {0.25, 0.25, 0.5}}));
    case D2Class::OneVertex:
      return WeightSpec::vertex_interpolated(rows({{1, 0, 0}, {1. / 3, 1. / 3, 1. / 3}, {1. / 3, 1. / 3, 1. / 3}}));
    case D2Class::OneEdge:
      return WeightSpec::vertex_interpolated(rows({{0.5, 0.25, 0.25}, {0, 0.5, 0.5}, {0, 0.5, 0.5}}));
    case D2Class::VertexPlusOppositeEdge:
      return WeightSpec::vertex_interpolated(rows({{1, 0, 0}, {0, 0.5, 0.5}, {0, 0.5, 0.5}}));
    case D2Class::InteriorCompact: return WeightSpec::builtin("shadowed_hexagon", 2);
  }
  throw std::invalid_argument("unknown class");
}

CriterionResult check_dirichlet_fixed_point(const ValidationOptions& o) {
  Recorder rec(1, "Dirichlet fixed point for constant weights");
  const Eigen::VectorXd p = vec({0.3, 0.5, 0.2});
  const WeightSpec spec = WeightSpec::constant(p);
  KernelOptions ko;
  ko.threads = 1;
  double l1[2] = {0, 0};
  const int ms[2] = {64, 128};
  for (int k = 0; k < 2; ++k) {
    const auto t0 = Clock::now();
    const SimplexGrid grid(2, ms[k]);
    const TransferOperator op(spec, grid, ko);
    const PowerResult pr = power_iterate(op, GridDensity::uniform(grid));
    const GridDensity ref(grid, dirichlet_cell_masses(grid, p));
    l1[k] = l1_distance(pr.density, ref);
    const double secs = since(t0);
    const std::string tag = "m=" + std::to_string(ms[k]);
    rec.check(pr.status == PowerStatus::Converged,
              tag + ": power iteration " + to_string(pr.status) + " after " + std::to_string(pr.iterations) + " steps");
    rec.r.metrics[tag] = {{"l1", l1[k]}, {"iterations", pr.iterations}, {"status", to_string(pr.status)}};
    if (k == 0) {
      rec.check(l1[k] <= 0.05, tag + ": L1 to Dirichlet cell masses " + fmt("%.3e", l1[k]) + " <= 0.05");
      rec.check(secs <= 60.0, tag + ": single-threaded pipeline " + fmt("%.1f", secs) + " s <= 60 s");
      const RateEstimate re = estimate_rate(op, GridDensity::uniform(grid), pr.density);
      rec.check(re.rho < 1.0 && re.residual <= 0.05,
                tag + ": geometric decay rho " + fmt("%.4f", re.rho) + ", log-fit residual " +
                    fmt("%.4f", re.residual) + " <= 0.05");
      rec.r.metrics[tag]["rho"] = re.rho;
      rec.r.metrics[tag]["fit_residual"] = re.residual;
      if (!o.out_dir.empty()) {
        fs::create_directories(o.out_dir);
        write_density_csv((fs::path(o.out_dir) / "c1_density_m64.csv").string(), pr.density);
      }
    }
  }
  const double ratio = l1[1] / l1[0];
  rec.check(ratio >= 0.35 && ratio <= 0.65, "L1(128)/L1(64) = " + fmt("%.3f", ratio) + " within 0.5 +- 30%");
  rec.r.metrics["ratio"] = ratio;
  return rec.r;
}

CriterionResult check_affine_simulation(const ValidationOptions& o) {
  Recorder rec(2, "Dirichlet law for affine weights by simulation");
  const auto t0 = Clock::now();
  const Eigen::VectorXd theta = vec({0.1, 0.2, 0.3});
  ChainConfig c;
  c.spec = WeightSpec::affine(theta);
  c.start = barycenter<double>(2);
  c.burn_in = 10000;
  c.steps = c.burn_in + 1000000;
  c.seed = o.seed;
  const ErgodicResult er = ergodic_average(c, barycentric_coordinates());
  const Eigen::VectorXd expect = theta / theta.sum();
  for (int i = 0; i < 3; ++i) {
    const double z = (er.mean[i] - expect[i]) / er.std_error[i];
    rec.check(std::abs(z) <= 4.0, "mean x_" + std::to_string(i) + " " + fmt("%.5f", er.mean[i]) + " vs " +
                                      fmt("%.5f", expect[i]) + ", " + fmt("%.2f", z) + " batch SE");
  }
  c.thin = 50;
  const Trajectory tr = simulate(c);
  const FitReport fit = goodness_of_fit(tr.x, DirichletParams(theta), 16, 0.01);
  rec.check(fit.pass, "goodness of fit vs Dir(0.1,0.2,0.3) on " + std::to_string(fit.n) + " thinned states, chi2 p " +
                          fmt("%.3g", fit.chi2_p));
  const double secs = since(t0);
  rec.check(secs <= 30.0, "runtime " + fmt("%.1f", secs) + " s <= 30 s");
  rec.r.metrics = {{"mean", to_std(er.mean)}, {"std_error", to_std(er.std_error)}, {"fit", to_json(fit)}};
  write_json(o.out_dir, "c2_fit.json", rec.r.metrics);
  return rec.r;
}

CriterionResult check_d1_closed_form(const ValidationOptions& o) {
  Recorder rec(3, "closed-form invariant density on the interval");
  const int m = 256;
  const Eigen::VectorXd p = vec({0.4, 0.6});
  const WeightSpec spec = WeightSpec::constant(p);
  const SimplexGrid grid(1, m);
  KernelOptions ko;
  ko.threads = o.threads;
  const TransferOperator op(spec, grid, ko);
  const PowerResult pr = power_iterate(op, GridDensity::uniform(grid));
  const GridDensity closed = d1_closed_form(spec, grid);
  const GridDensity beta(grid, dirichlet_cell_masses(grid, p));
  const double a = l1_distance(closed, pr.density), b = l1_distance(closed, beta);
  rec.check(a <= 2.0 / m, "closed form vs power iteration L1 " + fmt("%.3e", a) + " <= 2/m");
  rec.check(b <= 1e-4, "closed form vs Beta(0.6,0.4) cell masses L1 " + fmt("%.3e", b) + " <= 1e-4");
  rec.r.metrics = {{"l1_power", a}, {"l1_beta", b}};
  return rec.r;
}

CriterionResult check_contraction(const ValidationOptions& o) {
  Recorder rec(4, "strict contraction of the dual operator");
  const SimplexGrid grid(2, 64);
  KernelOptions ko;
  ko.threads = o.threads;
  const TransferOperator op(WeightSpec::constant(vec({0.3, 0.5, 0.2})), grid, ko);
  Philox4x32 rng(o.seed, 4);
  std::exponential_distribution<double> expo(1.0);
  auto random_density = [&] {
    Eigen::VectorXd m(grid.size());
    for (Eigen::Index c = 0; c < m.size(); ++c) m[c] = expo(rng);
    return GridDensity(grid, m / m.sum());
  };
  double worst = 0.0, mass_err = 0.0;
  int strict = 0;
  for (int k = 0; k < 100; ++k) {
    const GridDensity g1 = random_density(), g2 = random_density();
    const GridDensity h1 = apply_Pstar(op, g1), h2 = apply_Pstar(op, g2);
    const double ratio = l1_distance(h1, h2) / l1_distance(g1, g2);
    worst = std::max(worst, ratio);
    if (ratio < 1.0 - 1e-6) ++strict;
    mass_err = std::max({mass_err, std::abs(h1.mass.sum() - 1.0), std::abs(h2.mass.sum() - 1.0)});
  }
  rec.check(strict == 100, std::to_string(strict) + "/100 pairs contract, worst ratio " + fmt("%.4f", worst));
  rec.check(mass_err <= 1e-12, "mass conservation error " + fmt("%.2e", mass_err) + " <= 1e-12");
  rec.r.metrics = {{"worst_ratio", worst}, {"mass_error", mass_err}};
  return rec.r;
}

CriterionResult check_markov_axioms(const ValidationOptions& o) {
  Recorder rec(5, "Markov operator axioms");
  const SimplexGrid grid(2, 16);
  const WeightSpec specs[2] = {WeightSpec::affine(vec({0.1, 0.2, 0.3})), WeightSpec::builtin("shadowed_hexagon", 2)};
  Philox4x32 rng(o.seed, 5);
  for (const WeightSpec& spec : specs) {
    const GridFunction one(grid, Eigen::VectorXd::Ones(grid.size()));
    const GridFunction p1 = apply_P(one, spec);
    rec.check((p1.value.array() == 1.0).all(), spec.kind_name() + ": P1 = 1 exactly at every cell");
    double lowest = 0.0;
    for (int k = 0; k < 500; ++k) {
      Eigen::VectorXd v(grid.size());
      for (Eigen::Index c = 0; c < v.size(); ++c) {
        const double u = rng.closed01();
        v[c] = u < 0.3 ? 0.0 : std::pow(u, 4.0);
      }
      lowest = std::min(lowest, apply_P(GridFunction(grid, v), spec).value.minCoeff());
    }
    rec.check(lowest >= 0.0, spec.kind_name() + ": 500 nonnegative functions stay nonnegative, min " +
                                 fmt("%.3g", lowest));
  }
  write_json(o.out_dir, "c5_axioms.json", {{"checks", rec.r.checks}});
  return rec.r;
}

CriterionResult check_absorption(const ValidationOptions& o) {
  Recorder rec(6, "absorption probabilities for p_i(x) = x_i");
  const auto t0 = Clock::now();
  const WeightSpec spec = WeightSpec::builtin("barycentric", 2);
  const int m = 64;
  const SimplexGrid grid(2, m);
  double harm = 0.0;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index c = 0; c < v.size(); ++c) v[c] = grid.center(c).bary(k);
    const GridFunction pf = apply_P(GridFunction(grid, v), spec);
    harm = std::max(harm, (pf.value - v).cwiseAbs().maxCoeff());
  }
  rec.check(harm <= 2.0 / m, "coordinate functions harmonic within " + fmt("%.2e", harm) + " <= 2/m");

  ChainConfig c;
  c.spec = spec;
  c.start = Point{0.3, 0.4};
  c.steps = 1000;
  c.seed = o.seed;
  const std::vector<Target> targets = {{Target::Kind::Vertex, 0, 0}, {Target::Kind::Vertex, 1, 1},
                                       {Target::Kind::Vertex, 2, 2}};
  const AbsorptionResult ar = absorption_experiment(c, targets, 1e-3, 10000, o.threads);
  const double expect[3] = {0.3, 0.3, 0.4};
  for (int i = 0; i < 3; ++i) {
    const double f = ar.frequencies[i];
    const double sd = std::sqrt(std::max(f * (1 - f), 1e-12) / double(ar.replicas));
    rec.check(std::abs(f - expect[i]) <= 4 * sd,
              "P(absorbed at e_" + std::to_string(i) + ") " + fmt("%.4f", f) + " vs " + fmt("%.1f", expect[i]) +
                  " (4 sd = " + fmt("%.4f", 4 * sd) + ")");
  }
  rec.check(ar.unresolved <= 0.01, "unresolved fraction " + fmt("%.4f", ar.unresolved) + " <= 1%");
  const double secs = since(t0);
  rec.check(secs <= 60.0, "runtime " + fmt("%.1f", secs) + " s <= 60 s");
  rec.r.metrics = {{"frequencies", ar.frequencies}, {"unresolved", ar.unresolved}, {"harmonic_error", harm}};
  write_json(o.out_dir, "c6_absorption.json", rec.r.metrics);
  return rec.r;
}

CriterionResult check_d1_classification(const ValidationOptions& o) {
  Recorder rec(7, "classification on the interval");
  const D1Class cases[4] = {D1Class::FullInterval, D1Class::OnlyZero, D1Class::OnlyOne, D1Class::BothEndpoints};
  nlohmann::json reports = nlohmann::json::array();
  for (D1Class want : cases) {
    const WeightSpec spec = d1_fixture(want);
    const D1Classification got = classify_d1(spec);
    std::string members;
    for (const auto& m : got.members) members += (members.empty() ? "" : " ") + m.label();
    rec.check(got.kind == want, to_string(want) + ": classified " + to_string(got.kind) + " {" + members + "}");
    ChainConfig c;
    c.spec = spec;
    c.start = Point{0.5};
    c.steps = 100000;
    c.seed = o.seed;
    const Eigen::MatrixXd fin = final_states(c, 100, o.threads);
    int hit = 0;
    for (Eigen::Index r = 0; r < fin.rows(); ++r) {
      const Point x{fin(r, 0)};
      double best = 1.0;
      for (const auto& m : got.members) best = std::min(best, distance(x, target_of(m)));
      hit += best <= 1e-3;
    }
    rec.check(hit >= 99, to_string(want) + ": " + std::to_string(hit) + "/100 long runs end within 1e-3 of a member");
    reports.push_back(to_json(got));
  }
  write_json(o.out_dir, "c7_classification.json", reports);
  return rec.r;
}

CriterionResult check_d2_classification(const ValidationOptions& o) {
  Recorder rec(8, "classification on the triangle");
  const D2Class cases[6] = {D2Class::ThreeVertices, D2Class::TwoVertices,
                            D2Class::OneVertex,     D2Class::OneEdge,
                            D2Class::VertexPlusOppositeEdge, D2Class::InteriorCompact};
  nlohmann::json reports = nlohmann::json::array();
  for (D2Class want : cases) {
    const D2Classification got = classify_d2(d2_fixture(want));
    rec.check(got.kind == want, to_string(want) + ": classified " + to_string(got.kind));
    double worst = 0.0;
    for (const auto& m : got.members) worst = std::max(worst, verify_absorbing(d2_fixture(want), m).max_escape);
    rec.check(worst <= 1e-6, to_string(want) + ": max sampled escape " + fmt("%.2e", worst) + " <= 1e-6");
    if (want == D2Class::InteriorCompact) {
      const bool stationary = got.kn_area.size() >= 2 && got.kn_area[1] == got.kn_area[0];
      rec.check(stationary && !got.reached_full_simplex && got.kn_converged,
                "InteriorCompact: K_1 = K_0, area " + fmt("%.4f", got.kn_area.front()) + " of 0.5");
    }
    reports.push_back(to_json(got));
  }
  const D2Classification flat = classify_d2(WeightSpec::constant(vec({1. / 3, 1. / 3, 1. / 3})));
  rec.check(flat.kind == D2Class::InteriorCompact && flat.reached_full_simplex,
            "constant weights: K_0 already covers the triangle");
  write_json(o.out_dir, "c8_classification.json", reports);
  return rec.r;
}

CriterionResult check_ifs_report(const ValidationOptions& o) {
  Recorder rec(9, "uniqueness report");
  rec.check(contraction_coefficient(1.0) == 0.5, "contraction_coefficient(1) = 0.5 exactly");
  const UniquenessReport aff = check_uniqueness(WeightSpec::affine(vec({0.1, 0.2, 0.3})));
  rec.check(aff.verdict == Verdict::UniqueByH1H2H3 && aff.h3_index && aff.delta == 0.1,
            "affine theta (0.1,0.2,0.3): " + to_string(aff.verdict) + ", delta " + fmt("%.17g", aff.delta));
  const UniquenessReport bar = check_uniqueness(WeightSpec::builtin("barycentric", 2));
  rec.check(bar.verdict == Verdict::Inconclusive, "p_i(x) = x_i: " + to_string(bar.verdict));
  // a verdict of uniqueness must never meet a classifier with several minimal absorbing sets
  for (D2Class c : {D2Class::ThreeVertices, D2Class::TwoVertices, D2Class::OneVertex, D2Class::OneEdge,
                    D2Class::VertexPlusOppositeEdge, D2Class::InteriorCompact}) {
    const WeightSpec spec = d2_fixture(c);
    const auto members = classify_d2(spec).members.size();
    const Verdict v = check_uniqueness(spec).verdict;
    rec.check(members == 1 || v == Verdict::Inconclusive,
              to_string(c) + ": " + std::to_string(members) + " minimal sets, verdict " + to_string(v));
  }
  rec.r.metrics = {{"affine", to_json(aff)}, {"barycentric", to_json(bar)}};
  write_json(o.out_dir, "c9_uniqueness.json", rec.r.metrics);
  return rec.r;
}

void write_reference_artifacts(const std::string& dir, std::uint64_t seed, int threads) {
  fs::create_directories(dir);
  const fs::path d(dir);
  ChainConfig c;
  c.spec = WeightSpec::constant(vec({0.3, 0.5, 0.2}));
  c.start = Point{0.3, 0.4};
  c.steps = 10000;
  c.seed = seed;
  write_trajectory_csv((d / "trajectory.csv").string(), simulate(c));
  std::ofstream(d / "trajectory.json") << sidecar(c).dump(2) << '\n';

  const SimplexGrid grid(2, 32);
  KernelOptions ko;
  ko.threads = threads;
  const TransferOperator op(c.spec, grid, ko);
  write_density_csv((d / "density.csv").string(), power_iterate(op, GridDensity::uniform(grid)).density);

  nlohmann::json cls = nlohmann::json::array();
  for (D2Class k : {D2Class::TwoVertices, D2Class::InteriorCompact}) cls.push_back(to_json(classify_d2(d2_fixture(k))));
  std::ofstream(d / "classification.json") << cls.dump(2) << '\n';
  std::ofstream(d / "uniqueness.json") << to_json(check_uniqueness(WeightSpec::builtin("shadowed_hexagon", 2))).dump(2)
                                       << '\n';

  c.spec = WeightSpec::builtin("barycentric", 2);
  c.steps = 200;
  const AbsorptionResult ar = absorption_experiment(
      c, {{Target::Kind::Vertex, 0, 0}, {Target::Kind::Vertex, 1, 1}, {Target::Kind::Vertex, 2, 2}}, 1e-3, 2000,
      threads);
  std::ofstream(d / "absorption.json") << nlohmann::json{{"frequencies", ar.frequencies}, {"unresolved", ar.unresolved}}
                                              .dump(2)
                                       << '\n';
}

CriterionResult check_reproducibility(const ValidationOptions& o) {
  Recorder rec(10, "bit-identical artifacts for a fixed seed");
  const fs::path base = fs::temp_directory_path() / ("dfchain_repro_" + std::to_string(o.seed) + "_" +
                                                     std::to_string(Clock::now().time_since_epoch().count()));
  const fs::path a = base / "a", b = base / "b";
  // the second run uses a different thread count on purpose
  write_reference_artifacts(a.string(), o.seed, 1);
  write_reference_artifacts(b.string(), o.seed, std::max(2, o.threads));
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  int same = 0;
  for (const auto& n : names) {
    const bool eq = fs::exists(b / n) && slurp(a / n) == slurp(b / n);
    same += eq;
    if (!eq) rec.check(false, n + " differs between runs");
  }
  rec.check(!names.empty() && same == int(names.size()),
            std::to_string(same) + "/" + std::to_string(names.size()) + " artifacts identical");
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    for (const auto& n : names) fs::copy_file(a / n, fs::path(o.out_dir) / ("c10_" + n), fs::copy_options::overwrite_existing);
  }
  fs::remove_all(base);
  rec.r.metrics = {{"files", names}};
  return rec.r;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {check_dirichlet_fixed_point, check_affine_simulation,
                                             check_d1_closed_form,        check_contraction,
                                             check_markov_axioms,         check_absorption,
                                             check_d1_classification,     check_d2_classification,
                                             check_ifs_report,            check_reproducibility};
  return all;
}

std::vector<CriterionResult> run_validation(const ValidationOptions& o, const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (std::size_t k = 0; k < criteria().size(); ++k) {
    const int id = int(k) + 1;
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = criteria()[k](o);
    } catch (const std::exception& e) {
      r.id = id;
      r.pass = false;
      r.checks.push_back(std::string("FAIL threw: ") + e.what());
    }
    r.seconds = since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"checks", r.checks}, {"metrics", r.metrics}};
}

}  // namespace dfc
