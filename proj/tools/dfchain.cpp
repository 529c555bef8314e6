// dfchain: simulate, invariant, classify, check-uniqueness, validate.
// Exit status: 0 ok, 1 validation failure, 2 bad input.
#include "dfchain/absorbing.hpp"
#include "dfchain/chain.hpp"
#include "dfchain/dirichlet.hpp"
#include "dfchain/ifs.hpp"
#include "dfchain/integrate.hpp"
#include "dfchain/operators.hpp"
#include "dfchain/validation.hpp"
#include "dfchain/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dfc;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string spec_path;
  int dim = 0;
  std::int64_t steps = 100000;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  std::int64_t replicas = 1;
  std::uint64_t seed = 1;
  int resolution = 64;
  double tol = 1e-8;
  int threads = 1;
  int substeps = 4;
  int max_iter = 10000;
  int samples = 20000;
  double alpha = 1.0;
  std::string start;
  std::string color_scale = "log";
  std::string out = "out";
  std::vector<int> only;
};

class Timer {
 public:
  void mark(const std::string& what) {
    const auto now = std::chrono::steady_clock::now();
    timings_[what] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const nlohmann::json& json() const { return timings_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  nlohmann::json timings_ = nlohmann::json::object();
};

WeightSpec load(const Options& o) {
  if (o.spec_path.empty()) throw InputError("--spec is required");
  WeightSpec spec;
  try {
    spec = load_weights(o.spec_path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  if (o.dim > 0 && o.dim != spec.dim())
    throw InputError("--dim " + std::to_string(o.dim) + " does not match the spec dimension " +
                     std::to_string(spec.dim()));
  return spec;
}

Point start_point(const Options& o, int d) {
  if (o.start.empty()) return barycenter<double>(d);
  Coords<double> x(d);
  std::stringstream ss(o.start);
  std::string tok;
  int k = 0;
  while (std::getline(ss, tok, ',')) {
    if (k >= d) throw InputError("--start has more than " + std::to_string(d) + " coordinates");
    try {
      x[k++] = std::stod(tok);
    } catch (const std::exception&) {
      throw InputError("--start: cannot parse '" + tok + "'");
    }
  }
  if (k != d) throw InputError("--start needs " + std::to_string(d) + " coordinates");
  try {
    return Point(x);
  } catch (const std::exception& e) {
    throw InputError(std::string("--start: ") + e.what());
  }
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return fs::path(o.out);
}

void write(const fs::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

// enough to rerun: the weights are inlined next to their path
nlohmann::json config_echo(const std::string& command, const Options& o, const WeightSpec* spec = nullptr) {
  nlohmann::json c{{"command", command}, {"seed", o.seed}, {"threads", o.threads}, {"out", o.out}};
  if (!o.spec_path.empty()) c["spec"] = o.spec_path;
  if (spec) c["weights"] = to_json(*spec);
  if (o.dim > 0) c["dim"] = o.dim;
  return c;
}

void write_manifest(const fs::path& dir, nlohmann::json config, const Timer& t, nlohmann::json extra,
                    const std::vector<std::string>& artifacts) {
  const nlohmann::json seed = config["seed"];
  nlohmann::json m{{"tool", "dfchain"}, {"version", kVersion}, {"config", std::move(config)},
                   {"seed", seed},      {"timings", t.json()}, {"artifacts", artifacts}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  write(dir / "manifest.json", m);
}

int cmd_simulate(const Options& o) {
  Timer t;
  ChainConfig c;
  c.spec = load(o);
  c.start = start_point(o, c.spec.dim());
  c.steps = o.steps;
  c.burn_in = o.burn_in;
  c.thin = o.thin;
  c.seed = o.seed;
  try {
    validate(c);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  if (o.replicas < 1) throw InputError("--replicas must be positive");
  const fs::path dir = out_dir(o);
  const Trajectory tr = simulate(c);
  t.mark("simulate");
  write_trajectory_csv((dir / "trajectory.csv").string(), tr);
  write(dir / "trajectory.json", sidecar(c));
  std::vector<std::string> artifacts = {"trajectory.csv", "trajectory.json"};
  nlohmann::json config = config_echo("simulate", o, &c.spec);
  config.update({{"steps", o.steps}, {"burn_in", o.burn_in}, {"thin", o.thin}, {"replicas", o.replicas},
                 {"start", std::vector<double>(c.start.coords().data(), c.start.coords().data() + c.start.dim())}});
  if (o.replicas > 1) {
    // end states of independent replicas, replica r on stream r
    const Eigen::MatrixXd fin = final_states(c, o.replicas, o.threads);
    t.mark("replicas");
    std::FILE* f = std::fopen((dir / "final_states.csv").string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot write final_states.csv");
    std::fprintf(f, "replica");
    for (int k = 1; k <= c.spec.dim(); ++k) std::fprintf(f, ",x%d", k);
    std::fprintf(f, "\n");
    for (Eigen::Index r = 0; r < fin.rows(); ++r) {
      std::fprintf(f, "%ld", long(r));
      for (Eigen::Index k = 0; k < fin.cols(); ++k) std::fprintf(f, ",%.17g", fin(r, k));
      std::fprintf(f, "\n");
    }
    std::fclose(f);
    artifacts.push_back("final_states.csv");
  }
  write_manifest(dir, config, t, {{"recorded_states", tr.size()}}, artifacts);
  std::printf("wrote %ld states to %s\n", long(tr.size()), (dir / "trajectory.csv").c_str());
  return 0;
}

int cmd_invariant(const Options& o) {
  Timer t;
  const WeightSpec spec = load(o);
  if (spec.dim() > 2) throw InputError("invariant densities are computed for d <= 2");
  if (o.resolution < 1 || o.resolution > 4096) throw InputError("--resolution must be in 1..4096");
  const fs::path dir = out_dir(o);
  const SimplexGrid grid(spec.dim(), o.resolution);
  KernelOptions ko;
  ko.threads = o.threads;
  ko.substeps = o.substeps;
  const TransferOperator op(spec, grid, ko);
  t.mark("kernel");
  const PowerResult pr = power_iterate(op, GridDensity::uniform(grid), o.tol, o.max_iter);
  t.mark("power_iteration");
  write_density_csv((dir / "density.csv").string(), pr.density);
  write_density_svg((dir / "density.svg").string(), pr.density,
                    o.color_scale == "linear" ? ColorScale::Linear : ColorScale::Log);
  nlohmann::json result{{"status", to_string(pr.status)},
                        {"iterations", pr.iterations},
                        {"last_step", pr.last_step},
                        {"vertex_mass", pr.vertex_mass}};
  // closed-form references where the theory supplies one
  std::optional<Eigen::VectorXd> theta;
  if (spec.kind() == WeightKind::Constant) theta = std::get<ConstantWeights>(spec.storage()).p;
  if (spec.kind() == WeightKind::Affine) theta = std::get<AffineWeights>(spec.storage()).theta;
  if (theta && (theta->array() > 0.0).all()) {
    result["dirichlet_theta"] = std::vector<double>(theta->data(), theta->data() + theta->size());
    result["l1_vs_dirichlet"] = l1_distance(pr.density, GridDensity(grid, dirichlet_cell_masses(grid, *theta)));
    t.mark("dirichlet_reference");
  }
  if (spec.dim() == 1) {
    try {
      result["l1_vs_closed_form"] = l1_distance(pr.density, d1_closed_form(spec, grid));
      t.mark("closed_form");
    } catch (const std::domain_error& e) {
      result["closed_form"] = e.what();
    }
  }
  nlohmann::json config = config_echo("invariant", o, &spec);
  config.update({{"resolution", o.resolution}, {"tol", o.tol}, {"substeps", o.substeps}, {"max_iter", o.max_iter},
                 {"color_scale", o.color_scale}});
  write_manifest(dir, config, t, {{"result", result}}, {"density.csv", "density.svg"});
  std::printf("%s after %d iterations\n", to_string(pr.status).c_str(), pr.iterations);
  if (result.contains("l1_vs_dirichlet")) std::printf("L1 to Dirichlet: %.3e\n", result["l1_vs_dirichlet"].get<double>());
  return 0;
}

int cmd_classify(const Options& o) {
  Timer t;
  const WeightSpec spec = load(o);
  const fs::path dir = out_dir(o);
  nlohmann::json report;
  std::vector<MemberSet> members;
  std::vector<std::string> artifacts = {"classification.json"};
  if (spec.dim() == 1) {
    const D1Classification c = classify_d1(spec);
    report = to_json(c);
    members = c.members;
  } else if (spec.dim() == 2) {
    if (o.resolution < 16) throw InputError("--resolution must be at least 16 to classify");
    KnOptions ko;
    ko.resolution = o.resolution;
    const D2Classification c = classify_d2(spec, ko);
    report = to_json(c);
    members = c.members;
    write_classification_svg((dir / "classification.svg").string(), c);
    artifacts.push_back("classification.svg");
  } else {
    throw InputError("classification covers d = 1 and d = 2 only");
  }
  t.mark("classify");
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& m : members) {
    const EscapeReport e = verify_absorbing(spec, m);
    nlohmann::json w = nlohmann::json::array();
    for (const auto& x : e.witnesses) w.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    checks.push_back({{"member", m.label()}, {"max_escape", e.max_escape}, {"mean_escape", e.mean_escape},
                      {"samples", e.samples}, {"witnesses", w}});
  }
  report["escape"] = checks;
  t.mark("verify");
  write(dir / "classification.json", report);
  nlohmann::json config = config_echo("classify", o, &spec);
  config["resolution"] = o.resolution;
  write_manifest(dir, config, t, {{"class", report["class"]}}, artifacts);
  std::printf("%s\n", report["class"].get<std::string>().c_str());
  return 0;
}

int cmd_uniqueness(const Options& o) {
  Timer t;
  const WeightSpec spec = load(o);
  if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw InputError("--alpha must be in (0,1]");
  const fs::path dir = out_dir(o);
  const UniquenessReport r = check_uniqueness(spec, o.alpha, o.samples);
  t.mark("check");
  write(dir / "uniqueness.json", to_json(r));
  nlohmann::json config = config_echo("check-uniqueness", o, &spec);
  config.update({{"alpha", o.alpha}, {"samples", o.samples}});
  write_manifest(dir, config, t, {{"verdict", to_string(r.verdict)}}, {"uniqueness.json"});
  std::printf("%s\n", to_string(r.verdict).c_str());
  return 0;
}

int cmd_validate(const Options& o) {
  Timer t;
  const fs::path dir = out_dir(o);
  ValidationOptions vo;
  vo.seed = o.seed;
  vo.threads = o.threads;
  vo.out_dir = dir.string();
  nlohmann::json results = nlohmann::json::array();
  nlohmann::json seconds = nlohmann::json::object();
  int failed = 0;
  for (const auto& r : run_validation(vo, o.only)) {
    std::printf("criterion %2d: %s  %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str());
    for (const auto& c : r.checks) std::printf("    %s\n", c.c_str());
    results.push_back(to_json(r));
    seconds[std::to_string(r.id)] = r.seconds;
    failed += !r.pass;
  }
  t.mark("validate");
  write(dir / "validation.json", {{"seed", o.seed}, {"criteria", results}, {"failed", failed}});
  nlohmann::json config = config_echo("validate", o);
  config["only"] = o.only;
  std::vector<std::string> artifacts;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") artifacts.push_back(e.path().filename().string());
  std::sort(artifacts.begin(), artifacts.end());
  write_manifest(dir, config, t, {{"criterion_seconds", seconds}, {"failed", failed}}, artifacts);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-weight chain on the simplex"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    c->add_option("--threads", o.threads, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));
    c->add_option("--out", o.out, "output directory")->capture_default_str();
  };
  auto with_spec = [&](CLI::App* c) {
    c->add_option("--spec", o.spec_path, "weight spec JSON")->required();
    c->add_option("--dim", o.dim, "expected dimension");
  };

  auto* sim = app.add_subcommand("simulate", "run the chain and write its trajectory");
  with_spec(sim);
  common(sim);
  sim->add_option("--steps", o.steps, "transitions")->capture_default_str();
  sim->add_option("--burn-in", o.burn_in, "unrecorded leading steps")->capture_default_str();
  sim->add_option("--thin", o.thin, "record every n-th state")->capture_default_str();
  sim->add_option("--replicas", o.replicas, "independent replicas for final_states.csv")->capture_default_str();
  sim->add_option("--start", o.start, "start coordinates x1,..,xd (default: barycenter)");

  auto* inv = app.add_subcommand("invariant", "invariant density by power iteration");
  with_spec(inv);
  common(inv);
  inv->add_option("--resolution", o.resolution, "grid resolution")->capture_default_str();
  inv->add_option("--tol", o.tol, "L1 step tolerance")->capture_default_str();
  inv->add_option("--substeps", o.substeps, "start points per cell side")->capture_default_str()->check(CLI::Range(1, 64));
  inv->add_option("--max-iter", o.max_iter, "iteration cap")->capture_default_str();
  inv->add_option("--color-scale", o.color_scale, "SVG colour scale")
      ->capture_default_str()
      ->check(CLI::IsMember({"linear", "log"}));

  auto* cls = app.add_subcommand("classify", "minimal absorbing compact sets");
  with_spec(cls);
  common(cls);
  cls->add_option("--resolution", o.resolution, "raster resolution")->capture_default_str();

  auto* uni = app.add_subcommand("check-uniqueness", "uniqueness hypotheses for the invariant measure");
  with_spec(uni);
  common(uni);
  uni->add_option("--alpha", o.alpha, "Holder exponent")->capture_default_str();
  uni->add_option("--samples", o.samples, "sample budget")->capture_default_str();

  auto* val = app.add_subcommand("validate", "acceptance suite");
  common(val);
  val->add_option("--only", o.only, "criterion ids to run")->check(CLI::Range(1, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*sim) return cmd_simulate(o);
    if (*inv) return cmd_invariant(o);
    if (*cls) return cmd_classify(o);
    if (*uni) return cmd_uniqueness(o);
    if (*val) return cmd_validate(o);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "weights invalid: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
