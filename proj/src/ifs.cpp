#include "dfchain/ifs.hpp"

#include "dfchain/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dfc {

double contraction_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
  return 1.0 / (1.0 + alpha);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::UniqueByConstantWeights: return "UniqueByConstantWeights";
    case Verdict::UniqueByH1H2H3: return "UniqueByH1H2H3";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// min of each p_i over the lattice {k/n} of the simplex
Eigen::VectorXd lattice_minimum(const WeightSpec& spec, int samples) {
  const int d = spec.dim();
  const int n = d == 1 ? std::max(16, samples) : std::max(16, int(std::sqrt(2.0 * samples)));
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d + 1, 1.0);
  if (d == 1) {
    for (int a = 0; a <= n; ++a) lo = lo.cwiseMin(eval(spec, Point{double(a) / n}));
    return lo;
  }
  if (d == 2) {
    for (int b = 0; b <= n; ++b)
      for (int a = 0; a + b <= n; ++a) lo = lo.cwiseMin(eval(spec, Point{double(a) / n, double(b) / n}));
    return lo;
  }
  // higher d: vertices, then random points
  for (int i = 0; i <= d; ++i) lo = lo.cwiseMin(eval(spec, vertex(i, d)));
  Philox4x32 rng(11, 0);
  for (int s = 0; s < samples; ++s) {
    Bary b(d + 1);
    for (int k = 0; k <= d; ++k) b[k] = -std::log(rng.open01());
    lo = lo.cwiseMin(eval(spec, Point::from_barycentric(b / b.sum())));
  }
  return lo;
}

}  // namespace

UniquenessReport check_uniqueness(const WeightSpec& spec, double alpha, int samples) {
  UniquenessReport r;
  r.alpha = alpha;
  r.r = contraction_coefficient(alpha);
  const int d = spec.dim();

  if (spec.kind() == WeightKind::Constant) {
    r.min_weight = std::get<ConstantWeights>(spec.storage()).p;
    r.min_exact = true;
    r.verdict = Verdict::UniqueByConstantWeights;
    r.certified = true;
    r.holder.alpha = alpha;
    r.holder.per_weight = Eigen::VectorXd::Zero(d + 1);
    r.notes.push_back("constant weights: the maps contract in mean with factor r");
    return r;
  }

  r.holder = holder_constant(spec, alpha, std::max(10, samples));
  bool h2_exact = false;
  switch (spec.kind()) {
    case WeightKind::Affine: {
      const Eigen::VectorXd& th = std::get<AffineWeights>(spec.storage()).theta;
      // p_i = theta_i + (1 - |theta|) x_i is smallest on the face x_i = 0
      r.min_weight = th;
      r.min_exact = true;
      h2_exact = true;
      break;
    }
    case WeightKind::Tabulated: {
      const auto& t = std::get<TabulatedWeights>(spec.storage());
      // linear interpolation and piecewise tables both attain their minima at table entries
      r.min_weight = t.values.colwise().minCoeff().transpose();
      r.min_exact = true;
      h2_exact = t.rule == Interpolation::Linear;
      break;
    }
    default:
      r.min_weight = lattice_minimum(spec, samples);
      break;
  }

  for (int i = 0; i <= d; ++i)
    if (r.min_weight[i] > kDeltaFloor) {
      r.h3_index = i;
      r.delta = r.min_weight[i];
      break;
    }
  const bool h2 = h2_exact || !r.holder.possibly_not_holder;
  if (h2_exact)
    r.notes.push_back("weights are Lipschitz, so H2 holds");
  else if (h2)
    r.notes.push_back("sampled Holder ratios stay bounded as the separation shrinks");
  else
    r.notes.push_back("sampled Holder ratios grow at small separations; H2 may fail");
  if (!r.h3_index) {
    r.notes.push_back("every weight gets within 1e-6 of 0 somewhere; H3 not established");
    return r;
  }
  r.certified = r.min_exact && h2_exact;
  if (h2) {
    r.verdict = Verdict::UniqueByH1H2H3;
    if (!r.certified) r.notes.push_back("verdict rests on sampled evidence, not a certificate");
  }
  return r;
}

nlohmann::json to_json(const UniquenessReport& r) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["r"] = r.r;
  j["holder"] = {{"constant", r.holder.constant},
                 {"per_weight", std::vector<double>(r.holder.per_weight.data(),
                                                    r.holder.per_weight.data() + r.holder.per_weight.size())},
                 {"scales", r.holder.scales},
                 {"by_scale", r.holder.by_scale},
                 {"possibly_not_holder", r.holder.possibly_not_holder}};
  j["min_weight"] = std::vector<double>(r.min_weight.data(), r.min_weight.data() + r.min_weight.size());
  j["min_exact"] = r.min_exact;
  j["delta_floor"] = kDeltaFloor;
  if (r.h3_index)
    j["h3"] = {{"index", *r.h3_index}, {"delta", r.delta}};
  else
    j["h3"] = nullptr;
  j["certified"] = r.certified;
  j["verdict"] = to_string(r.verdict);
  j["notes"] = r.notes;
  return j;
}

}  // namespace dfc
