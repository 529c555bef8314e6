#pragma once

#include "dfchain/weights.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dfc {

// E t^alpha for t uniform on [0,1]: the mean alpha-Lipschitz ratio of the maps.
double contraction_coefficient(double alpha);

enum class Verdict { UniqueByConstantWeights, UniqueByH1H2H3, Inconclusive };
std::string to_string(Verdict v);

inline constexpr double kDeltaFloor = 1e-6;

struct UniquenessReport {
  double alpha = 1.0;
  double r = 0.5;
  HolderEstimate holder;
  Eigen::VectorXd min_weight;  // min over the simplex of each p_i
  bool min_exact = false;      // minima are exact rather than sampled
  std::optional<int> h3_index;
  double delta = 0.0;
  bool certified = false;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> notes;
};

// samples is the sample count for the Holder estimate; the minimum search
// uses a lattice with about as many points.
UniquenessReport check_uniqueness(const WeightSpec& spec, double alpha = 1.0, int samples = 20000);

nlohmann::json to_json(const UniquenessReport& r);

}  // namespace dfc
