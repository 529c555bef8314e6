#pragma once

#include "dfchain/absorbing.hpp"
#include "dfchain/weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dfc {

// Weight specs used by the classifier checks, one per class.
WeightSpec d1_fixture(D1Class c);
WeightSpec d2_fixture(D2Class c);

struct ValidationOptions {
  std::uint64_t seed = 20240611;
  int threads = 1;
  std::string out_dir;  // artifacts are written here when non-empty
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<std::string> checks;  // one line per sub-check
  nlohmann::json metrics;
  double seconds = 0.0;
};

CriterionResult check_dirichlet_fixed_point(const ValidationOptions& o);     // 1
CriterionResult check_affine_simulation(const ValidationOptions& o);        // 2
CriterionResult check_d1_closed_form(const ValidationOptions& o);           // 3
CriterionResult check_contraction(const ValidationOptions& o);              // 4
CriterionResult check_markov_axioms(const ValidationOptions& o);            // 5
CriterionResult check_absorption(const ValidationOptions& o);               // 6
CriterionResult check_d1_classification(const ValidationOptions& o);       // 7
CriterionResult check_d2_classification(const ValidationOptions& o);       // 8
CriterionResult check_ifs_report(const ValidationOptions& o);               // 9
CriterionResult check_reproducibility(const ValidationOptions& o);          // 10

using Criterion = std::function<CriterionResult(const ValidationOptions&)>;
const std::vector<Criterion>& criteria();

// Runs the selected criteria (all when ids is empty).
std::vector<CriterionResult> run_validation(const ValidationOptions& o, const std::vector<int>& ids = {});

// Without timings, so repeated runs compare equal.
nlohmann::json to_json(const CriterionResult& r);

// Deterministic artifact set shared by the reproducibility check and the CLI.
void write_reference_artifacts(const std::string& dir, std::uint64_t seed, int threads = 1);

}  // namespace dfc
