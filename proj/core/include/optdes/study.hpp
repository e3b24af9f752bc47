// Study-definition ingestion (JSON), theta-sample CSV loading, and the
// versioned machine-readable reports emitted by the command-line tools.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "optdes/simulate.hpp"

namespace optdes {

// Schema violations carry the offending field path in what().
class StudyFileError : public std::runtime_error {
 public:
  explicit StudyFileError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StudyFile {
  std::string name;
  std::vector<Vector> strata_x;
  std::vector<long> counts;  // empty when only linear constraints bound S
  long budget = 0;
  bool stratum_caps = true;
  std::vector<LinearConstraint> linear;  // weight scale
  std::optional<GlmSpec> glm;
  std::optional<MultinomialSpec> multinomial;
  std::optional<Vector> parameters;
  std::optional<PriorSpec> prior;
  LiftOneConfig optimizer;

  int stratum_count() const { return static_cast<int>(strata_x.size()); }
  int dimension() const;
};

StudyFile load_study(const std::string& path);
StudyFile parse_study(const std::string& json_text,
                      const std::string& base_dir = ".");

FeasibleRegion region_from_study(const StudyFile& study);

// Unit Fisher information at the study's parameter vector.
FisherAtoms local_atoms(const StudyFile& study);

// Expectation-averaged atoms under the study's prior; the seed drives the
// Monte-Carlo integration for named-marginal GLM priors.
FisherAtoms ew_atoms(const StudyFile& study, std::uint64_t seed);

// CSV of theta draws, one row per line; '#' comment lines are skipped.
Matrix load_theta_samples(const std::string& path, int expected_width);

struct SimStudy {
  StudyFile study;
  SimConfig sim;
};
SimStudy load_sim_study(const std::string& path);

// Accepts {"weights": [...]} or a design report with allocation.weights.
Vector parse_allocation_text(const std::string& json_text);
Vector load_allocation(const std::string& path);

// Reports: stable key order, versioned schema, deterministic serialization.
std::string design_report_json(const StudyFile& study,
                               const std::string& criterion,
                               const OptimResult& result,
                               const Eigen::VectorXi& counts,
                               long skipped_prior_samples);
std::string allocate_report_json(const StudyFile& study,
                                 const std::string& sampler, const Vector& w,
                                 const Eigen::VectorXi& counts);
std::string efficiency_report_json(const StudyFile& study,
                                   const std::string& baseline,
                                   const std::string& target,
                                   double efficiency_percent,
                                   double log_det_target,
                                   double log_det_baseline);
std::string sim_report_json(const SimReport& report, std::uint64_t seed);
std::string sim_report_csv(const SimReport& report);
std::string counterexample_report_json(const OptimResult& constrained,
                                       const OptimResult& sweeps_only,
                                       double stalled_efficiency_percent);

}  // namespace optdes
