// Monte-Carlo comparison engine: simulate binary responses over a fixed
// population, let each sampler pick its subjects, refit the model, and
// summarize RMSE per coefficient group.
#pragma once

#include <optional>
#include <string>

#include "optdes/samplers.hpp"

namespace optdes {

struct FitResult {
  Vector estimate;
  bool converged = false;
  bool separation = false;
  int iterations = 0;
};

// Grouped Newton-Raphson/IRLS for the Bernoulli-logit likelihood. Rows of x
// are stratum design rows; successes/trials are per-row response summaries.
FitResult fit_logistic(const Matrix& x, const Vector& successes,
                       const Vector& trials);

// Per-stratum success counts of counts[i] Bernoulli(expit(eta_i)) draws.
std::vector<long> generate_responses(const GlmSpec& model, const Vector& theta,
                                     const std::vector<long>& counts,
                                     std::uint64_t seed);

// sqrt(mean over the index set of squared estimation errors).
double rmse(const Vector& theta_hat, const Vector& theta,
            const std::vector<int>& indices);

struct IndexSet {
  std::string label;
  std::vector<int> indices;
};

struct SamplerSpec {
  SamplerKind kind = SamplerKind::srswor;
  std::string label;
  std::optional<PriorSpec> prior;  // ew_d_optimal only
};

struct SimConfig {
  int replicates = 100;
  std::vector<long> stratum_counts;
  long budget = 0;
  GlmSpec model;
  Vector theta;
  std::vector<SamplerSpec> samplers;
  std::vector<IndexSet> index_sets;
  std::uint64_t seed = 1;
  LiftOneConfig optimizer;
};

struct SamplerSummary {
  std::string label;
  Eigen::VectorXi allocation;  // fixed allocation; zero length for srswor
  std::vector<double> mean_rmse;
  std::vector<double> sd_rmse;
  long separation_count = 0;
  long nonconverged_count = 0;
};

struct SimReport {
  int replicates = 0;
  std::vector<IndexSet> index_sets;
  std::vector<SamplerSummary> rows;  // "Full Data" first
};

// Bitwise deterministic for a fixed config; every replicate and sampler uses
// its own derived substream.
SimReport run_study(const SimConfig& cfg);

}  // namespace optdes
