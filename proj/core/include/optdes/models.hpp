// Model specifications and their per-stratum unit Fisher information
// matrices: GLMs (F_i = nu_i h_i h_i^T) and multinomial logit models,
// both locally at a parameter vector and averaged over a prior (EW).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optdes/linalg.hpp"

namespace optdes {

struct Term {
  enum class Kind { intercept, continuous, indicator, interaction };
  Kind kind = Kind::intercept;
  int covariate = -1;         // continuous / indicator
  double level = 0.0;         // indicator: 1{x_cov == level}
  std::vector<Term> factors;  // interaction: exactly two factors

  double eval(const Vector& x) const;

  static Term intercept() { return Term{}; }
  static Term continuous(int covariate);
  static Term indicator(int covariate, double level);
  static Term interaction(Term first, Term second);
};

using PredictorTerms = std::vector<Term>;

Vector design_row(const PredictorTerms& terms, const Vector& x);

enum class FamilyLink {
  normal_identity,
  bernoulli_logit,
  bernoulli_probit,
  bernoulli_cloglog,
  bernoulli_loglog,
  bernoulli_cauchit,
  poisson_log,
  gamma_reciprocal,
  inverse_gaussian_inverse_squared,
};

// GLM weight nu(eta) = (d mu/d eta)^2 / Var(Y). family_constant carries
// sigma^2 (normal), k (gamma) or lambda (inverse Gaussian); unused otherwise.
// Throws std::domain_error for eta outside a reciprocal-type link's range.
double nu(FamilyLink link, double eta, double family_constant = 1.0);

struct GlmSpec {
  FamilyLink link = FamilyLink::bernoulli_logit;
  double family_constant = 1.0;
  PredictorTerms terms;
  std::vector<Vector> strata;

  int dimension() const { return static_cast<int>(terms.size()); }
  int stratum_count() const { return static_cast<int>(strata.size()); }
  Matrix design_matrix() const;  // m x p, rows h(x_i)
};

struct FisherAtoms {
  int p = 0;
  std::vector<Matrix> atoms;
  bool rank_one = false;    // every atom is nu * h h^T (GLM construction)
  long skipped_samples = 0; // EW-from-samples: infeasible draws dropped

  int count() const { return static_cast<int>(atoms.size()); }
};

FisherAtoms glm_fisher_atoms(const GlmSpec& spec, const Vector& theta);

struct PriorMarginal {
  enum class Dist { uniform, normal, gamma };
  Dist dist = Dist::normal;
  double a = 0.0;  // lower / mean / shape
  double b = 1.0;  // upper / sd / scale
};

struct PriorSpec {
  // Either a finite sample matrix (rows are theta draws) or an independent
  // product of named marginals integrated by fixed-seed Monte Carlo.
  Matrix samples;  // used when rows > 0
  std::vector<PriorMarginal> marginals;
  long draws = 200000;

  bool from_samples() const { return samples.rows() > 0; }
};

FisherAtoms glm_ew_atoms(const GlmSpec& spec, const PriorSpec& prior,
                         std::uint64_t seed);

enum class LogitLink { baseline, cumulative, adjacent, continuation };
enum class OddsStructure { po, npo };

struct MultinomialSpec {
  LogitLink link = LogitLink::cumulative;
  OddsStructure odds = OddsStructure::npo;
  int categories = 2;  // J
  PredictorTerms terms;
  std::vector<Vector> strata;

  // npo: category equations get their own coefficient per term, laid out
  // coefficient-major (all intercepts, then all slopes of term 2, ...).
  // po: per-category intercepts followed by shared slopes.
  int dimension() const;
  int stratum_count() const { return static_cast<int>(strata.size()); }

  // Linear predictors eta_{i1..i,J-1} at one stratum.
  Vector category_predictors(const Vector& theta, int stratum) const;
};

// Parameter-space membership. Cumulative models require strictly increasing
// category predictors at every stratum; other links are unrestricted.
bool multinomial_feasible(const MultinomialSpec& spec, const Vector& theta);

// Strictly positive category probabilities summing to one.
Vector multinomial_probs(const MultinomialSpec& spec, const Vector& theta,
                         int stratum);

// J x p matrix of d pi_j / d theta. Analytic for cumulative and baseline
// links, central finite differences for adjacent/continuation.
Matrix multinomial_prob_gradients(const MultinomialSpec& spec,
                                  const Vector& theta, int stratum);

// Single-trial multinomial information sum_j (grad pi_j)(grad pi_j)^T / pi_j.
FisherAtoms multinomial_fisher_atoms(const MultinomialSpec& spec,
                                     const Vector& theta);

// Plain average of per-sample atoms; infeasible rows are skipped and counted.
FisherAtoms multinomial_ew_atoms(const MultinomialSpec& spec,
                                 const Matrix& theta_samples);

}  // namespace optdes
