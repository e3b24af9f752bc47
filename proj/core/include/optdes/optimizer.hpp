// Constrained lift-one optimization of the D-criterion f(w) = |sum w_i F_i|:
// coordinate lifts over exact feasible intervals, a first-order certificate
// (directional-derivative screen plus an LP ascent check), line-search
// restarts, determinant-greedy round-off, and efficiency ratios.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "optdes/models.hpp"
#include "optdes/region.hpp"

namespace optdes {

struct LiftOneConfig {
  std::uint64_t seed = 1;          // sweep-order randomization
  double sweep_tol = 1e-10;        // relative objective improvement per sweep
  double certificate_tol = 1e-8;   // scale-free threshold for the certificate
  int max_outer = 200;             // cap on line-search restarts
  bool analytic_glm = true;        // closed-form lifts for rank-one atoms
};

// Certificate quantities are scaled by 1/f(w*) so certificate_tol is
// dimensionless: lift_derivatives[i] = (1-w_i) f_i'(w_i) / f(w*) and lp_value
// bounds the relative log-objective gap from above.
struct Certificate {
  Vector lift_derivatives;
  double lp_value = 0.0;
  bool certified = false;
};

struct OptimResult {
  Vector allocation;
  double objective = 0.0;
  double log_objective = 0.0;
  Certificate certificate;
  int outer_restarts = 0;
  long sweep_count = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // every accepted objective value
};

// f(w) = det(sum_i w_i F_i); accepts any nonnegative weight vector.
double objective(const FisherAtoms& atoms, const Vector& weights);

// argmax of a x (1-x)^{p-1} + b (1-x)^p over [r1, r2] (closed form).
double maximize_restricted_univariate(double a, double b, int p, double r1,
                                      double r2);

// Coefficients (a, b) of the rank-one lift profile
// f_i(z) = a z (1-z)^{p-1} + b (1-z)^p; tiny negatives are clamped to zero.
std::pair<double, double> lift_profile_coeffs(const FisherAtoms& atoms,
                                              const Vector& w, int i);

// f_i'(z) = [a - b p + (b - a) p z] (1-z)^{p-2}.
double lift_profile_derivative(double a, double b, int p, double z);

// Best lift value for coordinate i over [r1, r2]: closed form for rank-one
// atoms, golden-section on the (log-concave) profile otherwise.
double maximize_lift_general(const FisherAtoms& atoms, const Vector& w, int i,
                             double r1, double r2, bool analytic_glm = true);

// f_i'(w_i) / f(w) for any atom rank, via the trace identity
// f_i'(w_i) = f(w) [tr(F(w)^{-1} F_i) - p] / (1 - w_i).
double lift_log_derivative(const FisherAtoms& atoms, const Vector& w, int i);

// Coefficients (c_0 .. c_p) of h(alpha) = f((1-alpha) w_star + alpha w_o),
// recovered from p+1 evaluations through the node matrix B_p.
Vector fit_h_polynomial(const FisherAtoms& atoms, const Vector& w_star,
                        const Vector& w_o);

// argmax of the fitted polynomial on [0,1]; requires h(0) > 0 and h'(0) > 0.
double maximize_h(const Vector& coeffs);

// Sweep phase only (coordinate lifts until no sweep improves): the original
// algorithm's loop run inside an arbitrary region. No certificate.
OptimResult lift_one_sweeps(const FisherAtoms& atoms, const FeasibleRegion& s,
                            const LiftOneConfig& cfg,
                            std::optional<Vector> start = std::nullopt);

// Full constrained search: sweeps, derivative screen, LP ascent check and
// line-search restarts until certified or max_outer is hit.
OptimResult constrained_lift_one(const FisherAtoms& atoms,
                                 const FeasibleRegion& s,
                                 const LiftOneConfig& cfg,
                                 std::optional<Vector> start = std::nullopt);

// Unconstrained variant (S = simplex); converged sweeps are already optimal
// there, so no certificate machinery runs.
OptimResult original_lift_one(const FisherAtoms& atoms,
                              const LiftOneConfig& cfg,
                              std::optional<Vector> start = std::nullopt);

// Floor then determinant-greedy top-up inside S; ties to the lowest index.
Eigen::VectorXi round_off(const FisherAtoms& atoms, const FeasibleRegion& s,
                          const Vector& w, long budget);

// (f(w1)/f(w2))^(1/p).
double relative_efficiency(const FisherAtoms& atoms, const Vector& w1,
                           const Vector& w2);

// The lift of coordinate i to value z (all other coordinates rescaled).
Vector lift_vector(const Vector& w, int i, double z);

}  // namespace optdes
