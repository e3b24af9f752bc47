// Shared fixtures: the two worked examples, the stall-region instance, and
// independent oracles (cofactor determinants, finite differences, grids).
#pragma once

#include <random>
#include <vector>

#include "optdes/optimizer.hpp"
#include "optdes/samplers.hpp"

namespace testsup {

using namespace optdes;

// Recursive cofactor expansion; deliberately independent of the LU path.
inline double cofactor_det(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    acc += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
  }
  return acc;
}

// Six-strata logistic main-effects study (gender x age group).
inline GlmSpec example1_model() {
  GlmSpec spec;
  spec.link = FamilyLink::bernoulli_logit;
  spec.terms = {Term::intercept(), Term::continuous(0),
                Term::indicator(1, 1.0), Term::indicator(1, 2.0)};
  spec.strata = {Vector{{0.0, 0.0}}, Vector{{0.0, 1.0}}, Vector{{0.0, 2.0}},
                 Vector{{1.0, 0.0}}, Vector{{1.0, 1.0}}, Vector{{1.0, 2.0}}};
  return spec;
}

inline std::vector<long> example1_counts() { return {50, 40, 10, 200, 150, 50}; }

inline Vector example1_caps() {
  Vector caps(6);
  const auto counts = example1_counts();
  for (int i = 0; i < 6; ++i) caps(i) = counts[i] / 200.0;
  return caps;
}

inline Vector example1_theta() { return Vector{{0.0, 3.0, 3.0, 3.0}}; }

// Same study with the two gender-by-age interactions added (saturated).
inline GlmSpec example1_interaction_model() {
  GlmSpec spec = example1_model();
  spec.terms.push_back(
      Term::interaction(Term::continuous(0), Term::indicator(1, 1.0)));
  spec.terms.push_back(
      Term::interaction(Term::continuous(0), Term::indicator(1, 2.0)));
  return spec;
}

// Three-point binary design whose sweep phase stalls under constraints.
inline FisherAtoms counterexample_atoms() {
  GlmSpec spec;
  spec.link = FamilyLink::bernoulli_logit;
  spec.terms = {Term::intercept(), Term::continuous(0), Term::continuous(1)};
  spec.strata = {Vector{{-1.0, -1.0}}, Vector{{-1.0, 1.0}},
                 Vector{{1.0, -1.0}}};
  return glm_fisher_atoms(spec, Vector::Zero(3));
}

// f(w) = kCounterScale * w1 w2 w3 for the atoms above.
inline constexpr double kCounterScale = 0.25;  // 16 * (1/4)^3

inline FeasibleRegion counterexample_region() {
  std::vector<LinearConstraint> lin;
  lin.push_back({Vector{{4.0 / 9.0, -1.0 / 3.0, -1.0 / 9.0}}, 0.0});
  lin.push_back({Vector{{-1.0, 0.0, 0.0}}, -3.0 / 11.0});
  return FeasibleRegion(3, std::nullopt, lin);
}

inline Vector counterexample_start() {
  return Vector{{3.0 / 11.0, 2.0 / 11.0, 6.0 / 11.0}};
}

// Cumulative nonproportional-odds model for the five-outcome trauma study.
inline MultinomialSpec trauma_model() {
  MultinomialSpec spec;
  spec.link = LogitLink::cumulative;
  spec.odds = OddsStructure::npo;
  spec.categories = 5;
  spec.terms = {Term::intercept(), Term::continuous(0), Term::continuous(1)};
  for (double sev : {0.0, 1.0}) {
    for (double dose : {1.0, 2.0, 3.0, 4.0}) {
      spec.strata.push_back(Vector{{sev, dose}});
    }
  }
  return spec;
}

inline Vector trauma_theta() {
  return Vector{{-4.047, -2.225, -0.302, 1.386, 4.214, 3.519, 2.420, 1.284,
                 -0.131, -0.376, -0.237, -0.120}};
}

inline FeasibleRegion trauma_region(double mild, double severe, long n = 600) {
  std::vector<LinearConstraint> lin;
  Vector g1(8), g2(8);
  g1 << 1, 1, 1, 1, 0, 0, 0, 0;
  g2 << 0, 0, 0, 0, 1, 1, 1, 1;
  lin.push_back({g1, mild / n});
  lin.push_back({g2, severe / n});
  return FeasibleRegion(8, std::nullopt, lin);
}

// Expected negative Hessian of the single-trial log-likelihood, averaged over
// the outcome distribution: an information-matrix oracle for cumulative
// nonproportional-odds models by central second differences with one
// Richardson step. The log-probabilities are reimplemented here from scratch
// in extended precision (a fully independent code path), because in plain
// doubles the differencing noise floor exceeds the comparison tolerance once
// atom entries reach the 1/pi scale.
inline Matrix fd_fisher_info(const MultinomialSpec& spec, const Vector& theta,
                             int stratum, double h = 1e-4) {
  if (spec.link != LogitLink::cumulative || spec.odds != OddsStructure::npo) {
    throw std::invalid_argument("fd_fisher_info: cumulative npo oracle only");
  }
  const int p = spec.dimension();
  const int jm1 = spec.categories - 1;
  const Vector pi = multinomial_probs(spec, theta, stratum);
  const Vector h_row = design_row(spec.terms, spec.strata[stratum]);

  const auto logp = [&](const std::vector<long double>& th, int j) {
    // eta_j = sum_t theta[t * (J-1) + j] * h_t, gamma = 1/(1+exp(-eta)).
    const auto gamma = [&](int cat) -> long double {
      if (cat < 0) return 0.0L;
      if (cat >= jm1) return 1.0L;
      long double eta = 0.0L;
      for (int t = 0; t < static_cast<int>(h_row.size()); ++t) {
        eta += th[t * jm1 + cat] * static_cast<long double>(h_row(t));
      }
      return 1.0L / (1.0L + std::exp(-eta));
    };
    return std::log(gamma(j) - gamma(j - 1));
  };

  const auto info_at = [&](long double step) {
    Matrix info = Matrix::Zero(p, p);
    std::vector<long double> th(p);
    for (int i = 0; i < p; ++i) th[i] = static_cast<long double>(theta(i));
    for (int j = 0; j < spec.categories; ++j) {
      for (int s = 0; s < p; ++s) {
        for (int t = 0; t < p; ++t) {
          auto probe = [&](long double ds, long double dt) {
            th[s] += ds;
            th[t] += dt;
            const long double v = logp(th, j);
            th[s] -= ds;
            th[t] -= dt;
            return v;
          };
          const long double second =
              (probe(step, step) - probe(step, -step) - probe(-step, step) +
               probe(-step, -step)) /
              (4.0L * step * step);
          info(s, t) -= pi(j) * static_cast<double>(second);
        }
      }
    }
    return info;
  };
  const Matrix i1 = info_at(static_cast<long double>(h));
  const Matrix i2 = info_at(static_cast<long double>(h) / 2.0L);
  return (4.0 * i2 - i1) / 3.0;
}

// Brute-force maximum of the objective over the mesh-0.02 simplex grid
// intersected with a caps-only region.
inline double grid_max_objective(const FisherAtoms& atoms, const Vector& caps) {
  const int m = atoms.count();
  const int steps = 50;
  double best = 0.0;
  std::vector<int> k(m, 0);
  const std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == m - 1) {
      k[pos] = left;
      Vector w(m);
      for (int i = 0; i < m; ++i) w(i) = static_cast<double>(k[i]) / steps;
      if ((w - caps).maxCoeff() <= 1e-12) {
        best = std::max(best, objective(atoms, w));
      }
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, steps);
  return best;
}

// Random rank-one (GLM-style) atoms for property tests.
inline FisherAtoms random_rank_one_atoms(int m, int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> nu(0.05, 0.3);
  FisherAtoms atoms;
  atoms.p = p;
  atoms.rank_one = true;
  for (int i = 0; i < m; ++i) {
    Vector h(p);
    h(0) = 1.0;
    for (int t = 1; t < p; ++t) h(t) = unif(rng);
    atoms.atoms.push_back(nu(rng) * h * h.transpose());
  }
  return atoms;
}

// Random saturated logistic instance (m = p) with nonsingular design.
inline GlmSpec random_saturated_model(int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  GlmSpec spec;
  spec.link = FamilyLink::bernoulli_logit;
  spec.terms.push_back(Term::intercept());
  for (int t = 1; t < p; ++t) spec.terms.push_back(Term::continuous(t - 1));
  while (true) {
    spec.strata.clear();
    for (int i = 0; i < p; ++i) {
      Vector x(p - 1);
      for (int t = 0; t < p - 1; ++t) x(t) = unif(rng);
      spec.strata.push_back(x);
    }
    if (std::abs(determinant(spec.design_matrix())) > 1e-3) break;
  }
  return spec;
}

inline Vector random_caps(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  while (true) {
    Vector caps(m);
    for (int i = 0; i < m; ++i) caps(i) = unif(rng);
    if (caps.sum() >= 1.02) return caps;
  }
}

}  // namespace testsup
