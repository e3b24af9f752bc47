#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace optdes;

namespace {

bool nondecreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("objective") {
  const auto atoms = testsup::counterexample_atoms();
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  CHECK(objective(atoms, third) ==
        doctest::Approx(testsup::kCounterScale / 27.0).epsilon(1e-12));

  Vector corner(3);
  corner << 1.0, 0.0, 0.0;
  CHECK(objective(atoms, corner) == doctest::Approx(0.0));

  // Order-p homogeneity on the raw-vector path.
  const auto ex1 = glm_fisher_atoms(testsup::example1_model(),
                                    testsup::example1_theta());
  Vector w(6);
  w << 0.25, 0.20, 0.05, 0.50, 0.0, 0.0;
  CHECK(objective(ex1, 2.0 * w) ==
        doctest::Approx(16.0 * objective(ex1, w)).epsilon(1e-12));
}

TEST_CASE("maximize_restricted_univariate closed form") {
  CHECK(maximize_restricted_univariate(3.0 / 16.0, 0.0, 3, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(maximize_restricted_univariate(3.0 / 16.0, 0.0, 3, 3.0 / 11.0,
                                       3.0 / 11.0) ==
        doctest::Approx(3.0 / 11.0));
  CHECK(maximize_restricted_univariate(1.0, 1.0, 3, 0.2, 0.8) ==
        doctest::Approx(0.2));
  CHECK_THROWS_AS(maximize_restricted_univariate(0.0, 0.0, 3, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(maximize_restricted_univariate(1.0, 0.0, 3, 0.7, 0.2),
                  std::invalid_argument);
}

TEST_CASE("lift_profile_coeffs at the stall point") {
  const auto atoms = testsup::counterexample_atoms();
  const Vector w = testsup::counterexample_start();
  const auto [a, b] = lift_profile_coeffs(atoms, w, 0);
  CHECK(a / testsup::kCounterScale == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
  CHECK(b == doctest::Approx(0.0));
}

TEST_CASE("lift_profile_coeffs with a vanishing atom") {
  auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                testsup::example1_theta());
  atoms.atoms[5].setZero();  // stratum contributes nothing
  Vector w(6);
  w << 0.2, 0.2, 0.05, 0.25, 0.15, 0.15;
  const auto [a, b] = lift_profile_coeffs(atoms, w, 5);
  const double fw = objective(atoms, w);
  CHECK(b == doctest::Approx(fw / std::pow(1.0 - w(5), 4)).epsilon(1e-10));
  CHECK(a == doctest::Approx(0.0).scale(fw));
}

TEST_CASE("reconstructed lift profile matches direct evaluation") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  GlmSpec spec;
  spec.link = FamilyLink::bernoulli_logit;
  spec.terms = {Term::intercept(), Term::continuous(0)};
  spec.strata = {Vector{{unif(rng)}}, Vector{{unif(rng)}}, Vector{{unif(rng)}}};
  Vector theta(2);
  theta << unif(rng), unif(rng);
  const auto atoms = glm_fisher_atoms(spec, theta);
  Vector w(3);
  w << 0.3, 0.45, 0.25;
  for (int i = 0; i < 3; ++i) {
    const auto [a, b] = lift_profile_coeffs(atoms, w, i);
    for (double z : {0.1, 0.5, 0.9}) {
      const double profile =
          a * z * std::pow(1.0 - z, 1) + b * std::pow(1.0 - z, 2);
      const double direct = objective(atoms, lift_vector(w, i, z));
      CHECK(profile == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("lift_profile_derivative") {
  const double scale = testsup::kCounterScale;
  // f_1'(3/11) = (3/16)(8/11)(1 - 9/11) = 3/121, in normalized units.
  CHECK(lift_profile_derivative(scale * 3.0 / 16.0, 0.0, 3, 3.0 / 11.0) /
            scale ==
        doctest::Approx(3.0 / 121.0).epsilon(1e-12));
  CHECK(lift_profile_derivative(2.0, 1.0, 4, 1.0) == doctest::Approx(0.0));

  // Finite-difference agreement for a reconstructed profile.
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  Vector w(6);
  w << 0.2, 0.2, 0.05, 0.25, 0.15, 0.15;
  const auto [a, b] = lift_profile_coeffs(atoms, w, 0);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unif(0.05, 0.9);
  for (int rep = 0; rep < 10; ++rep) {
    const double z = unif(rng);
    const double h = 1e-6;
    const auto lift = [&](double zz) {
      return a * zz * std::pow(1.0 - zz, 3) + b * std::pow(1.0 - zz, 4);
    };
    const double fd = (lift(z + h) - lift(z - h)) / (2.0 * h);
    CHECK(lift_profile_derivative(a, b, 4, z) ==
          doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("lift_log_derivative agrees with the rank-one closed form") {
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  Vector w(6);
  w << 0.2, 0.2, 0.05, 0.25, 0.15, 0.15;
  const double fw = objective(atoms, w);
  for (int i = 0; i < 6; ++i) {
    const auto [a, b] = lift_profile_coeffs(atoms, w, i);
    const double closed = lift_profile_derivative(a, b, 4, w(i));
    CHECK(lift_log_derivative(atoms, w, i) ==
          doctest::Approx(closed / fw).epsilon(1e-9));
  }
}

TEST_CASE("maximize_lift_general") {
  // Degenerate interval.
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  Vector w(6);
  w << 0.2, 0.2, 0.05, 0.25, 0.15, 0.15;
  CHECK(maximize_lift_general(atoms, w, 0, 0.3, 0.3) == doctest::Approx(0.3));

  // Closed-form and golden-section paths agree on rank-one instances: the
  // attained objective to 1e-9 relative (the argmax itself is only sqrt(eps)
  // sharp for a derivative-free search on a locally flat profile).
  std::mt19937_64 rng(59);
  for (int rep = 0; rep < 15; ++rep) {
    const auto rnd = testsup::random_rank_one_atoms(5, 3, rng);
    const Vector start = Vector::Constant(5, 0.2);
    if (!(objective(rnd, start) > 0)) continue;
    for (int i = 0; i < 5; ++i) {
      const double analytic = maximize_lift_general(rnd, start, i, 0.0, 0.9, true);
      const double golden = maximize_lift_general(rnd, start, i, 0.0, 0.9, false);
      CHECK(analytic == doctest::Approx(golden).epsilon(1e-4).scale(1.0));
      const double f_analytic = objective(rnd, lift_vector(start, i, analytic));
      const double f_golden = objective(rnd, lift_vector(start, i, golden));
      CHECK(f_analytic == doctest::Approx(f_golden).epsilon(1e-9));
      CHECK(f_analytic >= f_golden * (1.0 - 1e-9));
    }
  }

  // First-order optimality cases for multinomial atoms (Fisher rank > 1).
  const auto trauma = multinomial_fisher_atoms(testsup::trauma_model(),
                                               testsup::trauma_theta());
  const Vector u = Vector::Constant(8, 0.125);
  const double fu = objective(trauma, u);
  REQUIRE(fu > 0.0);
  for (int i = 0; i < 8; ++i) {
    const double z = maximize_lift_general(trauma, u, i, 0.05, 0.6, false);
    const Vector at = lift_vector(u, i, z);
    const double deriv = lift_log_derivative(trauma, at, i);
    if (z > 0.05 + 1e-9 && z < 0.6 - 1e-9) {
      CHECK(std::abs(deriv) < 1e-6);
    } else if (z <= 0.05 + 1e-9) {
      CHECK(deriv <= 1e-6);
    } else {
      CHECK(deriv >= -1e-6);
    }
  }
}

TEST_CASE("fit_h_polynomial") {
  const auto atoms = testsup::counterexample_atoms();
  const Vector w_star = testsup::counterexample_start();
  Vector w_o(3);
  w_o << 3.0 / 11.0, 8.0 / 11.0, 0.0;
  const Vector coeffs = fit_h_polynomial(atoms, w_star, w_o);
  const double scale = testsup::kCounterScale;
  CHECK(coeffs(0) / scale == doctest::Approx(36.0 / 1331.0).epsilon(1e-10));
  CHECK(coeffs(1) / scale == doctest::Approx(72.0 / 1331.0).epsilon(1e-8));
  CHECK(coeffs(2) / scale == doctest::Approx(-108.0 / 1331.0).epsilon(1e-8));
  CHECK(std::abs(coeffs(3) / scale) < 1e-10);

  // Identical endpoints give a constant polynomial.
  const Vector flat = fit_h_polynomial(atoms, w_star, w_star);
  CHECK(flat.tail(3).cwiseAbs().maxCoeff() < 1e-12 * flat(0) + 1e-300);

  // The fitted polynomial reproduces the objective along the segment.
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const double alpha = unif(rng);
    double poly = 0.0;
    for (int k = 3; k >= 0; --k) poly = poly * alpha + coeffs(k);
    const double direct =
        objective(atoms, (1.0 - alpha) * w_star + alpha * w_o);
    CHECK(poly == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("maximize_h") {
  const auto atoms = testsup::counterexample_atoms();
  Vector w_o(3);
  w_o << 3.0 / 11.0, 8.0 / 11.0, 0.0;
  const Vector coeffs =
      fit_h_polynomial(atoms, testsup::counterexample_start(), w_o);
  CHECK(maximize_h(coeffs) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  Vector increasing(2);
  increasing << 1.0, 1.0;  // h = 1 + alpha
  CHECK(maximize_h(increasing) == doctest::Approx(1.0));

  Vector bad(2);
  bad << -1.0, 1.0;
  CHECK_THROWS_AS(maximize_h(bad), std::invalid_argument);

  // Grid dominance on random log-concave instances h = c(1-a)(1+ka).
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(0.5, 4.0);
  for (int rep = 0; rep < 10; ++rep) {
    const double k = unif(rng);
    Vector c(3);
    c << 1.0, k - 1.0, -k;
    const double alpha = maximize_h(c);
    const auto h = [&](double a) { return (1.0 - a) * (1.0 + k * a); };
    for (double g = 0.0; g <= 1.0; g += 1e-3) {
      CHECK(h(alpha) >= h(g) - 1e-9);
    }
  }
}

TEST_CASE("constrained lift-one solves the six-strata study") {
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  const auto region = FeasibleRegion::with_caps(testsup::example1_caps());
  LiftOneConfig cfg;
  const OptimResult res = constrained_lift_one(atoms, region, cfg);
  REQUIRE(res.converged);
  Vector expected(6);
  expected << 0.25, 0.20, 0.05, 0.50, 0.0, 0.0;
  CHECK((res.allocation - expected).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(nondecreasing(res.objective_trace));
  CHECK(res.certificate.certified);
  CHECK(res.certificate.lp_value <= cfg.certificate_tol);
}

TEST_CASE("constrained lift-one escapes the stall via one restart") {
  const auto atoms = testsup::counterexample_atoms();
  const auto region = testsup::counterexample_region();
  LiftOneConfig cfg;
  cfg.seed = 1;  // post-restart sweep visits coordinate 1 first
  const OptimResult res =
      constrained_lift_one(atoms, region, cfg, testsup::counterexample_start());
  REQUIRE(res.converged);
  CHECK((res.allocation - Vector::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() <
        1e-6);
  CHECK(res.outer_restarts == 1);
  CHECK(nondecreasing(res.objective_trace));
}

TEST_CASE("trauma study reproduces the published optimal proportions") {
  const auto atoms = multinomial_fisher_atoms(testsup::trauma_model(),
                                              testsup::trauma_theta());
  const auto region = testsup::trauma_region(392, 410);
  LiftOneConfig cfg;
  cfg.certificate_tol = 1e-5;
  const OptimResult res = constrained_lift_one(atoms, region, cfg);
  REQUIRE(res.converged);
  Vector expected(8);
  expected << 0.258, 0.0, 0.0, 0.167, 0.280, 0.0, 0.0, 0.295;
  CHECK((res.allocation - expected).cwiseAbs().maxCoeff() < 5e-3);
  const Eigen::VectorXi counts = round_off(atoms, region, res.allocation, 600);
  Eigen::VectorXi published(8);
  published << 155, 0, 0, 100, 168, 0, 0, 177;
  CHECK((counts - published).cwiseAbs().maxCoeff() <= 1);
}

TEST_CASE("original lift-one") {
  const auto atoms = testsup::counterexample_atoms();
  LiftOneConfig cfg;

  // Unconstrained: global maximum at the uniform allocation.
  cfg.sweep_tol = 0.0;  // sweep until no representable improvement
  const OptimResult free_run = original_lift_one(atoms, cfg);
  CHECK((free_run.allocation - Vector::Constant(3, 1.0 / 3.0))
            .cwiseAbs()
            .maxCoeff() < 1e-6);
  CHECK(free_run.converged);

  // Same sweeps clipped by the constrained region stall at the start point.
  const OptimResult stalled = lift_one_sweeps(
      atoms, testsup::counterexample_region(), cfg,
      testsup::counterexample_start());
  CHECK((stalled.allocation - testsup::counterexample_start())
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // Saturated model on the simplex: uniform is optimal.
  std::mt19937_64 rng(71);
  const auto saturated = testsup::random_saturated_model(4, rng);
  Vector theta(4);
  theta << 0.3, -0.2, 0.5, 0.1;
  const auto sat_atoms = glm_fisher_atoms(saturated, theta);
  const OptimResult sat = original_lift_one(sat_atoms, cfg);
  CHECK((sat.allocation - Vector::Constant(4, 0.25)).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("round_off") {
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  const auto region = FeasibleRegion::with_caps(testsup::example1_caps());
  Vector w_o(6);
  w_o << 0.25, 0.20, 0.05, 0.50, 0.0, 0.0;
  const Eigen::VectorXi counts = round_off(atoms, region, w_o, 200);
  Eigen::VectorXi expected(6);
  expected << 50, 40, 10, 100, 0, 0;
  CHECK(counts == expected);

  // An already integral allocation is returned exactly.
  const auto simplex = FeasibleRegion::simplex(6);
  Vector uniform = Vector::Constant(6, 1.0 / 6.0);
  const Eigen::VectorXi exact = round_off(atoms, simplex, uniform, 60);
  for (int i = 0; i < 6; ++i) CHECK(exact(i) == 10);

  // Mixed-sign constraints are outside the round-off contract: flooring can
  // leave such a region, and the guard reports it rather than repairing it.
  const auto ce_atoms = testsup::counterexample_atoms();
  const auto ce_region = testsup::counterexample_region();
  Vector near_thirds(3);
  near_thirds << 0.33333333333333337, 0.333333333333409143, 0.333333333333257487;
  REQUIRE(ce_region.contains(near_thirds, 1e-9));
  CHECK_THROWS_AS(round_off(ce_atoms, ce_region, near_thirds, 99),
                  std::runtime_error);

  // Group bounds stay respected through the greedy top-up.
  const auto trauma_atoms = multinomial_fisher_atoms(testsup::trauma_model(),
                                                     testsup::trauma_theta());
  const auto modified = testsup::trauma_region(592, 210);
  LiftOneConfig cfg;
  cfg.certificate_tol = 5e-3;
  cfg.max_outer = 1500;
  const OptimResult res = constrained_lift_one(trauma_atoms, modified, cfg);
  const Eigen::VectorXi mod_counts =
      round_off(trauma_atoms, modified, res.allocation, 600);
  CHECK(mod_counts.sum() == 600);
  CHECK(mod_counts.tail(4).sum() <= 210);
}

TEST_CASE("relative_efficiency") {
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  Vector w_o(6), w_p(6), w_u(6);
  w_o << 0.25, 0.20, 0.05, 0.50, 0.0, 0.0;
  w_p << 0.10, 0.08, 0.02, 0.40, 0.30, 0.10;
  w_u << 0.19, 0.19, 0.05, 0.19, 0.19, 0.19;
  CHECK(relative_efficiency(atoms, w_p, w_o) ==
        doctest::Approx(0.5393).epsilon(1e-3));
  CHECK(relative_efficiency(atoms, w_u, w_o) ==
        doctest::Approx(0.7899).epsilon(1e-3));
  CHECK(relative_efficiency(atoms, w_p, w_p) == doctest::Approx(1.0));
  Vector corner = Vector::Zero(6);
  corner(0) = 1.0;
  CHECK_THROWS_AS(relative_efficiency(atoms, w_p, corner),
                  std::invalid_argument);
}

TEST_CASE("saturated instances reduce to water-filling") {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const int p = 3 + static_cast<int>(rng() % 4);
    const auto spec = testsup::random_saturated_model(p, rng);
    Vector theta(p);
    for (int t = 0; t < p; ++t) theta(t) = noise(rng);
    const auto atoms = glm_fisher_atoms(spec, theta);
    const Vector caps = testsup::random_caps(p, rng);
    const auto region = FeasibleRegion::with_caps(caps);
    LiftOneConfig cfg;
    const OptimResult res = constrained_lift_one(atoms, region, cfg);
    CHECK(res.converged);
    CHECK((res.allocation - water_filling(caps)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("certificate beats a brute-force grid") {
  std::mt19937_64 rng(79);
  for (int rep = 0; rep < 5; ++rep) {
    const int m = 3 + static_cast<int>(rng() % 2);
    const int p = 2 + static_cast<int>(rng() % 2);
    const auto atoms = testsup::random_rank_one_atoms(m, p, rng);
    const Vector caps = testsup::random_caps(m, rng);
    const auto region = FeasibleRegion::with_caps(caps);
    LiftOneConfig cfg;
    cfg.certificate_tol = 1e-6;
    cfg.max_outer = 5000;
    const OptimResult res = constrained_lift_one(atoms, region, cfg);
    CHECK(res.objective >= testsup::grid_max_objective(atoms, caps) - 1e-6);
  }
}

TEST_CASE("scale invariance of the argmax") {
  const auto base = glm_fisher_atoms(testsup::example1_model(),
                                     testsup::example1_theta());
  const auto region = FeasibleRegion::with_caps(testsup::example1_caps());
  LiftOneConfig cfg;
  const OptimResult ref = constrained_lift_one(base, region, cfg);
  for (double gamma : {1e-3, 1e3}) {
    FisherAtoms scaled = base;
    for (auto& f : scaled.atoms) f *= gamma;
    const OptimResult res = constrained_lift_one(scaled, region, cfg);
    CHECK((res.allocation - ref.allocation).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(res.objective ==
          doctest::Approx(std::pow(gamma, 4) * ref.objective).epsilon(1e-9));
    // Order-p homogeneity at a fixed allocation.
    CHECK(objective(scaled, ref.allocation) ==
          doctest::Approx(std::pow(gamma, 4) * ref.objective).epsilon(1e-12));
  }
}

TEST_CASE("seed invariance of the optimal value") {
  const auto atoms = glm_fisher_atoms(testsup::example1_model(),
                                      testsup::example1_theta());
  const auto region = FeasibleRegion::with_caps(testsup::example1_caps());
  LiftOneConfig cfg;
  cfg.seed = 1;
  const double ref = constrained_lift_one(atoms, region, cfg).objective;
  for (std::uint64_t seed : {2ULL, 3ULL, 4ULL, 5ULL}) {
    cfg.seed = seed;
    const double val = constrained_lift_one(atoms, region, cfg).objective;
    CHECK(val == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("returned allocations satisfy the first-order certificate") {
  std::mt19937_64 rng(83);
  for (int rep = 0; rep < 8; ++rep) {
    const int m = 4 + static_cast<int>(rng() % 3);
    const auto atoms = testsup::random_rank_one_atoms(m, 3, rng);
    const Vector caps = testsup::random_caps(m, rng);
    const auto region = FeasibleRegion::with_caps(caps);
    LiftOneConfig cfg;
    cfg.certificate_tol = 1e-6;
    cfg.max_outer = 5000;
    const OptimResult res = constrained_lift_one(atoms, region, cfg);
    if (!res.converged) continue;
    Vector nd(m);
    for (int i = 0; i < m; ++i) {
      nd(i) = lift_log_derivative(atoms, res.allocation, i);
    }
    const bool screen = nd.maxCoeff() <= cfg.certificate_tol;
    const Vector a =
        (Vector::Ones(m) - res.allocation).cwiseProduct(nd);
    const bool lp = a.dot(region.maximize_linear(a)) <= cfg.certificate_tol;
    CHECK((screen || lp));
  }
}
