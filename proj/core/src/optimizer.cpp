#include "optdes/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "optdes/rng.hpp"

namespace optdes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix weighted_sum(const FisherAtoms& atoms, const Vector& w) {
  Matrix f = Matrix::Zero(atoms.p, atoms.p);
  for (int i = 0; i < atoms.count(); ++i) f += w(i) * atoms.atoms[i];
  return f;
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double width_tol) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  double best_x = c, best_f = fc;
  for (auto [x, v] : {std::pair{d, fd}, std::pair{lo, f(lo)}, std::pair{hi, f(hi)}}) {
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

void check_atoms(const FisherAtoms& atoms) {
  if (atoms.count() == 0 || atoms.p < 1) {
    throw std::invalid_argument("optimizer: empty Fisher atom list");
  }
}

}  // namespace

Vector lift_vector(const Vector& w, int i, double z) {
  const double scale = (1.0 - z) / (1.0 - w(i));
  Vector out = scale * w;
  out(i) = z;
  return out;
}

double objective(const FisherAtoms& atoms, const Vector& weights) {
  check_atoms(atoms);
  if (weights.size() != atoms.count()) {
    throw std::invalid_argument("objective: weight length mismatch");
  }
  return determinant(weighted_sum(atoms, weights));
}

double maximize_restricted_univariate(double a, double b, int p, double r1,
                                      double r2) {
  if (a < 0.0 || b < 0.0 || !(a + b > 0.0)) {
    throw std::invalid_argument(
        "maximize_restricted_univariate: need a >= 0, b >= 0, a + b > 0");
  }
  if (p < 2) throw std::invalid_argument("maximize_restricted_univariate: p >= 2");
  if (!(0.0 <= r1 && r1 <= r2 && r2 <= 1.0)) {
    throw std::invalid_argument(
        "maximize_restricted_univariate: need 0 <= r1 <= r2 <= 1");
  }
  if (a > b * p) {
    const double delta = (a - b * p) / ((a - b) * p);
    if (delta > r2) return r2;
    if (delta >= r1) return delta;
  }
  return r1;
}

std::pair<double, double> lift_profile_coeffs(const FisherAtoms& atoms,
                                              const Vector& w, int i) {
  check_atoms(atoms);
  if (!(w(i) < 1.0)) {
    throw std::invalid_argument("lift_profile_coeffs: w_i must be < 1");
  }
  const int p = atoms.p;
  const double fw = objective(atoms, w);
  const double b = objective(atoms, lift_vector(w, i, 0.0));
  double a;
  if (w(i) > 0.0) {
    a = (fw - b * std::pow(1.0 - w(i), p)) /
        (w(i) * std::pow(1.0 - w(i), p - 1));
  } else {
    a = objective(atoms, lift_vector(w, i, 0.5)) * std::pow(2.0, p) - b;
  }
  return {std::max(a, 0.0), std::max(b, 0.0)};
}

double lift_profile_derivative(double a, double b, int p, double z) {
  return (a - b * p + (b - a) * p * z) * std::pow(1.0 - z, p - 2);
}

double maximize_lift_general(const FisherAtoms& atoms, const Vector& w, int i,
                             double r1, double r2, bool analytic_glm) {
  if (!(r1 <= r2)) throw std::invalid_argument("maximize_lift_general: r1 > r2");
  if (r1 == r2) return r1;
  if (analytic_glm && atoms.rank_one) {
    const auto [a, b] = lift_profile_coeffs(atoms, w, i);
    if (a + b > 0.0) return maximize_restricted_univariate(a, b, atoms.p, r1, r2);
  }
  // log f_i is concave, so f_i is unimodal; golden section brackets the
  // maximizer and a derivative bisection sharpens it (the profile is flat to
  // second order there, which caps a value-only search at sqrt(eps)).
  const Matrix f_rest = weighted_sum(atoms, w) - w(i) * atoms.atoms[i];
  const double inv_rest = 1.0 / (1.0 - w(i));
  const auto profile_matrix = [&](double z) {
    return Matrix((1.0 - z) * inv_rest * f_rest + z * atoms.atoms[i]);
  };
  const auto profile = [&](double z) { return determinant(profile_matrix(z)); };
  const double coarse = golden_section_max(profile, r1, r2, 1e-9);

  const auto derivative_sign = [&](double z) {
    const Matrix a = profile_matrix(z);
    Eigen::PartialPivLU<Matrix> lu(a);
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() <= 1e-300) return 1.0;
    const Matrix b = atoms.atoms[i] - inv_rest * f_rest;
    return lu.solve(b).trace();
  };
  double lo = std::max(r1, coarse - 1e-4);
  double hi = std::min(r2, coarse + 1e-4);
  if (profile(lo) > 0.0 && profile(hi) > 0.0 && derivative_sign(lo) > 0.0 &&
      derivative_sign(hi) < 0.0) {
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (derivative_sign(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double polished = 0.5 * (lo + hi);
    if (profile(polished) >= profile(coarse) * (1.0 - 1e-12)) return polished;
  }
  return coarse;
}

double lift_log_derivative(const FisherAtoms& atoms, const Vector& w, int i) {
  const Matrix fw = weighted_sum(atoms, w);
  Eigen::PartialPivLU<Matrix> lu(fw);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() <= 1e-300) {
    throw std::runtime_error("lift_log_derivative: singular information matrix");
  }
  const double trace = lu.solve(atoms.atoms[i]).trace();
  return (trace - atoms.p) / (1.0 - w(i));
}

Vector fit_h_polynomial(const FisherAtoms& atoms, const Vector& w_star,
                        const Vector& w_o) {
  const int p = atoms.p;
  const double c0 = objective(atoms, w_star);
  Matrix node_matrix(p, p);
  Vector rhs(p);
  for (int s = 1; s <= p; ++s) {
    const double alpha = static_cast<double>(s) / p;
    const Vector mix = (1.0 - alpha) * w_star + alpha * w_o;
    rhs(s - 1) = objective(atoms, mix) - c0;
    for (int t = 1; t <= p; ++t) {
      node_matrix(s - 1, t - 1) = std::pow(alpha, t);
    }
  }
  Vector coeffs(p + 1);
  coeffs(0) = c0;
  coeffs.tail(p) = solve_linear(node_matrix, rhs);
  return coeffs;
}

namespace {

double poly_deriv_eval(const Vector& coeffs, double x) {
  double acc = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) {
    acc = acc * x + k * coeffs(k);
  }
  return acc;
}

}  // namespace

double maximize_h(const Vector& coeffs) {
  const double h0 = coeffs(0);
  const double hp0 = coeffs.size() > 1 ? coeffs(1) : 0.0;
  if (!(h0 > 0.0) || !(hp0 > 0.0)) {
    throw std::invalid_argument("maximize_h: requires h(0) > 0 and h'(0) > 0");
  }
  const double h1 = coeffs.sum();
  const double hp1 = poly_deriv_eval(coeffs, 1.0);
  // alpha = 1 only when it genuinely improves on alpha = 0.
  if (h1 > 0.0 && hp1 >= 0.0 && h1 >= h0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (poly_deriv_eval(coeffs, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

struct SweepState {
  Vector w;
  double fw = 0.0;
  long sweeps = 0;
};

// Random-order coordinate lifts, repeated until a full sweep improves the
// objective by at most sweep_tol relatively.
void run_sweeps(const FisherAtoms& atoms, const FeasibleRegion& s,
                const LiftOneConfig& cfg, std::mt19937_64& rng,
                SweepState& st, std::vector<double>& trace) {
  const int m = atoms.count();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  while (true) {
    std::shuffle(order.begin(), order.end(), rng);
    const double base = st.fw;
    for (int i : order) {
      if (!(st.w(i) < 1.0)) continue;
      const auto [r1, r2] = s.lift_interval(st.w, i);
      if (r2 - r1 <= 0.0) continue;
      const double z =
          maximize_lift_general(atoms, st.w, i, r1, r2, cfg.analytic_glm);
      const Vector cand = lift_vector(st.w, i, z);
      const double fc = objective(atoms, cand);
      if (fc > st.fw) {
        st.w = cand;
        st.fw = fc;
        trace.push_back(fc);
      }
    }
    ++st.sweeps;
    if (st.fw - base <= cfg.sweep_tol * std::abs(st.fw)) break;
  }
}

Vector initial_allocation(const FisherAtoms& atoms, const FeasibleRegion& s,
                          const std::optional<Vector>& start) {
  Vector w0 = start ? *start : s.interior_start();
  if (w0.size() != atoms.count()) {
    throw std::invalid_argument("lift-one: start allocation length mismatch");
  }
  if (start && !s.contains(w0, 1e-9)) {
    throw std::invalid_argument("lift-one: start allocation outside the region");
  }
  return w0;
}

}  // namespace

OptimResult lift_one_sweeps(const FisherAtoms& atoms, const FeasibleRegion& s,
                            const LiftOneConfig& cfg,
                            std::optional<Vector> start) {
  check_atoms(atoms);
  OptimResult res;
  SweepState st;
  st.w = initial_allocation(atoms, s, start);
  st.fw = objective(atoms, st.w);
  if (!(st.fw > 0.0)) {
    throw std::runtime_error(
        "lift_one_sweeps: no positive-determinant start found");
  }
  auto rng = make_engine(cfg.seed);
  res.objective_trace.push_back(st.fw);
  run_sweeps(atoms, s, cfg, rng, st, res.objective_trace);
  res.allocation = st.w;
  res.objective = st.fw;
  res.log_objective = std::log(st.fw);
  res.sweep_count = st.sweeps;
  res.converged = true;
  return res;
}

OptimResult constrained_lift_one(const FisherAtoms& atoms,
                                 const FeasibleRegion& s,
                                 const LiftOneConfig& cfg,
                                 std::optional<Vector> start) {
  check_atoms(atoms);
  if (cfg.max_outer < 1) {
    throw std::invalid_argument("constrained_lift_one: max_outer must be >= 1");
  }
  const int m = atoms.count();
  OptimResult res;
  SweepState st;
  st.w = initial_allocation(atoms, s, start);
  st.fw = objective(atoms, st.w);
  if (!(st.fw > 0.0)) {
    throw std::runtime_error(
        "constrained_lift_one: no positive-determinant start found");
  }
  auto rng = make_engine(cfg.seed);
  res.objective_trace.push_back(st.fw);

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    run_sweeps(atoms, s, cfg, rng, st, res.objective_trace);

    // Directional-derivative screen, in units of f(w*).
    Vector nd(m);
    for (int i = 0; i < m; ++i) nd(i) = lift_log_derivative(atoms, st.w, i);
    res.certificate.lift_derivatives =
        (Vector::Ones(m) - st.w).cwiseProduct(nd);
    if (nd.maxCoeff() <= cfg.certificate_tol) {
      // max_S g never exceeds the largest screen coefficient (and never lies
      // below g(w*) = 0), so this bound certifies without the LP.
      res.certificate.lp_value =
          std::max(0.0, res.certificate.lift_derivatives.maxCoeff());
      res.certificate.certified = true;
      break;
    }

    // LP ascent check on g(w) = sum_i w_i (1-w_i*) f_i'(w_i*) / f.
    const Vector w_o = s.maximize_linear(res.certificate.lift_derivatives);
    const double g = res.certificate.lift_derivatives.dot(w_o);
    res.certificate.lp_value = g;
    if (g <= cfg.certificate_tol) {
      res.certificate.certified = true;
      break;
    }

    // Line search toward w_o on the fitted objective polynomial.
    const Vector coeffs = fit_h_polynomial(atoms, st.w, w_o);
    double alpha;
    if (coeffs(0) > 0.0 && coeffs.size() > 1 && coeffs(1) > 0.0) {
      alpha = maximize_h(coeffs);
    } else {
      // The fitted c_1 = h'(0) should equal g f(w*) > 0; falling through to a
      // direct search keeps the run monotone when roundoff flips its sign.
      const auto along = [&](double a) {
        return objective(atoms, (1.0 - a) * st.w + a * w_o);
      };
      alpha = golden_section_max(along, 0.0, 1.0, 1e-12);
    }
    const Vector cand = (1.0 - alpha) * st.w + alpha * w_o;
    const double fc = objective(atoms, cand);
    if (!(fc > st.fw)) break;  // no representable progress left
    st.w = cand;
    st.fw = fc;
    res.objective_trace.push_back(fc);
    ++res.outer_restarts;
  }

  res.allocation = st.w;
  res.objective = st.fw;
  res.log_objective = std::log(st.fw);
  res.sweep_count = st.sweeps;
  res.converged = res.certificate.certified;
  return res;
}

OptimResult original_lift_one(const FisherAtoms& atoms,
                              const LiftOneConfig& cfg,
                              std::optional<Vector> start) {
  const auto s = FeasibleRegion::simplex(atoms.count());
  OptimResult res = lift_one_sweeps(atoms, s, cfg, std::move(start));
  // On the plain simplex a converged sweep point is already D-optimal.
  const int m = atoms.count();
  Vector nd(m);
  for (int i = 0; i < m; ++i) nd(i) = lift_log_derivative(atoms, res.allocation, i);
  res.certificate.lift_derivatives =
      (Vector::Ones(m) - res.allocation).cwiseProduct(nd);
  res.certificate.lp_value =
      res.certificate.lift_derivatives.maxCoeff();
  res.certificate.certified = true;
  res.converged = true;
  return res;
}

Eigen::VectorXi round_off(const FisherAtoms& atoms, const FeasibleRegion& s,
                          const Vector& w, long budget) {
  check_atoms(atoms);
  const int m = atoms.count();
  if (w.size() != m) throw std::invalid_argument("round_off: length mismatch");
  if (budget < 1) throw std::invalid_argument("round_off: budget must be >= 1");
  if (!s.contains(w, 1e-9)) {
    throw std::invalid_argument("round_off: allocation outside the region");
  }
  const double n = static_cast<double>(budget);
  Eigen::VectorXi counts(m);
  long assigned = 0;
  for (int i = 0; i < m; ++i) {
    counts(i) = static_cast<int>(std::floor(n * w(i)));
    assigned += counts(i);
  }
  // Partial allocations satisfy every constraint except the simplex equality,
  // which holds once all budget units are placed.
  const auto inside = [&](const Vector& scaled) {
    if (s.caps() && ((scaled - *s.caps()).maxCoeff() > 1e-9)) return false;
    for (const auto& lc : s.linear_constraints()) {
      const double slack = 1e-9 * (1.0 + std::abs(lc.bound));
      if (lc.coefficients.dot(scaled) > lc.bound + slack) return false;
    }
    return true;
  };
  if (!inside(counts.cast<double>() / n)) {
    throw std::runtime_error("round_off: floor allocation left the region");
  }
  long k = budget - assigned;
  const auto feasible_bump = [&](int i) {
    Vector cand = counts.cast<double>() / n;
    cand(i) += 1.0 / n;
    return inside(cand);
  };
  // A bump consumes slack in every constraint covering that stratum, so
  // candidate feasibility is re-tested each round, not cached.
  while (k > 0) {
    int best = -1;
    double best_gain = -kInf;
    for (int i = 0; i < m; ++i) {
      if (!(w(i) > 0.0) || !feasible_bump(i)) continue;
      Vector cand = counts.cast<double>();
      cand(i) += 1.0;
      const double gain = objective(atoms, cand);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) {
      throw std::runtime_error("round_off: no feasible stratum left to top up");
    }
    counts(best) += 1;
    --k;
  }
  return counts;
}

double relative_efficiency(const FisherAtoms& atoms, const Vector& w1,
                           const Vector& w2) {
  const double f2 = objective(atoms, w2);
  if (!(f2 > 0.0)) {
    throw std::invalid_argument(
        "relative_efficiency: reference allocation has zero information");
  }
  const double f1 = objective(atoms, w1);
  return std::pow(f1 / f2, 1.0 / atoms.p);
}

}  // namespace optdes
