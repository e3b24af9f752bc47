#include "optdes/models.hpp"

#include <cmath>
#include <stdexcept>

#include "optdes/rng.hpp"

namespace optdes {

namespace {

double expit(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double normal_pdf(double z) {
  static const double kInvSqrt2Pi = 0.3989422804014327;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

Term Term::continuous(int covariate) {
  Term t;
  t.kind = Kind::continuous;
  t.covariate = covariate;
  return t;
}

Term Term::indicator(int covariate, double level) {
  Term t;
  t.kind = Kind::indicator;
  t.covariate = covariate;
  t.level = level;
  return t;
}

Term Term::interaction(Term first, Term second) {
  Term t;
  t.kind = Kind::interaction;
  t.factors.push_back(std::move(first));
  t.factors.push_back(std::move(second));
  return t;
}

double Term::eval(const Vector& x) const {
  switch (kind) {
    case Kind::intercept:
      return 1.0;
    case Kind::continuous:
      if (covariate < 0 || covariate >= x.size()) {
        throw std::invalid_argument("Term: covariate index out of range");
      }
      return x(covariate);
    case Kind::indicator:
      if (covariate < 0 || covariate >= x.size()) {
        throw std::invalid_argument("Term: covariate index out of range");
      }
      return std::abs(x(covariate) - level) < 1e-9 ? 1.0 : 0.0;
    case Kind::interaction:
      if (factors.size() != 2) {
        throw std::invalid_argument("Term: interaction needs two factors");
      }
      return factors[0].eval(x) * factors[1].eval(x);
  }
  throw std::logic_error("Term: unknown kind");
}

Vector design_row(const PredictorTerms& terms, const Vector& x) {
  Vector h(static_cast<int>(terms.size()));
  for (int t = 0; t < h.size(); ++t) h(t) = terms[t].eval(x);
  return h;
}

Matrix GlmSpec::design_matrix() const {
  Matrix x(stratum_count(), dimension());
  for (int i = 0; i < stratum_count(); ++i) {
    x.row(i) = design_row(terms, strata[i]).transpose();
  }
  return x;
}

double nu(FamilyLink link, double eta, double family_constant) {
  if (!std::isfinite(eta)) throw std::invalid_argument("nu: eta must be finite");
  switch (link) {
    case FamilyLink::normal_identity: {
      if (!(family_constant > 0.0)) {
        throw std::invalid_argument("nu: sigma^2 must be positive");
      }
      return 1.0 / family_constant;
    }
    case FamilyLink::bernoulli_logit: {
      const double mu = expit(eta);
      return mu * (1.0 - mu);
    }
    case FamilyLink::bernoulli_probit: {
      const double phi = normal_pdf(eta);
      if (phi == 0.0) return 0.0;
      const double tail = normal_cdf(-std::abs(eta));
      const double head = normal_cdf(std::abs(eta));
      if (tail > 0.0) return phi * phi / (tail * head);
      // Tail underflow: Phi(-t) ~ phi(t)/t, so nu ~ t*phi(t).
      return std::abs(eta) * phi;
    }
    case FamilyLink::bernoulli_cloglog: {
      const double denom = std::expm1(std::exp(eta));
      if (!std::isfinite(denom) || denom == 0.0) return 0.0;
      return std::exp(2.0 * eta) / denom;
    }
    case FamilyLink::bernoulli_loglog: {
      const double denom = std::expm1(std::exp(-eta));
      if (!std::isfinite(denom) || denom == 0.0) return 0.0;
      return std::exp(-2.0 * eta) / denom;
    }
    case FamilyLink::bernoulli_cauchit: {
      // pi^2/4 - atan^2(eta) = atan(1/|eta|) * (pi/2 + |atan(eta)|), stable
      // for large |eta|.
      const double a = std::abs(eta);
      const double gap =
          a > 0.0 ? std::atan(1.0 / a) : (M_PI / 2.0 - std::atan(a));
      const double denom = gap * (M_PI / 2.0 + std::atan(a));
      const double num = 1.0 / ((1.0 + eta * eta) * (1.0 + eta * eta));
      return num / denom;
    }
    case FamilyLink::poisson_log:
      return std::exp(eta);
    case FamilyLink::gamma_reciprocal: {
      if (!(family_constant > 0.0)) {
        throw std::invalid_argument("nu: gamma shape k must be positive");
      }
      if (!(eta > 0.0)) {
        throw std::domain_error("nu: reciprocal link requires eta > 0");
      }
      return family_constant / (eta * eta);
    }
    case FamilyLink::inverse_gaussian_inverse_squared: {
      if (!(family_constant > 0.0)) {
        throw std::invalid_argument("nu: lambda must be positive");
      }
      if (!(eta > 0.0)) {
        throw std::domain_error("nu: inverse-squared link requires eta > 0");
      }
      return family_constant * std::pow(eta, -1.5) / 4.0;
    }
  }
  throw std::logic_error("nu: unknown family-link");
}

FisherAtoms glm_fisher_atoms(const GlmSpec& spec, const Vector& theta) {
  if (theta.size() != spec.dimension()) {
    throw std::invalid_argument("glm_fisher_atoms: theta length mismatch");
  }
  FisherAtoms out;
  out.p = spec.dimension();
  out.rank_one = true;
  out.atoms.reserve(spec.stratum_count());
  for (const auto& x : spec.strata) {
    const Vector h = design_row(spec.terms, x);
    const double v = nu(spec.link, h.dot(theta), spec.family_constant);
    out.atoms.push_back(v * h * h.transpose());
  }
  return out;
}

FisherAtoms glm_ew_atoms(const GlmSpec& spec, const PriorSpec& prior,
                         std::uint64_t seed) {
  const int p = spec.dimension();
  const int m = spec.stratum_count();
  Matrix x = spec.design_matrix();
  Vector mean_nu = Vector::Zero(m);

  if (prior.from_samples()) {
    if (prior.samples.cols() != p) {
      throw std::invalid_argument("glm_ew_atoms: sample width mismatch");
    }
    const long n = prior.samples.rows();
    for (long s = 0; s < n; ++s) {
      const Vector eta = x * prior.samples.row(s).transpose();
      for (int i = 0; i < m; ++i) {
        mean_nu(i) += nu(spec.link, eta(i), spec.family_constant);
      }
    }
    mean_nu /= static_cast<double>(n);
  } else {
    if (static_cast<int>(prior.marginals.size()) != p) {
      throw std::invalid_argument(
          "glm_ew_atoms: one prior marginal per coefficient required");
    }
    if (prior.draws < 1) {
      throw std::invalid_argument("glm_ew_atoms: draws must be positive");
    }
    auto rng = make_engine(seed);
    Vector theta(p);
    for (long s = 0; s < prior.draws; ++s) {
      for (int t = 0; t < p; ++t) {
        const auto& mar = prior.marginals[t];
        switch (mar.dist) {
          case PriorMarginal::Dist::uniform: {
            std::uniform_real_distribution<double> d(mar.a, mar.b);
            theta(t) = d(rng);
            break;
          }
          case PriorMarginal::Dist::normal: {
            std::normal_distribution<double> d(mar.a, mar.b);
            theta(t) = d(rng);
            break;
          }
          case PriorMarginal::Dist::gamma: {
            std::gamma_distribution<double> d(mar.a, mar.b);
            theta(t) = d(rng);
            break;
          }
        }
      }
      const Vector eta = x * theta;
      for (int i = 0; i < m; ++i) {
        mean_nu(i) += nu(spec.link, eta(i), spec.family_constant);
      }
    }
    mean_nu /= static_cast<double>(prior.draws);
  }

  FisherAtoms out;
  out.p = p;
  out.rank_one = true;
  out.atoms.reserve(m);
  for (int i = 0; i < m; ++i) {
    const Vector h = x.row(i).transpose();
    out.atoms.push_back(mean_nu(i) * h * h.transpose());
  }
  return out;
}

int MultinomialSpec::dimension() const {
  const int q = static_cast<int>(terms.size());
  const int jm1 = categories - 1;
  return odds == OddsStructure::npo ? q * jm1 : jm1 + (q - 1);
}

Vector MultinomialSpec::category_predictors(const Vector& theta,
                                            int stratum) const {
  if (categories < 2) {
    throw std::invalid_argument("MultinomialSpec: need J >= 2");
  }
  if (theta.size() != dimension()) {
    throw std::invalid_argument("MultinomialSpec: theta length mismatch");
  }
  if (stratum < 0 || stratum >= stratum_count()) {
    throw std::invalid_argument("MultinomialSpec: stratum out of range");
  }
  if (odds == OddsStructure::po &&
      (terms.empty() || terms[0].kind != Term::Kind::intercept)) {
    throw std::invalid_argument(
        "MultinomialSpec: po layout requires the first term to be the "
        "intercept");
  }
  const int jm1 = categories - 1;
  const int q = static_cast<int>(terms.size());
  const Vector h = design_row(terms, strata[stratum]);
  Vector eta = Vector::Zero(jm1);
  if (odds == OddsStructure::npo) {
    for (int t = 0; t < q; ++t) {
      for (int j = 0; j < jm1; ++j) {
        eta(j) += theta(t * jm1 + j) * h(t);
      }
    }
  } else {
    for (int j = 0; j < jm1; ++j) eta(j) = theta(j);
    for (int t = 1; t < q; ++t) {
      const double coef = theta(jm1 + t - 1);
      for (int j = 0; j < jm1; ++j) eta(j) += coef * h(t);
    }
  }
  return eta;
}

namespace {

// d eta_j / d theta as a (J-1) x p matrix, fixed per stratum.
Matrix predictor_jacobian(const MultinomialSpec& spec, int stratum) {
  const int jm1 = spec.categories - 1;
  const int q = static_cast<int>(spec.terms.size());
  const Vector h = design_row(spec.terms, spec.strata[stratum]);
  Matrix d = Matrix::Zero(jm1, spec.dimension());
  if (spec.odds == OddsStructure::npo) {
    for (int t = 0; t < q; ++t) {
      for (int j = 0; j < jm1; ++j) d(j, t * jm1 + j) = h(t);
    }
  } else {
    for (int j = 0; j < jm1; ++j) d(j, j) = 1.0;
    for (int t = 1; t < q; ++t) {
      for (int j = 0; j < jm1; ++j) d(j, jm1 + t - 1) = h(t);
    }
  }
  return d;
}

Vector probs_from_predictors(const MultinomialSpec& spec, const Vector& eta) {
  const int j1 = spec.categories;
  Vector pi(j1);
  switch (spec.link) {
    case LogitLink::cumulative: {
      double prev = 0.0;
      for (int j = 0; j < j1 - 1; ++j) {
        const double g = expit(eta(j));
        pi(j) = g - prev;
        prev = g;
      }
      pi(j1 - 1) = 1.0 - prev;
      break;
    }
    case LogitLink::baseline: {
      // log(pi_j / pi_J) = eta_j
      const double mx = std::max(0.0, eta.maxCoeff());
      double denom = std::exp(-mx);
      for (int j = 0; j < j1 - 1; ++j) denom += std::exp(eta(j) - mx);
      for (int j = 0; j < j1 - 1; ++j) pi(j) = std::exp(eta(j) - mx) / denom;
      pi(j1 - 1) = std::exp(-mx) / denom;
      break;
    }
    case LogitLink::adjacent: {
      // log(pi_j / pi_{j+1}) = eta_j, so pi_j ~ exp(sum_{l>=j} eta_l).
      Vector logw = Vector::Zero(j1);
      for (int j = j1 - 2; j >= 0; --j) logw(j) = logw(j + 1) + eta(j);
      const double mx = logw.maxCoeff();
      const double denom = (logw.array() - mx).exp().sum();
      for (int j = 0; j < j1; ++j) pi(j) = std::exp(logw(j) - mx) / denom;
      break;
    }
    case LogitLink::continuation: {
      // log(pi_j / (pi_{j+1}+...+pi_J)) = eta_j
      double rest = 1.0;
      for (int j = 0; j < j1 - 1; ++j) {
        const double g = expit(eta(j));
        pi(j) = g * rest;
        rest *= (1.0 - g);
      }
      pi(j1 - 1) = rest;
      break;
    }
  }
  return pi;
}

}  // namespace

bool multinomial_feasible(const MultinomialSpec& spec, const Vector& theta) {
  if (theta.size() != spec.dimension() || !theta.allFinite()) return false;
  if (spec.link != LogitLink::cumulative) return true;
  for (int i = 0; i < spec.stratum_count(); ++i) {
    const Vector eta = spec.category_predictors(theta, i);
    for (int j = 0; j + 1 < eta.size(); ++j) {
      if (!(eta(j) < eta(j + 1))) return false;
    }
  }
  return true;
}

Vector multinomial_probs(const MultinomialSpec& spec, const Vector& theta,
                         int stratum) {
  if (spec.link == LogitLink::cumulative && !multinomial_feasible(spec, theta)) {
    throw std::invalid_argument(
        "multinomial_probs: theta outside the cumulative parameter space");
  }
  return probs_from_predictors(spec, spec.category_predictors(theta, stratum));
}

Matrix multinomial_prob_gradients(const MultinomialSpec& spec,
                                  const Vector& theta, int stratum) {
  const int j1 = spec.categories;
  const int p = spec.dimension();
  const Vector eta = spec.category_predictors(theta, stratum);

  if (spec.link == LogitLink::cumulative || spec.link == LogitLink::baseline) {
    const Matrix deta = predictor_jacobian(spec, stratum);  // (J-1) x p
    Matrix g(j1, p);
    if (spec.link == LogitLink::cumulative) {
      // pi_j = gamma_j - gamma_{j-1}, gamma_j = expit(eta_j).
      Matrix dgamma(j1 - 1, p);
      for (int j = 0; j < j1 - 1; ++j) {
        const double gj = expit(eta(j));
        dgamma.row(j) = gj * (1.0 - gj) * deta.row(j);
      }
      for (int j = 0; j < j1; ++j) {
        g.row(j).setZero();
        if (j < j1 - 1) g.row(j) += dgamma.row(j);
        if (j > 0) g.row(j) -= dgamma.row(j - 1);
      }
    } else {
      const Vector pi = probs_from_predictors(spec, eta);
      // d pi_j / d eta_l = pi_j (1{j=l} - pi_l) for l < J.
      for (int j = 0; j < j1; ++j) {
        g.row(j).setZero();
        for (int l = 0; l < j1 - 1; ++l) {
          const double factor = pi(j) * ((j == l ? 1.0 : 0.0) - pi(l));
          g.row(j) += factor * deta.row(l);
        }
      }
    }
    return g;
  }

  // Generic links: central differences through the probability map.
  const double step = 1e-5;
  Matrix g(j1, p);
  Vector th = theta;
  for (int t = 0; t < p; ++t) {
    const double keep = th(t);
    th(t) = keep + step;
    const Vector hi = probs_from_predictors(spec, spec.category_predictors(th, stratum));
    th(t) = keep - step;
    const Vector lo = probs_from_predictors(spec, spec.category_predictors(th, stratum));
    th(t) = keep;
    g.col(t) = (hi - lo) / (2.0 * step);
  }
  return g;
}

FisherAtoms multinomial_fisher_atoms(const MultinomialSpec& spec,
                                     const Vector& theta) {
  if (!multinomial_feasible(spec, theta)) {
    throw std::invalid_argument(
        "multinomial_fisher_atoms: infeasible parameter vector");
  }
  const int p = spec.dimension();
  FisherAtoms out;
  out.p = p;
  out.rank_one = false;
  out.atoms.reserve(spec.stratum_count());
  for (int i = 0; i < spec.stratum_count(); ++i) {
    const Vector pi = multinomial_probs(spec, theta, i);
    const Matrix g = multinomial_prob_gradients(spec, theta, i);
    Matrix f = Matrix::Zero(p, p);
    for (int j = 0; j < spec.categories; ++j) {
      f += g.row(j).transpose() * g.row(j) / pi(j);
    }
    out.atoms.push_back(0.5 * (f + f.transpose()));
  }
  return out;
}

FisherAtoms multinomial_ew_atoms(const MultinomialSpec& spec,
                                 const Matrix& theta_samples) {
  if (theta_samples.rows() == 0) {
    throw std::invalid_argument("multinomial_ew_atoms: empty sample list");
  }
  if (theta_samples.cols() != spec.dimension()) {
    throw std::invalid_argument("multinomial_ew_atoms: sample width mismatch");
  }
  const int m = spec.stratum_count();
  const int p = spec.dimension();
  std::vector<Matrix> sums(m, Matrix::Zero(p, p));
  long used = 0, skipped = 0;
  for (long s = 0; s < theta_samples.rows(); ++s) {
    const Vector theta = theta_samples.row(s).transpose();
    if (!multinomial_feasible(spec, theta)) {
      ++skipped;
      continue;
    }
    const FisherAtoms local = multinomial_fisher_atoms(spec, theta);
    for (int i = 0; i < m; ++i) sums[i] += local.atoms[i];
    ++used;
  }
  if (used == 0) {
    throw std::invalid_argument(
        "multinomial_ew_atoms: all parameter samples infeasible");
  }
  FisherAtoms out;
  out.p = p;
  out.rank_one = false;
  out.skipped_samples = skipped;
  out.atoms.reserve(m);
  for (int i = 0; i < m; ++i) {
    out.atoms.push_back(sums[i] / static_cast<double>(used));
  }
  return out;
}

}  // namespace optdes
