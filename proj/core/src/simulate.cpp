#include "optdes/simulate.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "optdes/rng.hpp"

namespace optdes {

namespace {

double expit(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log1pexp(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double grouped_loglik(const Matrix& x, const Vector& successes,
                      const Vector& trials, const Vector& theta) {
  const Vector eta = x * theta;
  double ll = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    ll += successes(i) * eta(i) - trials(i) * log1pexp(eta(i));
  }
  return ll;
}

}  // namespace

FitResult fit_logistic(const Matrix& x, const Vector& successes,
                       const Vector& trials) {
  const int p = static_cast<int>(x.cols());
  if (x.rows() < p) {
    throw std::invalid_argument("fit_logistic: need at least p rows");
  }
  if (successes.size() != x.rows() || trials.size() != x.rows()) {
    throw std::invalid_argument("fit_logistic: response length mismatch");
  }
  for (int i = 0; i < x.rows(); ++i) {
    if (trials(i) < 0 || successes(i) < 0 || successes(i) > trials(i)) {
      throw std::invalid_argument("fit_logistic: invalid response summary");
    }
  }
  FitResult res;
  res.estimate = Vector::Zero(p);
  double ll = grouped_loglik(x, successes, trials, res.estimate);
  constexpr int kMaxIter = 100;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    res.iterations = iter;
    const Vector eta = x * res.estimate;
    Vector mu(eta.size()), wt(eta.size());
    for (int i = 0; i < eta.size(); ++i) {
      mu(i) = expit(eta(i));
      wt(i) = trials(i) * mu(i) * (1.0 - mu(i));
    }
    const Vector score = x.transpose() * (successes - trials.cwiseProduct(mu));
    if (score.cwiseAbs().maxCoeff() <= 1e-8) {
      res.converged = true;
      break;
    }
    const Matrix info = x.transpose() * wt.asDiagonal() * x;
    Vector step;
    try {
      step = solve_linear(info, score);
    } catch (const std::runtime_error&) {
      if (iter == 1) {
        throw std::runtime_error("fit_logistic: rank-deficient design");
      }
      break;  // weights collapsed (separation); keep the current estimate
    }
    // Step halving keeps the likelihood ascent monotone.
    for (int half = 0; half < 30; ++half) {
      const Vector cand = res.estimate + step;
      const double cand_ll = grouped_loglik(x, successes, trials, cand);
      if (cand_ll > ll || half == 29) {
        res.estimate = cand;
        ll = cand_ll;
        break;
      }
      step *= 0.5;
    }
  }
  // Complete or quasi-separation drives fitted predictors off to the
  // boundary; the score can still vanish there, so the flag keys on the
  // predictor scale rather than on the convergence status alone.
  const double max_eta = (x * res.estimate).cwiseAbs().maxCoeff();
  res.separation = max_eta > 15.0;
  return res;
}

std::vector<long> generate_responses(const GlmSpec& model, const Vector& theta,
                                     const std::vector<long>& counts,
                                     std::uint64_t seed) {
  if (model.link != FamilyLink::bernoulli_logit) {
    throw std::invalid_argument(
        "generate_responses: only the Bernoulli-logit model is simulated");
  }
  if (static_cast<int>(counts.size()) != model.stratum_count()) {
    throw std::invalid_argument("generate_responses: counts length mismatch");
  }
  const Matrix x = model.design_matrix();
  const Vector eta = x * theta;
  std::vector<long> successes(counts.size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    auto rng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::bernoulli_distribution coin(expit(eta(static_cast<int>(i))));
    long s = 0;
    for (long k = 0; k < counts[i]; ++k) s += coin(rng) ? 1 : 0;
    successes[i] = s;
  }
  return successes;
}

double rmse(const Vector& theta_hat, const Vector& theta,
            const std::vector<int>& indices) {
  if (indices.empty()) throw std::invalid_argument("rmse: empty index set");
  double acc = 0.0;
  for (int idx : indices) {
    if (idx < 0 || idx >= theta.size()) {
      throw std::invalid_argument("rmse: index out of range");
    }
    const double d = theta_hat(idx) - theta(idx);
    acc += d * d;
  }
  return std::sqrt(acc / indices.size());
}

namespace {

struct Accumulator {
  std::vector<std::vector<double>> values;  // per index set
  long separations = 0;
  long nonconverged = 0;

  explicit Accumulator(std::size_t sets) : values(sets) {}
  void add(const FitResult& fit, const Vector& theta,
           const std::vector<IndexSet>& sets) {
    for (std::size_t k = 0; k < sets.size(); ++k) {
      values[k].push_back(rmse(fit.estimate, theta, sets[k].indices));
    }
    separations += fit.separation ? 1 : 0;
    nonconverged += fit.converged ? 0 : 1;
  }
};

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

SimReport run_study(const SimConfig& cfg) {
  if (cfg.replicates < 1) {
    throw std::invalid_argument("run_study: replicates must be >= 1");
  }
  const int m = cfg.model.stratum_count();
  if (static_cast<int>(cfg.stratum_counts.size()) != m) {
    throw std::invalid_argument("run_study: stratum count mismatch");
  }
  long total = 0;
  for (long c : cfg.stratum_counts) total += c;
  if (cfg.budget < 1 || cfg.budget > total) {
    throw std::invalid_argument("run_study: budget must lie in [1, sum(N_i)]");
  }
  if (cfg.index_sets.empty()) {
    throw std::invalid_argument("run_study: need at least one RMSE index set");
  }
  const Population pop =
      Population::from_counts(cfg.model.strata, cfg.stratum_counts);
  const Matrix x = cfg.model.design_matrix();

  // Fixed allocations are computed once; responses never feed back into them.
  std::vector<Eigen::VectorXi> fixed(cfg.samplers.size());
  for (std::size_t s = 0; s < cfg.samplers.size(); ++s) {
    const auto& sampler = cfg.samplers[s];
    switch (sampler.kind) {
      case SamplerKind::srswor:
        break;
      case SamplerKind::proportional:
      case SamplerKind::uniform:
        fixed[s] = make_sampler(sampler.kind, pop, cfg.budget);
        break;
      case SamplerKind::d_optimal: {
        const FisherAtoms atoms = glm_fisher_atoms(cfg.model, cfg.theta);
        fixed[s] = make_sampler(sampler.kind, pop, cfg.budget, &atoms,
                                &cfg.optimizer);
        break;
      }
      case SamplerKind::ew_d_optimal: {
        if (!sampler.prior) {
          throw std::invalid_argument(
              "run_study: ew_d_optimal sampler needs a prior");
        }
        const FisherAtoms atoms = glm_ew_atoms(
            cfg.model, *sampler.prior,
            derive_seed(cfg.seed, 0x5e5eULL + static_cast<std::uint64_t>(s)));
        fixed[s] = make_sampler(sampler.kind, pop, cfg.budget, &atoms,
                                &cfg.optimizer);
        break;
      }
    }
  }

  Accumulator full_acc(cfg.index_sets.size());
  std::vector<Accumulator> accs(cfg.samplers.size(),
                                Accumulator(cfg.index_sets.size()));

  std::vector<std::vector<unsigned char>> outcomes(m);
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    const std::uint64_t rep_seed =
        derive_seed(cfg.seed, 0x100000ULL + static_cast<std::uint64_t>(rep));
    // One population realization per replicate, shared by all samplers.
    const Vector eta = x * cfg.theta;
    for (int i = 0; i < m; ++i) {
      auto rng = make_engine(derive_seed(rep_seed, static_cast<std::uint64_t>(i)));
      std::bernoulli_distribution coin(expit(eta(i)));
      outcomes[i].assign(cfg.stratum_counts[i], 0);
      for (auto& o : outcomes[i]) o = coin(rng) ? 1 : 0;
    }
    Vector full_succ(m), full_trials(m);
    for (int i = 0; i < m; ++i) {
      long s = 0;
      for (auto o : outcomes[i]) s += o;
      full_succ(i) = static_cast<double>(s);
      full_trials(i) = static_cast<double>(cfg.stratum_counts[i]);
    }
    full_acc.add(fit_logistic(x, full_succ, full_trials), cfg.theta,
                 cfg.index_sets);

    for (std::size_t s = 0; s < cfg.samplers.size(); ++s) {
      const std::uint64_t pick_seed =
          derive_seed(rep_seed, 0x200000ULL + static_cast<std::uint64_t>(s));
      Eigen::VectorXi chosen =
          cfg.samplers[s].kind == SamplerKind::srswor
              ? make_sampler(SamplerKind::srswor, pop, cfg.budget, nullptr,
                             nullptr, pick_seed)
              : fixed[s];
      // Selection within a stratum is uniform without replacement over its
      // members: draw which members are chosen and sum their outcomes.
      Vector succ = Vector::Zero(m), trials = Vector::Zero(m);
      for (int i = 0; i < m; ++i) {
        const long want = chosen(i);
        trials(i) = static_cast<double>(want);
        if (want == 0) continue;
        std::vector<long> local(cfg.stratum_counts[i]);
        std::iota(local.begin(), local.end(), 0L);
        auto rng = make_engine(
            derive_seed(pick_seed, 0x300000ULL + static_cast<std::uint64_t>(i)));
        for (long k = 0; k < want; ++k) {
          std::uniform_int_distribution<long> pick(k, cfg.stratum_counts[i] - 1);
          std::swap(local[k], local[pick(rng)]);
        }
        long sum = 0;
        for (long k = 0; k < want; ++k) sum += outcomes[i][local[k]];
        succ(i) = static_cast<double>(sum);
      }
      accs[s].add(fit_logistic(x, succ, trials), cfg.theta, cfg.index_sets);
    }
  }

  SimReport report;
  report.replicates = cfg.replicates;
  report.index_sets = cfg.index_sets;
  SamplerSummary full_row;
  full_row.label = "Full Data";
  for (const auto& v : full_acc.values) {
    const auto [mean, sd] = mean_sd(v);
    full_row.mean_rmse.push_back(mean);
    full_row.sd_rmse.push_back(sd);
  }
  full_row.separation_count = full_acc.separations;
  full_row.nonconverged_count = full_acc.nonconverged;
  report.rows.push_back(std::move(full_row));
  for (std::size_t s = 0; s < cfg.samplers.size(); ++s) {
    SamplerSummary row;
    row.label = cfg.samplers[s].label;
    row.allocation = fixed[s];
    for (const auto& v : accs[s].values) {
      const auto [mean, sd] = mean_sd(v);
      row.mean_rmse.push_back(mean);
      row.sd_rmse.push_back(sd);
    }
    row.separation_count = accs[s].separations;
    row.nonconverged_count = accs[s].nonconverged;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace optdes
