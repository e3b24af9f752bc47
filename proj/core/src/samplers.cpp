#include "optdes/samplers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "optdes/rng.hpp"

namespace optdes {

Population Population::from_counts(const std::vector<Vector>& covariates,
                                   const std::vector<long>& counts) {
  if (covariates.size() != counts.size()) {
    throw std::invalid_argument("Population: covariate/count length mismatch");
  }
  Population pop;
  pop.covariates = covariates;
  long next = 0;
  for (long c : counts) {
    if (c <= 0) throw std::invalid_argument("Population: counts must be positive");
    std::vector<long> ids(c);
    std::iota(ids.begin(), ids.end(), next);
    next += c;
    pop.members.push_back(std::move(ids));
  }
  pop.total = next;
  return pop;
}

std::vector<long> Population::counts() const {
  std::vector<long> out;
  out.reserve(members.size());
  for (const auto& ids : members) out.push_back(static_cast<long>(ids.size()));
  return out;
}

namespace {

// Partial Fisher-Yates over an explicit id list.
std::vector<long> sample_without_replacement(std::vector<long> ids, long n,
                                             std::mt19937_64& rng) {
  const long total = static_cast<long>(ids.size());
  if (n > total) {
    throw std::invalid_argument("srswor: sample size exceeds population");
  }
  for (long i = 0; i < n; ++i) {
    std::uniform_int_distribution<long> pick(i, total - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(n);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::vector<long> srswor(long population_size, long n, std::uint64_t seed) {
  if (n < 0 || n > population_size) {
    throw std::invalid_argument("srswor: need 0 <= n <= N");
  }
  std::vector<long> ids(population_size);
  std::iota(ids.begin(), ids.end(), 0L);
  auto rng = make_engine(seed);
  return sample_without_replacement(std::move(ids), n, rng);
}

std::vector<long> stratified_sample(const Population& pop,
                                    const Eigen::VectorXi& counts,
                                    std::uint64_t seed) {
  if (counts.size() != pop.stratum_count()) {
    throw std::invalid_argument("stratified_sample: allocation length mismatch");
  }
  std::vector<long> out;
  for (int i = 0; i < pop.stratum_count(); ++i) {
    const long want = counts(i);
    if (want < 0 ||
        want > static_cast<long>(pop.members[i].size())) {
      throw std::invalid_argument(
          "stratified_sample: allocation exceeds stratum size");
    }
    auto rng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
    auto part = sample_without_replacement(pop.members[i], want, rng);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXi uniform_counts(const std::vector<long>& stratum_sizes, long n) {
  const int m = static_cast<int>(stratum_sizes.size());
  long total = 0;
  for (long s : stratum_sizes) total += s;
  if (n < 0 || n > total) {
    throw std::invalid_argument("uniform_counts: need 0 <= n <= sum(N_i)");
  }
  const auto level_total = [&](long k) {
    long t = 0;
    for (long s : stratum_sizes) t += std::min(k, s);
    return t;
  };
  long k = 0;
  while (level_total(k + 1) <= n) ++k;
  Eigen::VectorXi counts(m);
  long assigned = 0;
  for (int i = 0; i < m; ++i) {
    counts(i) = static_cast<int>(std::min(k, stratum_sizes[i]));
    assigned += counts(i);
  }
  long rem = n - assigned;
  for (int i = 0; i < m && rem > 0; ++i) {
    if (stratum_sizes[i] > k) {
      counts(i) += 1;
      --rem;
    }
  }
  return counts;
}

Eigen::VectorXi proportional_counts(const std::vector<long>& stratum_sizes,
                                    long n) {
  const int m = static_cast<int>(stratum_sizes.size());
  double total = 0.0;
  for (long s : stratum_sizes) {
    if (s <= 0) throw std::invalid_argument("proportional_counts: sizes > 0");
    total += static_cast<double>(s);
  }
  if (n < 0 || n > static_cast<long>(total)) {
    throw std::invalid_argument("proportional_counts: need 0 <= n <= sum(N_i)");
  }
  Eigen::VectorXi counts(m);
  std::vector<std::pair<double, int>> remainders;
  long assigned = 0;
  for (int i = 0; i < m; ++i) {
    const double quota = n * static_cast<double>(stratum_sizes[i]) / total;
    counts(i) = static_cast<int>(std::floor(quota));
    assigned += counts(i);
    remainders.push_back({quota - counts(i), i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& u, const auto& v) { return u.first > v.first; });
  long rem = n - assigned;
  for (const auto& [frac, i] : remainders) {
    if (rem <= 0) break;
    if (counts(i) < stratum_sizes[i]) {
      counts(i) += 1;
      --rem;
    }
  }
  return counts;
}

Eigen::VectorXi make_sampler(SamplerKind kind, const Population& pop, long n,
                             const FisherAtoms* atoms, const LiftOneConfig* cfg,
                             std::uint64_t seed) {
  const auto sizes = pop.counts();
  switch (kind) {
    case SamplerKind::srswor: {
      const auto picked = srswor(pop.total, n, seed);
      Eigen::VectorXi counts = Eigen::VectorXi::Zero(pop.stratum_count());
      std::size_t at = 0;
      for (int i = 0; i < pop.stratum_count(); ++i) {
        const long lo = pop.members[i].front();
        const long hi = pop.members[i].back();
        while (at < picked.size() && picked[at] >= lo && picked[at] <= hi) {
          counts(i) += 1;
          ++at;
        }
      }
      return counts;
    }
    case SamplerKind::proportional:
      return proportional_counts(sizes, n);
    case SamplerKind::uniform:
      return uniform_counts(sizes, n);
    case SamplerKind::d_optimal:
    case SamplerKind::ew_d_optimal: {
      if (atoms == nullptr || cfg == nullptr) {
        throw std::invalid_argument(
            "make_sampler: optimal kinds need Fisher atoms and a config");
      }
      Vector caps(pop.stratum_count());
      for (int i = 0; i < caps.size(); ++i) {
        caps(i) = std::min(1.0, static_cast<double>(sizes[i]) / n);
      }
      const auto region = FeasibleRegion::with_caps(caps);
      const OptimResult opt = constrained_lift_one(*atoms, region, *cfg);
      return round_off(*atoms, region, opt.allocation, n);
    }
  }
  throw std::logic_error("make_sampler: unknown kind");
}

}  // namespace optdes
