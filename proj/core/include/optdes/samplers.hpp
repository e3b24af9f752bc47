// Turning allocations into sampled subject index sets, and the four
// allocation rules compared throughout: SRSWOR, proportional, constrained
// uniform, and the D-optimal / EW D-optimal pipeline.
#pragma once

#include <cstdint>
#include <vector>

#include "optdes/optimizer.hpp"

namespace optdes {

struct Population {
  std::vector<Vector> covariates;           // one per stratum
  std::vector<std::vector<long>> members;   // global subject ids per stratum
  long total = 0;

  static Population from_counts(const std::vector<Vector>& covariates,
                                const std::vector<long>& counts);
  int stratum_count() const { return static_cast<int>(members.size()); }
  std::vector<long> counts() const;
};

// n distinct indices from {0..population_size-1}, uniform over subsets.
std::vector<long> srswor(long population_size, long n, std::uint64_t seed);

// Union of per-stratum SRSWOR draws of the given sizes.
std::vector<long> stratified_sample(const Population& pop,
                                    const Eigen::VectorXi& counts,
                                    std::uint64_t seed);

// Integer constrained-uniform allocation: n_i = min(k, N_i) or +1, with the
// level k chosen so the totals bracket n; remainders go to the lowest-index
// unsaturated strata.
Eigen::VectorXi uniform_counts(const std::vector<long>& stratum_sizes, long n);

// Largest-remainder rounding of the proportional weights.
Eigen::VectorXi proportional_counts(const std::vector<long>& stratum_sizes,
                                    long n);

enum class SamplerKind { srswor, proportional, uniform, d_optimal, ew_d_optimal };

// Exact allocation for one sampler. The optimal kinds need Fisher atoms (local
// or EW) and an optimizer config; srswor realizes one seeded draw.
Eigen::VectorXi make_sampler(SamplerKind kind, const Population& pop, long n,
                             const FisherAtoms* atoms = nullptr,
                             const LiftOneConfig* cfg = nullptr,
                             std::uint64_t seed = 0);

}  // namespace optdes
