// Microbenchmarks for the hot paths: objective evaluation, the full
// optimizer on both worked studies, prior integration, and round-off.
#include <benchmark/benchmark.h>

#include "optdes/optimizer.hpp"
#include "optdes/samplers.hpp"
#include "optdes/simulate.hpp"

namespace {

using namespace optdes;

GlmSpec example1_model() {
  GlmSpec spec;
  spec.link = FamilyLink::bernoulli_logit;
  spec.terms = {Term::intercept(), Term::continuous(0),
                Term::indicator(1, 1.0), Term::indicator(1, 2.0)};
  spec.strata = {Vector{{0.0, 0.0}}, Vector{{0.0, 1.0}}, Vector{{0.0, 2.0}},
                 Vector{{1.0, 0.0}}, Vector{{1.0, 1.0}}, Vector{{1.0, 2.0}}};
  return spec;
}

Vector example1_theta() { return Vector{{0.0, 3.0, 3.0, 3.0}}; }

Vector example1_caps() {
  Vector caps(6);
  caps << 0.25, 0.20, 0.05, 1.00, 0.75, 0.25;
  return caps;
}

MultinomialSpec trauma_model() {
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

Vector trauma_theta() {
  return Vector{{-4.047, -2.225, -0.302, 1.386, 4.214, 3.519, 2.420, 1.284,
                 -0.131, -0.376, -0.237, -0.120}};
}

FeasibleRegion trauma_region() {
  Vector g1(8), g2(8);
  g1 << 1, 1, 1, 1, 0, 0, 0, 0;
  g2 << 0, 0, 0, 0, 1, 1, 1, 1;
  return FeasibleRegion(8, std::nullopt,
                        {{g1, 392.0 / 600.0}, {g2, 410.0 / 600.0}});
}

void BM_ObjectiveP4(benchmark::State& state) {
  const auto atoms = glm_fisher_atoms(example1_model(), example1_theta());
  const Vector w = Vector::Constant(6, 1.0 / 6.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective(atoms, w));
  }
}
BENCHMARK(BM_ObjectiveP4);

void BM_ObjectiveP12(benchmark::State& state) {
  const auto atoms = multinomial_fisher_atoms(trauma_model(), trauma_theta());
  const Vector w = Vector::Constant(8, 0.125);
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective(atoms, w));
  }
}
BENCHMARK(BM_ObjectiveP12);

void BM_LiftOneLogistic(benchmark::State& state) {
  const auto atoms = glm_fisher_atoms(example1_model(), example1_theta());
  const auto region = FeasibleRegion::with_caps(example1_caps());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        constrained_lift_one(atoms, region, LiftOneConfig{}));
  }
}
BENCHMARK(BM_LiftOneLogistic);

void BM_LiftOneTrauma(benchmark::State& state) {
  const auto atoms = multinomial_fisher_atoms(trauma_model(), trauma_theta());
  const auto region = trauma_region();
  LiftOneConfig cfg;
  cfg.certificate_tol = 1e-5;
  cfg.max_outer = 500;
  for (auto _ : state) {
    benchmark::DoNotOptimize(constrained_lift_one(atoms, region, cfg));
  }
}
BENCHMARK(BM_LiftOneTrauma);

void BM_RoundOffTrauma(benchmark::State& state) {
  const auto atoms = multinomial_fisher_atoms(trauma_model(), trauma_theta());
  const auto region = trauma_region();
  LiftOneConfig cfg;
  cfg.certificate_tol = 1e-5;
  cfg.max_outer = 500;
  const Vector w = constrained_lift_one(atoms, region, cfg).allocation;
  for (auto _ : state) {
    benchmark::DoNotOptimize(round_off(atoms, region, w, 600));
  }
}
BENCHMARK(BM_RoundOffTrauma);

void BM_EwAtoms(benchmark::State& state) {
  const auto model = example1_model();
  PriorSpec prior;
  prior.marginals = {{PriorMarginal::Dist::uniform, -2.0, 2.0},
                     {PriorMarginal::Dist::uniform, -1.0, 5.0},
                     {PriorMarginal::Dist::uniform, -1.0, 5.0},
                     {PriorMarginal::Dist::uniform, -1.0, 5.0}};
  prior.draws = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm_ew_atoms(model, prior, 7));
  }
}
BENCHMARK(BM_EwAtoms)->Arg(10000)->Arg(200000);

void BM_WaterFilling(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Vector caps(m);
  for (int i = 0; i < m; ++i) caps(i) = 0.02 + 0.9 * ((i * 7919) % 100) / 100.0;
  if (caps.sum() < 1.0) caps.array() += (1.1 - caps.sum()) / m;
  for (auto _ : state) {
    benchmark::DoNotOptimize(water_filling(caps));
  }
}
BENCHMARK(BM_WaterFilling)->Arg(8)->Arg(64)->Arg(512);

void BM_SimulateReplicate(benchmark::State& state) {
  SimConfig cfg;
  cfg.replicates = 1;
  cfg.stratum_counts = {50, 40, 10, 200, 150, 50};
  cfg.budget = 200;
  cfg.model = example1_model();
  cfg.theta = example1_theta();
  cfg.samplers = {{SamplerKind::srswor, "SRSWOR", std::nullopt},
                  {SamplerKind::proportional, "prop", std::nullopt},
                  {SamplerKind::uniform, "unif", std::nullopt},
                  {SamplerKind::d_optimal, "dopt", std::nullopt}};
  cfg.index_sets = {{"all except beta0", {1, 2, 3}}};
  cfg.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_study(cfg));
  }
}
BENCHMARK(BM_SimulateReplicate);

}  // namespace

BENCHMARK_MAIN();
