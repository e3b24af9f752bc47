// Command-line front end: study design, classical allocations, efficiency
// comparisons, simulation studies, and the constrained-vs-original
// counterexample demonstration.
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "optdes/rng.hpp"
#include "optdes/study.hpp"

namespace {

using namespace optdes;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write to " + out_path);
  out << text;
}

struct CommonOpts {
  std::string study_path;
  std::string out_path;
  std::optional<long> seed_override;
};

StudyFile load_with_seed(const CommonOpts& opts) {
  StudyFile study = load_study(opts.study_path);
  if (opts.seed_override) {
    study.optimizer.seed = static_cast<std::uint64_t>(*opts.seed_override);
  }
  return study;
}

int cmd_design(const CommonOpts& opts, const std::string& criterion) {
  const StudyFile study = load_with_seed(opts);
  const FeasibleRegion region = region_from_study(study);
  long skipped = -1;
  FisherAtoms atoms;
  if (criterion == "local") {
    atoms = local_atoms(study);
  } else {
    atoms = ew_atoms(study, derive_seed(study.optimizer.seed, 0xe77eULL));
    skipped = atoms.skipped_samples;
  }
  const OptimResult result =
      constrained_lift_one(atoms, region, study.optimizer);
  Eigen::VectorXi counts;
  if (study.budget > 0) {
    counts = round_off(atoms, region, result.allocation, study.budget);
  }
  write_output(design_report_json(study, criterion, result, counts, skipped),
               opts.out_path);
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_allocate(const CommonOpts& opts, const std::string& sampler) {
  const StudyFile study = load_with_seed(opts);
  if (study.counts.empty() || study.budget < 1) {
    throw StudyFileError("strata: classical samplers need counts and a budget");
  }
  Eigen::VectorXi counts;
  Vector w;
  if (sampler == "proportional") {
    counts = proportional_counts(study.counts, study.budget);
    w = proportional_allocation(study.counts);
  } else {  // uniform
    counts = uniform_counts(study.counts, study.budget);
    Vector caps(study.stratum_count());
    for (int i = 0; i < caps.size(); ++i) {
      caps(i) = std::min(
          1.0, static_cast<double>(study.counts[i]) / study.budget);
    }
    w = water_filling(caps);
  }
  write_output(allocate_report_json(study, sampler, w, counts), opts.out_path);
  return kExitOk;
}

// Named allocation sources for the efficiency command.
Vector resolve_allocation(const std::string& token, const StudyFile& study,
                          const FeasibleRegion& region) {
  if (token == "local" || token == "ew") {
    FisherAtoms crit_atoms =
        token == "local"
            ? local_atoms(study)
            : ew_atoms(study, derive_seed(study.optimizer.seed, 0xe77eULL));
    return constrained_lift_one(crit_atoms, region, study.optimizer).allocation;
  }
  if (token == "proportional") return proportional_allocation(study.counts);
  if (token == "uniform") {
    Vector caps(study.stratum_count());
    for (int i = 0; i < caps.size(); ++i) {
      caps(i) = std::min(
          1.0, static_cast<double>(study.counts[i]) / study.budget);
    }
    return water_filling(caps);
  }
  return load_allocation(token);  // a JSON file path
}

int cmd_efficiency(const CommonOpts& opts, const std::string& baseline,
                   const std::string& target) {
  const StudyFile study = load_with_seed(opts);
  const FeasibleRegion region = region_from_study(study);
  // Efficiencies are evaluated under the study's local information.
  const FisherAtoms atoms = local_atoms(study);
  const Vector w_base = resolve_allocation(baseline, study, region);
  const Vector w_target = resolve_allocation(target, study, region);
  const double eff = relative_efficiency(atoms, w_target, w_base) * 100.0;
  const double ld_t = std::log(objective(atoms, w_target));
  const double ld_b = std::log(objective(atoms, w_base));
  write_output(
      efficiency_report_json(study, baseline, target, eff, ld_t, ld_b),
      opts.out_path);
  return kExitOk;
}

int cmd_simulate(const CommonOpts& opts, const std::string& csv_path) {
  SimStudy sim = load_sim_study(opts.study_path);
  if (opts.seed_override) {
    sim.sim.seed = static_cast<std::uint64_t>(*opts.seed_override);
  }
  const SimReport report = run_study(sim.sim);
  write_output(sim_report_json(report, sim.sim.seed), opts.out_path);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write to " + csv_path);
    csv << sim_report_csv(report);
  }
  return kExitOk;
}

int cmd_counterexample(const std::string& out_path, long seed) {
  // Three-point binary design whose sweep-converged allocation is not
  // D-optimal once the region cuts into the simplex.
  GlmSpec model;
  model.link = FamilyLink::bernoulli_logit;
  model.terms = {Term::intercept(), Term::continuous(0), Term::continuous(1)};
  model.strata = {Vector{{-1.0, -1.0}}, Vector{{-1.0, 1.0}}, Vector{{1.0, -1.0}}};
  const Vector theta = Vector::Zero(3);
  const FisherAtoms atoms = glm_fisher_atoms(model, theta);

  std::vector<LinearConstraint> lin;
  lin.push_back({Vector{{4.0 / 9.0, -1.0 / 3.0, -1.0 / 9.0}}, 0.0});
  lin.push_back({Vector{{-1.0, 0.0, 0.0}}, -3.0 / 11.0});
  const FeasibleRegion region(3, std::nullopt, lin);
  const Vector start{{3.0 / 11.0, 2.0 / 11.0, 6.0 / 11.0}};

  LiftOneConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(seed);
  const OptimResult constrained =
      constrained_lift_one(atoms, region, cfg, start);
  const OptimResult stalled = lift_one_sweeps(atoms, region, cfg, start);
  const double eff =
      relative_efficiency(atoms, stalled.allocation, constrained.allocation) *
      100.0;
  write_output(counterexample_report_json(constrained, stalled, eff), out_path);
  return constrained.converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Constrained D-optimal and EW D-optimal subject allocation for "
      "budget-limited studies"};
  app.require_subcommand(1);

  CommonOpts opts;
  long seed = -1;
  app.add_option("--seed", seed,
                 "Override the optimizer seed from the study file");

  std::string criterion = "local";
  auto* design = app.add_subcommand(
      "design", "Compute the D-optimal allocation for a study file");
  design->add_option("study", opts.study_path, "Study JSON file")->required();
  design->add_option("--criterion", criterion, "local or ew")
      ->check(CLI::IsMember({"local", "ew"}));
  design->add_option("--out", opts.out_path, "Report path (default stdout)");

  std::string sampler = "proportional";
  auto* allocate = app.add_subcommand(
      "allocate", "Classical model-free allocations for a study file");
  allocate->add_option("study", opts.study_path, "Study JSON file")->required();
  allocate->add_option("--sampler", sampler, "proportional or uniform")
      ->required()
      ->check(CLI::IsMember({"proportional", "uniform"}));
  allocate->add_option("--out", opts.out_path, "Report path (default stdout)");

  std::string baseline = "local", target = "proportional";
  auto* efficiency = app.add_subcommand(
      "efficiency", "Relative efficiency of one allocation against another");
  efficiency->add_option("study", opts.study_path, "Study JSON file")->required();
  efficiency
      ->add_option("--baseline", baseline,
                   "local|ew|proportional|uniform or an allocation JSON file")
      ->required();
  efficiency
      ->add_option("--target", target,
                   "local|ew|proportional|uniform or an allocation JSON file")
      ->required();
  efficiency->add_option("--out", opts.out_path, "Report path (default stdout)");

  std::string csv_path;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo sampler comparison for a simulation file");
  simulate->add_option("config", opts.study_path, "Simulation JSON file")
      ->required();
  simulate->add_option("--out", opts.out_path, "Report path (default stdout)");
  simulate->add_option("--csv", csv_path, "Also write the summary table as CSV");

  auto* counter = app.add_subcommand(
      "counterexample",
      "Run the built-in region where sweeps alone stall below the optimum");
  counter->add_option("--out", opts.out_path, "Report path (default stdout)");

  CLI11_PARSE(app, argc, argv);
  if (seed >= 0) opts.seed_override = seed;

  try {
    if (design->parsed()) return cmd_design(opts, criterion);
    if (allocate->parsed()) return cmd_allocate(opts, sampler);
    if (efficiency->parsed()) return cmd_efficiency(opts, baseline, target);
    if (simulate->parsed()) return cmd_simulate(opts, csv_path);
    if (counter->parsed()) {
      return cmd_counterexample(opts.out_path, seed >= 0 ? seed : 1);
    }
  } catch (const StudyFileError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
