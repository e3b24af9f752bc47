#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "optdes/rng.hpp"
#include "optdes/study.hpp"
#include "support.hpp"

using namespace optdes;

namespace {

std::string study_path(const std::string& name) {
  return std::string(OPTDES_STUDY_DIR) + "/" + name;
}

std::string minimal_study = R"({
  "name": "mini",
  "strata": [{"x": [0], "count": 5}, {"x": [1], "count": 5}],
  "budget": 6,
  "model": {"type": "glm", "family": "bernoulli", "link": "logit",
            "terms": [{"kind": "intercept"}, {"kind": "continuous", "covariate": 0}]},
  "parameters": [0, 1]
})";

}  // namespace

TEST_CASE("parses the shipped six-strata study") {
  const StudyFile study = load_study(study_path("example1.json"));
  CHECK(study.name == "example1");
  CHECK(study.stratum_count() == 6);
  CHECK(study.budget == 200);
  CHECK(study.stratum_caps);
  REQUIRE(study.glm.has_value());
  CHECK(study.dimension() == 4);
  REQUIRE(study.parameters.has_value());
  CHECK((*study.parameters)(1) == doctest::Approx(3.0));
  REQUIRE(study.prior.has_value());
  CHECK(study.prior->draws == 200000);

  const auto region = region_from_study(study);
  REQUIRE(region.caps().has_value());
  CHECK((*region.caps())(0) == doctest::Approx(0.25));

  const auto atoms = local_atoms(study);
  CHECK(atoms.count() == 6);
  CHECK(atoms.rank_one);
}

TEST_CASE("parses the trauma study with count-scale group constraints") {
  const StudyFile study = load_study(study_path("trauma.json"));
  CHECK_FALSE(study.stratum_caps);
  REQUIRE(study.multinomial.has_value());
  CHECK(study.dimension() == 12);
  REQUIRE(study.linear.size() == 2);
  CHECK(study.linear[0].bound == doctest::Approx(392.0 / 600.0));
  CHECK(study.linear[1].bound == doctest::Approx(410.0 / 600.0));
  const auto region = region_from_study(study);
  CHECK_FALSE(region.caps().has_value());

  // The shipped sample file loads and yields EW atoms.
  const auto ew = ew_atoms(study, 1);
  CHECK(ew.count() == 8);
  CHECK(ew.skipped_samples == 0);
}

TEST_CASE("schema errors name the offending field path") {
  CHECK_THROWS_WITH_AS(parse_study("{}"),
                       doctest::Contains("strata"), StudyFileError);
  CHECK_THROWS_WITH_AS(parse_study(R"({"strata": [{"x": [0], "count": -2}]})"),
                       doctest::Contains("strata[0].count"), StudyFileError);
  CHECK_THROWS_WITH_AS(
      parse_study(R"({"strata": [{"x": [0], "count": 5}],
                      "model": {"type": "glm", "family": "bernoulli",
                                "link": "sqrt", "terms": [{"kind": "intercept"}]}})"),
      doctest::Contains("model"), StudyFileError);
  CHECK_THROWS_WITH_AS(parse_study("not json"), doctest::Contains("$"),
                       StudyFileError);

  std::string bad_budget = R"({
    "strata": [{"x": [0], "count": 5}], "budget": 50,
    "model": {"type": "glm", "family": "bernoulli", "link": "logit",
              "terms": [{"kind": "intercept"}]}})";
  CHECK_THROWS_WITH_AS(parse_study(bad_budget), doctest::Contains("budget"),
                       StudyFileError);
}

TEST_CASE("theta-sample CSV loader") {
  const std::string path = "/tmp/optdes_theta_test.csv";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "1.0,2.0\n";
    out << "3.0,4.0\n";
  }
  const Matrix samples = load_theta_samples(path, 2);
  CHECK(samples.rows() == 2);
  CHECK(samples(1, 1) == doctest::Approx(4.0));
  CHECK_THROWS_WITH_AS(load_theta_samples(path, 3), doctest::Contains(":2:"),
                       StudyFileError);
  {
    std::ofstream out(path);
    out << "1.0,oops\n";
  }
  CHECK_THROWS_AS(load_theta_samples(path, 2), StudyFileError);
}

TEST_CASE("allocation files round-trip through reports") {
  const StudyFile study = parse_study(minimal_study);
  const auto atoms = local_atoms(study);
  const auto region = region_from_study(study);
  const OptimResult res = constrained_lift_one(atoms, region, study.optimizer);
  const Eigen::VectorXi counts = round_off(atoms, region, res.allocation, 6);
  const std::string report = design_report_json(study, "local", res, counts, -1);

  const Vector again = parse_allocation_text(report);
  CHECK((again - res.allocation).cwiseAbs().maxCoeff() == 0.0);
  // Re-ingested weights give back the same log-determinant.
  CHECK(std::log(objective(atoms, again)) ==
        doctest::Approx(res.log_objective).epsilon(1e-10));

  CHECK_THROWS_AS(parse_allocation_text("{\"nope\": 1}"), StudyFileError);
}

TEST_CASE("design reports are bitwise deterministic") {
  const StudyFile study = load_study(study_path("example1.json"));
  const auto region = region_from_study(study);
  const auto atoms = local_atoms(study);
  const OptimResult r1 = constrained_lift_one(atoms, region, study.optimizer);
  const OptimResult r2 = constrained_lift_one(atoms, region, study.optimizer);
  const Eigen::VectorXi c1 = round_off(atoms, region, r1.allocation, study.budget);
  const Eigen::VectorXi c2 = round_off(atoms, region, r2.allocation, study.budget);
  CHECK(design_report_json(study, "local", r1, c1, -1) ==
        design_report_json(study, "local", r2, c2, -1));
}

TEST_CASE("simulation config loader") {
  const SimStudy sim = load_sim_study(study_path("sim_smoke.json"));
  CHECK(sim.sim.replicates == 1);
  CHECK(sim.sim.samplers.size() == 4);
  CHECK(sim.sim.index_sets.size() == 5);
  CHECK(sim.sim.budget == 200);
  const SimReport report = run_study(sim.sim);
  CHECK(report.rows.size() == 5);
  const std::string json_text = sim_report_json(report, sim.sim.seed);
  CHECK(json_text.find("\"Full Data\"") != std::string::npos);
  const std::string csv = sim_report_csv(report);
  CHECK(csv.find("sampler,mean(beta0)") == 0);
}
