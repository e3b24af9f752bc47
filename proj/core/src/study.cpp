#include "optdes/study.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "optdes/rng.hpp"

namespace optdes {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw StudyFileError(path + ": " + what);
}

const json& require(const json& node, const std::string& key,
                    const std::string& path) {
  if (!node.is_object() || !node.contains(key)) {
    fail(path + "." + key, "missing required field");
  }
  return node.at(key);
}

double as_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

long as_integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  return node.get<long>();
}

std::string as_string(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected a string");
  return node.get<std::string>();
}

Vector as_vector(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<int>(node.size()));
  for (int i = 0; i < v.size(); ++i) {
    v(i) = as_number(node[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Term parse_term(const json& node, const std::string& path) {
  const std::string kind = as_string(require(node, "kind", path), path + ".kind");
  if (kind == "intercept") return Term::intercept();
  if (kind == "continuous") {
    return Term::continuous(static_cast<int>(
        as_integer(require(node, "covariate", path), path + ".covariate")));
  }
  if (kind == "indicator") {
    return Term::indicator(
        static_cast<int>(
            as_integer(require(node, "covariate", path), path + ".covariate")),
        as_number(require(node, "level", path), path + ".level"));
  }
  if (kind == "interaction") {
    return Term::interaction(
        parse_term(require(node, "first", path), path + ".first"),
        parse_term(require(node, "second", path), path + ".second"));
  }
  fail(path + ".kind", "unknown term kind '" + kind + "'");
}

PredictorTerms parse_terms(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) fail(path, "expected a non-empty array");
  PredictorTerms terms;
  for (std::size_t t = 0; t < node.size(); ++t) {
    terms.push_back(parse_term(node[t], path + "[" + std::to_string(t) + "]"));
  }
  return terms;
}

FamilyLink parse_family_link(const json& model, const std::string& path,
                             double& family_constant) {
  const std::string family =
      as_string(require(model, "family", path), path + ".family");
  const std::string link =
      as_string(require(model, "link", path), path + ".link");
  family_constant = 1.0;
  if (family == "normal" && link == "identity") {
    if (model.contains("sigma2")) {
      family_constant = as_number(model.at("sigma2"), path + ".sigma2");
    }
    return FamilyLink::normal_identity;
  }
  if (family == "bernoulli") {
    if (link == "logit") return FamilyLink::bernoulli_logit;
    if (link == "probit") return FamilyLink::bernoulli_probit;
    if (link == "cloglog") return FamilyLink::bernoulli_cloglog;
    if (link == "loglog") return FamilyLink::bernoulli_loglog;
    if (link == "cauchit") return FamilyLink::bernoulli_cauchit;
  }
  if (family == "poisson" && link == "log") return FamilyLink::poisson_log;
  if (family == "gamma" && link == "reciprocal") {
    if (model.contains("shape")) {
      family_constant = as_number(model.at("shape"), path + ".shape");
    }
    return FamilyLink::gamma_reciprocal;
  }
  if (family == "inverse_gaussian" && link == "inverse_squared") {
    if (model.contains("lambda")) {
      family_constant = as_number(model.at("lambda"), path + ".lambda");
    }
    return FamilyLink::inverse_gaussian_inverse_squared;
  }
  fail(path, "unsupported family/link pair '" + family + "/" + link + "'");
}

PriorSpec parse_prior(const json& node, const std::string& path,
                      const std::string& base_dir, int dimension) {
  PriorSpec prior;
  const std::string type =
      as_string(require(node, "type", path), path + ".type");
  if (type == "samples") {
    const std::string rel =
        as_string(require(node, "path", path), path + ".path");
    const std::string full =
        rel.starts_with('/') ? rel : base_dir + "/" + rel;
    prior.samples = load_theta_samples(full, dimension);
    return prior;
  }
  if (type != "independent") fail(path + ".type", "expected 'independent' or 'samples'");
  const json& marginals = require(node, "marginals", path);
  if (!marginals.is_array() || marginals.empty()) {
    fail(path + ".marginals", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    const std::string mpath = path + ".marginals[" + std::to_string(i) + "]";
    const json& mj = marginals[i];
    PriorMarginal mar;
    const std::string dist =
        as_string(require(mj, "dist", mpath), mpath + ".dist");
    if (dist == "uniform") {
      mar.dist = PriorMarginal::Dist::uniform;
      mar.a = as_number(require(mj, "lower", mpath), mpath + ".lower");
      mar.b = as_number(require(mj, "upper", mpath), mpath + ".upper");
      if (!(mar.a < mar.b)) fail(mpath, "uniform needs lower < upper");
    } else if (dist == "normal") {
      mar.dist = PriorMarginal::Dist::normal;
      mar.a = as_number(require(mj, "mean", mpath), mpath + ".mean");
      mar.b = as_number(require(mj, "sd", mpath), mpath + ".sd");
      if (!(mar.b > 0.0)) fail(mpath + ".sd", "sd must be positive");
    } else if (dist == "gamma") {
      mar.dist = PriorMarginal::Dist::gamma;
      mar.a = as_number(require(mj, "shape", mpath), mpath + ".shape");
      mar.b = as_number(require(mj, "scale", mpath), mpath + ".scale");
      if (!(mar.a > 0.0) || !(mar.b > 0.0)) {
        fail(mpath, "gamma needs positive shape and scale");
      }
    } else {
      fail(mpath + ".dist", "unknown distribution '" + dist + "'");
    }
    prior.marginals.push_back(mar);
  }
  if (node.contains("draws")) {
    prior.draws = as_integer(node.at("draws"), path + ".draws");
    if (prior.draws < 1) fail(path + ".draws", "draws must be positive");
  }
  return prior;
}

LiftOneConfig parse_optimizer(const json& node, const std::string& path) {
  LiftOneConfig cfg;
  if (node.is_null()) return cfg;
  if (!node.is_object()) fail(path, "expected an object");
  if (node.contains("seed")) {
    cfg.seed = static_cast<std::uint64_t>(as_integer(node.at("seed"), path + ".seed"));
  }
  if (node.contains("sweep_tol")) {
    cfg.sweep_tol = as_number(node.at("sweep_tol"), path + ".sweep_tol");
    if (!(cfg.sweep_tol >= 0.0)) fail(path + ".sweep_tol", "must be >= 0");
  }
  if (node.contains("certificate_tol")) {
    cfg.certificate_tol =
        as_number(node.at("certificate_tol"), path + ".certificate_tol");
    if (!(cfg.certificate_tol > 0.0)) fail(path + ".certificate_tol", "must be > 0");
  }
  if (node.contains("max_outer")) {
    cfg.max_outer =
        static_cast<int>(as_integer(node.at("max_outer"), path + ".max_outer"));
    if (cfg.max_outer < 1) fail(path + ".max_outer", "must be >= 1");
  }
  if (node.contains("analytic_glm")) {
    if (!node.at("analytic_glm").is_boolean()) {
      fail(path + ".analytic_glm", "expected a boolean");
    }
    cfg.analytic_glm = node.at("analytic_glm").get<bool>();
  }
  return cfg;
}

StudyFile parse_study_json(const json& root, const std::string& base_dir) {
  StudyFile study;
  if (!root.is_object()) fail("$", "study file must be a JSON object");
  if (root.contains("name")) study.name = as_string(root.at("name"), "name");

  const json& strata = require(root, "strata", "$");
  if (!strata.is_array() || strata.empty()) {
    fail("strata", "expected a non-empty array");
  }
  bool any_count = false;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string path = "strata[" + std::to_string(i) + "]";
    const json& sj = strata[i];
    study.strata_x.push_back(as_vector(require(sj, "x", path), path + ".x"));
    if (sj.contains("count")) {
      const long c = as_integer(sj.at("count"), path + ".count");
      if (c <= 0) fail(path + ".count", "counts must be positive");
      study.counts.push_back(c);
      any_count = true;
    } else {
      study.counts.push_back(0);
    }
  }
  if (any_count) {
    for (std::size_t i = 0; i < study.counts.size(); ++i) {
      if (study.counts[i] == 0) {
        fail("strata[" + std::to_string(i) + "].count",
             "either all strata carry counts or none");
      }
    }
  } else {
    study.counts.clear();
  }

  if (root.contains("budget")) {
    study.budget = as_integer(root.at("budget"), "budget");
    if (study.budget < 1) fail("budget", "must be >= 1");
    if (!study.counts.empty()) {
      long total = 0;
      for (long c : study.counts) total += c;
      if (study.budget > total) fail("budget", "exceeds the population size");
    }
  }

  if (root.contains("constraints")) {
    const json& cons = root.at("constraints");
    if (!cons.is_object()) fail("constraints", "expected an object");
    if (cons.contains("stratum_caps")) {
      if (!cons.at("stratum_caps").is_boolean()) {
        fail("constraints.stratum_caps", "expected a boolean");
      }
      study.stratum_caps = cons.at("stratum_caps").get<bool>();
    }
    if (cons.contains("linear")) {
      const json& lin = cons.at("linear");
      if (!lin.is_array()) fail("constraints.linear", "expected an array");
      for (std::size_t i = 0; i < lin.size(); ++i) {
        const std::string path = "constraints.linear[" + std::to_string(i) + "]";
        const json& cj = lin[i];
        LinearConstraint lc;
        lc.coefficients =
            as_vector(require(cj, "coefficients", path), path + ".coefficients");
        if (lc.coefficients.size() != study.stratum_count()) {
          fail(path + ".coefficients", "length must equal the stratum count");
        }
        lc.bound = as_number(require(cj, "bound", path), path + ".bound");
        std::string scale = "weight";
        if (cj.contains("scale")) scale = as_string(cj.at("scale"), path + ".scale");
        if (scale == "count") {
          if (study.budget < 1) {
            fail(path + ".scale", "count-scale constraints need a budget");
          }
          lc.bound /= static_cast<double>(study.budget);
        } else if (scale != "weight") {
          fail(path + ".scale", "expected 'weight' or 'count'");
        }
        study.linear.push_back(std::move(lc));
      }
    }
  }
  if (study.stratum_caps && study.counts.empty()) study.stratum_caps = false;

  if (root.contains("model")) {
    const json& model = root.at("model");
    const std::string type =
        as_string(require(model, "type", "model"), "model.type");
    const PredictorTerms terms =
        parse_terms(require(model, "terms", "model"), "model.terms");
    if (type == "glm") {
      GlmSpec spec;
      spec.terms = terms;
      spec.strata = study.strata_x;
      spec.link = parse_family_link(model, "model", spec.family_constant);
      study.glm = std::move(spec);
    } else if (type == "multinomial") {
      MultinomialSpec spec;
      spec.terms = terms;
      spec.strata = study.strata_x;
      spec.categories = static_cast<int>(
          as_integer(require(model, "categories", "model"), "model.categories"));
      if (spec.categories < 2) fail("model.categories", "need J >= 2");
      const std::string logit =
          as_string(require(model, "logit", "model"), "model.logit");
      if (logit == "cumulative") spec.link = LogitLink::cumulative;
      else if (logit == "baseline") spec.link = LogitLink::baseline;
      else if (logit == "adjacent") spec.link = LogitLink::adjacent;
      else if (logit == "continuation") spec.link = LogitLink::continuation;
      else fail("model.logit", "unknown logit type '" + logit + "'");
      const std::string odds =
          as_string(require(model, "odds", "model"), "model.odds");
      if (odds == "po") spec.odds = OddsStructure::po;
      else if (odds == "npo") spec.odds = OddsStructure::npo;
      else fail("model.odds", "expected 'po' or 'npo'");
      study.multinomial = std::move(spec);
    } else {
      fail("model.type", "expected 'glm' or 'multinomial'");
    }
  }

  if (root.contains("parameters")) {
    study.parameters = as_vector(root.at("parameters"), "parameters");
    if (study.parameters->size() != study.dimension()) {
      fail("parameters", "length must match the model dimension");
    }
  }
  if (root.contains("prior")) {
    study.prior =
        parse_prior(root.at("prior"), "prior", base_dir, study.dimension());
    if (study.glm && !study.prior->from_samples() &&
        static_cast<int>(study.prior->marginals.size()) != study.dimension()) {
      fail("prior.marginals", "length must match the model dimension");
    }
  }
  study.optimizer = parse_optimizer(
      root.contains("optimizer") ? root.at("optimizer") : json(), "optimizer");
  return study;
}

json parse_text(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) {
    throw StudyFileError("$: not valid JSON");
  }
  return root;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StudyFileError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dirname_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json counts_to_json(const Eigen::VectorXi& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

int StudyFile::dimension() const {
  if (glm) return glm->dimension();
  if (multinomial) return multinomial->dimension();
  throw StudyFileError("model: study has no model");
}

StudyFile load_study(const std::string& path) {
  return parse_study_json(parse_text(read_file(path)), dirname_of(path));
}

StudyFile parse_study(const std::string& json_text, const std::string& base_dir) {
  return parse_study_json(parse_text(json_text), base_dir);
}

FeasibleRegion region_from_study(const StudyFile& study) {
  std::optional<Vector> caps;
  if (study.stratum_caps && !study.counts.empty()) {
    if (study.budget < 1) {
      throw StudyFileError("budget: required when stratum caps are enabled");
    }
    Vector c(study.stratum_count());
    for (int i = 0; i < c.size(); ++i) {
      c(i) = std::min(
          1.0, static_cast<double>(study.counts[i]) / study.budget);
    }
    caps = c;
  }
  return FeasibleRegion(study.stratum_count(), caps, study.linear);
}

FisherAtoms local_atoms(const StudyFile& study) {
  if (!study.parameters) {
    throw StudyFileError("parameters: required for the local criterion");
  }
  if (study.glm) return glm_fisher_atoms(*study.glm, *study.parameters);
  if (study.multinomial) {
    return multinomial_fisher_atoms(*study.multinomial, *study.parameters);
  }
  throw StudyFileError("model: study has no model");
}

FisherAtoms ew_atoms(const StudyFile& study, std::uint64_t seed) {
  if (!study.prior) {
    throw StudyFileError("prior: required for the ew criterion");
  }
  if (study.glm) return glm_ew_atoms(*study.glm, *study.prior, seed);
  if (study.multinomial) {
    if (!study.prior->from_samples()) {
      throw StudyFileError(
          "prior: multinomial EW needs a theta-sample file ('type': 'samples')");
    }
    return multinomial_ew_atoms(*study.multinomial, study.prior->samples);
  }
  throw StudyFileError("model: study has no model");
}

Matrix load_theta_samples(const std::string& path, int expected_width) {
  std::ifstream in(path);
  if (!in) throw StudyFileError(path + ": cannot open theta-sample file");
  std::vector<Vector> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<double> vals;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw StudyFileError(path + ":" + std::to_string(lineno) +
                             ": not a number: '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != expected_width) {
      throw StudyFileError(path + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(expected_width) + " values, found " +
                           std::to_string(vals.size()));
    }
    rows.push_back(Eigen::Map<Vector>(vals.data(), expected_width));
  }
  if (rows.empty()) throw StudyFileError(path + ": no parameter rows");
  Matrix out(static_cast<long>(rows.size()), expected_width);
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = rows[r].transpose();
  return out;
}

SimStudy load_sim_study(const std::string& path) {
  const json root = parse_text(read_file(path));
  SimStudy out;
  out.study = parse_study_json(root, dirname_of(path));
  if (!out.study.glm) {
    throw StudyFileError("model: simulation studies need a GLM model");
  }
  if (!out.study.parameters) {
    throw StudyFileError("parameters: simulation studies need true parameters");
  }
  if (out.study.counts.empty()) {
    throw StudyFileError("strata: simulation studies need stratum counts");
  }
  const json& sim = require(root, "simulation", "$");
  SimConfig cfg;
  cfg.model = *out.study.glm;
  cfg.theta = *out.study.parameters;
  cfg.stratum_counts = out.study.counts;
  cfg.budget = out.study.budget;
  cfg.optimizer = out.study.optimizer;
  if (sim.contains("replicates")) {
    cfg.replicates = static_cast<int>(
        as_integer(sim.at("replicates"), "simulation.replicates"));
    if (cfg.replicates < 1) fail("simulation.replicates", "must be >= 1");
  }
  if (sim.contains("seed")) {
    cfg.seed = static_cast<std::uint64_t>(
        as_integer(sim.at("seed"), "simulation.seed"));
  }
  const json& samplers = require(sim, "samplers", "simulation");
  if (!samplers.is_array() || samplers.empty()) {
    fail("simulation.samplers", "expected a non-empty array");
  }
  for (std::size_t s = 0; s < samplers.size(); ++s) {
    const std::string path_s = "simulation.samplers[" + std::to_string(s) + "]";
    const json& sj = samplers[s];
    SamplerSpec spec;
    const std::string kind =
        as_string(require(sj, "kind", path_s), path_s + ".kind");
    if (kind == "srswor") spec.kind = SamplerKind::srswor;
    else if (kind == "proportional") spec.kind = SamplerKind::proportional;
    else if (kind == "uniform") spec.kind = SamplerKind::uniform;
    else if (kind == "d_optimal") spec.kind = SamplerKind::d_optimal;
    else if (kind == "ew_d_optimal") spec.kind = SamplerKind::ew_d_optimal;
    else fail(path_s + ".kind", "unknown sampler kind '" + kind + "'");
    spec.label = sj.contains("label")
                     ? as_string(sj.at("label"), path_s + ".label")
                     : kind;
    if (spec.kind == SamplerKind::ew_d_optimal) {
      if (sj.contains("prior")) {
        spec.prior = parse_prior(sj.at("prior"), path_s + ".prior",
                                 dirname_of(path), out.study.dimension());
      } else if (out.study.prior) {
        spec.prior = out.study.prior;
      } else {
        fail(path_s + ".prior", "ew_d_optimal sampler needs a prior");
      }
    }
    cfg.samplers.push_back(std::move(spec));
  }
  const json& sets = require(sim, "index_sets", "simulation");
  if (!sets.is_array() || sets.empty()) {
    fail("simulation.index_sets", "expected a non-empty array");
  }
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string path_k = "simulation.index_sets[" + std::to_string(k) + "]";
    IndexSet is;
    is.label = as_string(require(sets[k], "label", path_k), path_k + ".label");
    const json& idx = require(sets[k], "indices", path_k);
    if (!idx.is_array() || idx.empty()) fail(path_k + ".indices", "non-empty array");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const long v = as_integer(idx[i], path_k + ".indices[" + std::to_string(i) + "]");
      if (v < 0 || v >= out.study.dimension()) {
        fail(path_k + ".indices[" + std::to_string(i) + "]", "index out of range");
      }
      is.indices.push_back(static_cast<int>(v));
    }
    cfg.index_sets.push_back(std::move(is));
  }
  out.sim = std::move(cfg);
  return out;
}

Vector parse_allocation_text(const std::string& json_text) {
  const json root = parse_text(json_text);
  if (root.is_object() && root.contains("weights")) {
    return as_vector(root.at("weights"), "weights");
  }
  if (root.is_object() && root.contains("allocation") &&
      root.at("allocation").is_object() &&
      root.at("allocation").contains("weights")) {
    return as_vector(root.at("allocation").at("weights"), "allocation.weights");
  }
  throw StudyFileError(
      "allocation: expected 'weights' or a report with allocation.weights");
}

Vector load_allocation(const std::string& path) {
  return parse_allocation_text(read_file(path));
}

std::string design_report_json(const StudyFile& study,
                               const std::string& criterion,
                               const OptimResult& result,
                               const Eigen::VectorXi& counts,
                               long skipped_prior_samples) {
  json report;
  report["schema_version"] = 1;
  report["command"] = "design";
  report["study"] = study.name;
  report["criterion"] = criterion;
  report["seed"] = study.optimizer.seed;
  report["allocation"] = {{"weights", vector_to_json(result.allocation)}};
  if (counts.size() > 0) {
    report["allocation"]["counts"] = counts_to_json(counts);
    report["allocation"]["budget"] = study.budget;
  }
  report["objective"] = {{"determinant", result.objective},
                         {"log_determinant", result.log_objective}};
  report["certificate"] = {
      {"lift_derivatives", vector_to_json(result.certificate.lift_derivatives)},
      {"lp_value", result.certificate.lp_value},
      {"tolerance", study.optimizer.certificate_tol},
      {"certified", result.certificate.certified}};
  report["converged"] = result.converged;
  report["outer_restarts"] = result.outer_restarts;
  report["sweeps"] = result.sweep_count;
  if (skipped_prior_samples >= 0) {
    report["prior_samples_skipped"] = skipped_prior_samples;
  }
  return report.dump(2) + "\n";
}

std::string allocate_report_json(const StudyFile& study,
                                 const std::string& sampler, const Vector& w,
                                 const Eigen::VectorXi& counts) {
  json report;
  report["schema_version"] = 1;
  report["command"] = "allocate";
  report["study"] = study.name;
  report["sampler"] = sampler;
  report["allocation"] = {{"weights", vector_to_json(w)},
                          {"counts", counts_to_json(counts)},
                          {"budget", study.budget}};
  return report.dump(2) + "\n";
}

std::string efficiency_report_json(const StudyFile& study,
                                   const std::string& baseline,
                                   const std::string& target,
                                   double efficiency_percent,
                                   double log_det_target,
                                   double log_det_baseline) {
  json report;
  report["schema_version"] = 1;
  report["command"] = "efficiency";
  report["study"] = study.name;
  report["baseline"] = baseline;
  report["target"] = target;
  report["relative_efficiency_percent"] = efficiency_percent;
  report["log_determinants"] = {{"target", log_det_target},
                                {"baseline", log_det_baseline}};
  return report.dump(2) + "\n";
}

std::string sim_report_json(const SimReport& report, std::uint64_t seed) {
  json out;
  out["schema_version"] = 1;
  out["command"] = "simulate";
  out["replicates"] = report.replicates;
  out["seed"] = seed;
  json sets = json::array();
  for (const auto& is : report.index_sets) sets.push_back(is.label);
  out["index_sets"] = sets;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json rj;
    rj["sampler"] = row.label;
    if (row.allocation.size() > 0) {
      rj["allocation"] = counts_to_json(row.allocation);
    }
    json metrics = json::array();
    for (std::size_t k = 0; k < report.index_sets.size(); ++k) {
      metrics.push_back({{"index_set", report.index_sets[k].label},
                         {"mean", row.mean_rmse[k]},
                         {"sd", row.sd_rmse[k]}});
    }
    rj["rmse"] = metrics;
    rj["separation_count"] = row.separation_count;
    rj["nonconverged_count"] = row.nonconverged_count;
    rows.push_back(rj);
  }
  out["rows"] = rows;
  return out.dump(2) + "\n";
}

std::string sim_report_csv(const SimReport& report) {
  std::ostringstream out;
  out << "sampler";
  for (const auto& is : report.index_sets) {
    out << ",mean(" << is.label << "),sd(" << is.label << ")";
  }
  out << ",separation_count\n";
  out.precision(6);
  for (const auto& row : report.rows) {
    out << row.label;
    for (std::size_t k = 0; k < report.index_sets.size(); ++k) {
      out << "," << row.mean_rmse[k] << "," << row.sd_rmse[k];
    }
    out << "," << row.separation_count << "\n";
  }
  return out.str();
}

std::string counterexample_report_json(const OptimResult& constrained,
                                       const OptimResult& sweeps_only,
                                       double stalled_efficiency_percent) {
  json report;
  report["schema_version"] = 1;
  report["command"] = "counterexample";
  report["constrained"] = {
      {"weights", vector_to_json(constrained.allocation)},
      {"objective", constrained.objective},
      {"certified", constrained.certificate.certified},
      {"outer_restarts", constrained.outer_restarts}};
  report["sweeps_only"] = {{"weights", vector_to_json(sweeps_only.allocation)},
                           {"objective", sweeps_only.objective}};
  report["stalled_efficiency_percent"] = stalled_efficiency_percent;
  return report.dump(2) + "\n";
}

}  // namespace optdes
