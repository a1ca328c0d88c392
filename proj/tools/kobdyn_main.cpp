// kobdyn: batch front-end over the library.  Subcommands parse a JSON map or
// flow specification, run one operation, and emit a JSON or CSV report that
// embeds the run configuration (identical spec+config+seed ⇒ identical bytes).
//
// Exit codes: 0 success; 1 malformed spec/config or kind mismatch;
// 2 not-converged / inconclusive (partial report still written); 3 a verify
// suite found a failing property.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kobdyn/functional_equations.hpp"
#include "kobdyn/invariants.hpp"
#include "kobdyn/lft_models.hpp"
#include "kobdyn/map_spec.hpp"
#include "kobdyn/semigroups.hpp"
#include "kobdyn/verify.hpp"

using kobdyn::RunConfig;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Output plumbing.
// ---------------------------------------------------------------------------

void flatten(const ordered_json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& item : j.items()) {
      flatten(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(),
              rows);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
    }
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, fmt17(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

void write_report(const ordered_json& report, const RunConfig& cfg) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw kobdyn::Error("cannot open output file: " + cfg.output);
    out = &file;
  }
  if (cfg.format == "json") {
    *out << report.dump(2) << "\n";
    return;
  }
  // CSV: flattened key,value rows; 17 significant digits, no locale.
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  *out << "key,value\n";
  for (const auto& [k, v] : rows) *out << k << "," << v << "\n";
}

ordered_json config_json(const RunConfig& cfg) {
  // Ordered copy so reports render the configuration stably.  The output
  // destination is deliberately omitted: it does not influence the numbers,
  // and echoing it would make otherwise-identical runs produce different
  // bytes.
  return ordered_json{{"tol", cfg.tol},       {"max_iter", cfg.max_iter},
                      {"cap", cfg.cap},       {"samples", cfg.samples},
                      {"seed", cfg.seed},     {"eig_tol", cfg.eig_tol},
                      {"format", cfg.format}};
}

ordered_json cvec_json(const kobdyn::CVector& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) {
    out.push_back(ordered_json::array({v[i].real(), v[i].imag()}));
  }
  return out;
}

ordered_json tail_json(const std::vector<double>& v, std::size_t keep = 20) {
  ordered_json out = ordered_json::array();
  const std::size_t start = v.size() > keep ? v.size() - keep : 0;
  for (std::size_t i = start; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Shared CLI state.
// ---------------------------------------------------------------------------

struct Cli {
  std::string map_file;
  std::string point_json;
  std::string suite;
  int steps = 100;
  int step_m = 1;
  RunConfig cfg;
};

kobdyn::ParsedSpec load_spec(const Cli& cli) {
  if (cli.map_file.empty()) throw kobdyn::Error("--map FILE is required");
  return kobdyn::load_map_spec(cli.map_file);
}

const kobdyn::SelfMap& require_map(const kobdyn::ParsedSpec& spec) {
  if (spec.is_semigroup()) {
    throw kobdyn::Error("this command expects a map spec, got a flow spec");
  }
  return *spec.map;
}

ordered_json base_report(const char* command, const Cli& cli,
                         const kobdyn::ParsedSpec& spec) {
  ordered_json rep;
  rep["command"] = command;
  rep["spec_kind"] = spec.kind;
  rep["config"] = config_json(cli.cfg);
  return rep;
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

int cmd_classify(const Cli& cli) {
  const kobdyn::ParsedSpec spec = load_spec(cli);
  ordered_json rep = base_report("classify", cli, spec);

  kobdyn::DenjoyWolffOptions opts;
  opts.tol = cli.cfg.tol;
  opts.max_iter = cli.cfg.max_iter;
  opts.orbit_cap = static_cast<int>(std::min<long>(cli.cfg.cap, 100000));

  bool inconclusive = false;
  if (spec.is_semigroup()) {
    kobdyn::SemigroupClassifyOptions sopts;
    sopts.dw = opts;
    const kobdyn::SemigroupClassification cls =
        kobdyn::classify_semigroup(*spec.semigroup, sopts);
    rep["class"] = cls.map_class ? kobdyn::to_string(*cls.map_class) : "inconclusive";
    rep["lambda"] = cls.lambda;
    rep["consistent"] = cls.consistent;
    ordered_json checks = ordered_json::array();
    for (const auto& c : cls.checks) {
      checks.push_back(ordered_json{{"t", c.t},
                                    {"dilation", c.dilation},
                                    {"expected_dilation", c.expected_dilation},
                                    {"dw_gap", c.dw_gap}});
    }
    rep["checks"] = checks;
    inconclusive = cls.inconclusive || !cls.map_class;
  } else {
    const kobdyn::DenjoyWolffData dw = kobdyn::denjoy_wolff(*spec.map, opts);
    rep["class"] = dw.map_class ? kobdyn::to_string(*dw.map_class) : "inconclusive";
    if (dw.boundary_point) rep["dw_point"] = cvec_json(*dw.boundary_point);
    if (dw.fixed_point) rep["fixed_point"] = cvec_json(*dw.fixed_point);
    if (dw.dilation) rep["dilation"] = *dw.dilation;
    rep["diagnostics"] =
        ordered_json{{"dilation_from_quotients", dw.dilation_from_quotients},
                     {"dilation_from_rate", dw.dilation_from_rate},
                     {"rate_estimate", dw.rate_estimate},
                     {"status", dw.status == kobdyn::LimitStatus::converged
                                    ? "converged"
                                    : "not_converged"},
                     {"note", dw.note}};
    inconclusive = dw.inconclusive || !dw.map_class;
  }
  rep["inconclusive"] = inconclusive;
  write_report(rep, cli.cfg);
  return inconclusive ? 2 : 0;
}

int cmd_divergence_rate(const Cli& cli) {
  const kobdyn::ParsedSpec spec = load_spec(cli);
  const kobdyn::SelfMap& f = require_map(spec);
  ordered_json rep = base_report("divergence-rate", cli, spec);

  kobdyn::DivergenceOptions opts;
  opts.max_m = cli.cfg.cap;
  opts.tol = cli.cfg.tol;
  const kobdyn::CVector base = kobdyn::default_base(f.domain(), f.dim());
  const kobdyn::DivergenceEstimate est = kobdyn::divergence_rate(f, base, opts);

  rep["c"] = est.c;
  rep["bracket"] = ordered_json::array({est.bracket.first, est.bracket.second});
  rep["status"] = est.status == kobdyn::LimitStatus::converged ? "converged"
                                                               : "not_converged";
  rep["increments_decaying"] = est.increments_decaying;
  rep["n_used"] = est.n_used;
  rep["base"] = cvec_json(base);
  rep["ratios_tail"] = tail_json(est.ratios);
  rep["fekete_tail"] = tail_json(est.fekete_bounds);
  rep["via_steps_tail"] = tail_json(est.via_steps);
  write_report(rep, cli.cfg);
  return est.status == kobdyn::LimitStatus::converged ? 0 : 2;
}

int cmd_step(const Cli& cli) {
  const kobdyn::ParsedSpec spec = load_spec(cli);
  const kobdyn::SelfMap& f = require_map(spec);
  ordered_json rep = base_report("step", cli, spec);
  rep["m"] = cli.step_m;

  kobdyn::StepOptions opts;
  opts.tol = cli.cfg.tol;
  opts.cap = cli.cfg.max_iter;
  const kobdyn::CVector base = kobdyn::default_base(f.domain(), f.dim());
  try {
    const kobdyn::StepEstimate est =
        kobdyn::hyperbolic_step(f, base, cli.step_m, opts);
    rep["limit"] = est.limit;
    rep["window"] = est.window;
    rep["values_tail"] = tail_json(est.values);
    rep["status"] = "converged";
    write_report(rep, cli.cfg);
    return 0;
  } catch (const kobdyn::NotConvergent& e) {
    rep["status"] = "not_converged";
    rep["error"] = e.what();
    write_report(rep, cli.cfg);
    return 2;
  }
}

ordered_json omega_json(const kobdyn::ModelDomain& omega) {
  return ordered_json{
      {"shape", omega.shape == kobdyn::ModelDomain::Shape::whole_space
                    ? "whole_space"
                    : "shifted_paraboloid"},
      {"q", omega.q},
      {"head", omega.head},
      {"beta", omega.beta},
      {"description", omega.description}};
}

ordered_json tau_json(const kobdyn::SemiModelReport& model) {
  ordered_json out;
  out["kind"] = kobdyn::to_string(model.tau_kind);
  out["base_dimension"] = model.base_dimension;
  out["retained_coordinates"] = model.retained_coordinates;
  if (model.tau) out["label"] = model.tau->label();
  return out;
}

int cmd_model(const Cli& cli) {
  if (cli.map_file.empty()) throw kobdyn::Error("--map FILE is required");
  std::ifstream in(cli.map_file);
  if (!in) throw kobdyn::Error("map spec: cannot open file: " + cli.map_file);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw kobdyn::Error(std::string("map spec: invalid JSON: ") + e.what());
  }
  const kobdyn::ParsedSpec spec = kobdyn::parse_map_spec(doc);
  ordered_json rep = base_report("model", cli, spec);

  kobdyn::SemiModelReport model;
  kobdyn::SelfMap g;
  if (spec.kind == "lft_hyperbolic") {
    // Re-validate from the raw document to recover the normal-form blocks.
    kobdyn::HyperbolicLFTForm form;
    form.lambda = doc.at("lambda").get<double>();
    form.b = kobdyn::json_to_complex(doc.at("b"), "b");
    form.D_diag = kobdyn::json_to_cvector(doc.at("D"), "D");
    form.A = kobdyn::CMatrix::Zero(doc.at("A").size(), doc.at("A").size());
    for (std::size_t i = 0; i < doc.at("A").size(); ++i) {
      const kobdyn::CVector row = kobdyn::json_to_cvector(doc.at("A")[i], "A row");
      for (int k = 0; k < row.size(); ++k) form.A(static_cast<int>(i), k) = row[k];
    }
    form.c = kobdyn::json_to_cvector(doc.at("c"), "c");
    form.p = 1 + static_cast<int>(form.D_diag.size());
    form.q = form.p + static_cast<int>(form.A.rows());
    const kobdyn::ValidatedHyperbolicForm v = kobdyn::validate_hyperbolic_form(form);
    model = kobdyn::canonical_semi_model_hyperbolic(v);
    g = kobdyn::hyperbolic_to_self_map(v);
    rep["family"] = "hyperbolic";
    rep["lambda"] = form.lambda;
    rep["offset_bound"] = v.offset_bound;
    rep["near_upper_boundary"] = v.near_upper_boundary;

    kobdyn::DomainConsistencyOptions dopts;
    dopts.member_samples = cli.cfg.samples;
    dopts.nonmember_samples = cli.cfg.samples;
    dopts.seed = cli.cfg.seed;
    const kobdyn::DomainConsistencyReport dom =
        kobdyn::check_model_domain_consistency(g, model.omega, dopts);
    rep["domain_consistency"] = ordered_json{
        {"member_samples", dom.member_samples},
        {"nonmember_samples", dom.nonmember_samples},
        {"contradictions", dom.contradictions},
        {"pass", dom.pass}};
  } else if (spec.kind == "lft_parabolic") {
    kobdyn::ParabolicLFTForm form;
    form.a = kobdyn::json_to_cvector(doc.at("a"), "a");
    form.b = kobdyn::json_to_complex(doc.at("b"), "b");
    form.c = kobdyn::json_to_cvector(doc.at("c"), "c");
    form.D_diag = kobdyn::json_to_cvector(doc.at("D"), "D");
    form.A = kobdyn::CMatrix::Zero(doc.at("A").size(), doc.at("A").size());
    for (std::size_t i = 0; i < doc.at("A").size(); ++i) {
      const kobdyn::CVector row = kobdyn::json_to_cvector(doc.at("A")[i], "A row");
      for (int k = 0; k < row.size(); ++k) form.A(static_cast<int>(i), k) = row[k];
    }
    form.r = 1 + static_cast<int>(form.a.size());
    form.p = form.r + static_cast<int>(form.D_diag.size());
    form.q = form.p + static_cast<int>(form.A.rows());
    const kobdyn::ValidatedParabolicForm v = kobdyn::validate_parabolic_form(form);
    model = kobdyn::parabolic_model_dichotomy(v);
    g = kobdyn::parabolic_to_self_map(v);
    rep["family"] = "parabolic";
    rep["dichotomy_offset"] = model.dichotomy_offset;
    rep["boundary_case"] = model.boundary_case;
  } else {
    throw kobdyn::Error("model: spec kind must be lft_hyperbolic or lft_parabolic");
  }

  rep["omega"] = omega_json(model.omega);
  rep["tau"] = tau_json(model);
  if (model.tau) {
    rep["intertwining_residual"] =
        kobdyn::intertwining_residual(g, model, cli.cfg.samples, cli.cfg.seed);
    kobdyn::DivergenceOptions ropts;
    ropts.max_m = std::min<long>(cli.cfg.cap, 2000);
    ropts.tol = cli.cfg.tol;
    rep["rate_of_map"] =
        kobdyn::divergence_rate(g, kobdyn::default_base(g.domain(), g.dim()), ropts).c;
    rep["rate_of_tau"] =
        kobdyn::divergence_rate(*model.tau,
                                kobdyn::default_base(kobdyn::Domain::siegel,
                                                     model.base_dimension),
                                ropts)
            .c;
  }
  write_report(rep, cli.cfg);
  return 0;
}

int cmd_valiron(const Cli& cli, bool abel) {
  const kobdyn::ParsedSpec spec = load_spec(cli);
  const kobdyn::SelfMap& f = require_map(spec);
  ordered_json rep = base_report(abel ? "abel" : "valiron", cli, spec);

  kobdyn::ValironOptions opts;
  opts.cap = cli.cfg.cap;
  try {
    const kobdyn::ValironSolution sol =
        kobdyn::valiron_solve(f, cli.cfg.samples, cli.cfg.seed, opts);
    rep["lambda_f"] = sol.lambda_f;
    rep["valiron_residual_sup"] = sol.residual_sup;
    rep["failed_points"] = sol.failed_points;
    rep["samples"] = static_cast<int>(sol.samples.size());
    rep["im_positive_on_samples"] = sol.im_positive_on_samples;
    rep["filling_certified"] = sol.filling_certified;
    if (abel) {
      const kobdyn::AbelSolution ab = kobdyn::abel_solve(f, sol);
      rep["abel_residual_sup"] = ab.residual_sup;
      rep["strip_height"] = ab.strip_height;
      rep["surjective"] = ab.surjective;
    }
    write_report(rep, cli.cfg);
    return 0;
  } catch (const kobdyn::NotConvergent& e) {
    rep["status"] = "not_converged";
    rep["error"] = e.what();
    write_report(rep, cli.cfg);
    return 2;
  }
}

int cmd_semigroup(const Cli& cli) {
  const kobdyn::ParsedSpec spec = load_spec(cli);
  if (!spec.is_semigroup()) {
    throw kobdyn::Error("semigroup: spec kind must be semigroup_affine_siegel");
  }
  const kobdyn::Semigroup& phi = *spec.semigroup;
  ordered_json rep = base_report("semigroup", cli, spec);
  if (phi.flow_rate()) rep["generator_lambda"] = *phi.flow_rate();

  const kobdyn::CVector base = kobdyn::default_base(phi.domain(), phi.dim());
  kobdyn::SemigroupRateOptions ropts;
  ropts.tol = cli.cfg.tol;
  const kobdyn::SemigroupRateEstimate rate = kobdyn::semigroup_rate(phi, base, ropts);
  rep["rate"] = ordered_json{
      {"lambda", rate.lambda},
      {"bracket", ordered_json::array({rate.bracket.first, rate.bracket.second})},
      {"status", rate.status == kobdyn::LimitStatus::converged ? "converged"
                                                               : "not_converged"},
      {"increments_decaying", rate.increments_decaying}};

  kobdyn::LinearityOptions lopts;
  lopts.tol = cli.cfg.tol;
  const kobdyn::LinearityReport lin =
      kobdyn::rate_linearity_check(phi, {0.5, 1.0, 2.0, 4.0}, lopts);
  rep["linearity"] = ordered_json{{"c1", lin.c1},
                                  {"slope", lin.slope},
                                  {"max_deviation", lin.max_deviation},
                                  {"pass", lin.pass}};
  rep["law_residual"] = kobdyn::semigroup_law_residual(phi, 100, cli.cfg.seed);

  const kobdyn::SemigroupClassification cls = kobdyn::classify_semigroup(phi);
  rep["classification"] = ordered_json{
      {"class", cls.map_class ? kobdyn::to_string(*cls.map_class) : "inconclusive"},
      {"lambda", cls.lambda},
      {"consistent", cls.consistent},
      {"inconclusive", cls.inconclusive}};
  write_report(rep, cli.cfg);
  const bool partial = rate.status != kobdyn::LimitStatus::converged ||
                       cls.inconclusive || !cls.map_class;
  return partial ? 2 : 0;
}

int cmd_verify(const Cli& cli) {
  if (cli.suite.empty()) throw kobdyn::Error("verify: suite name required");
  const kobdyn::SuiteReport suite = kobdyn::run_verify_suite(cli.suite, cli.cfg);
  ordered_json rep;
  rep["command"] = "verify";
  rep["suite"] = suite.suite;
  rep["config"] = config_json(cli.cfg);
  rep["pass"] = suite.pass;
  ordered_json checks = ordered_json::array();
  for (const auto& c : suite.checks) {
    checks.push_back(ordered_json{{"name", c.name},
                                  {"pass", c.pass},
                                  {"worst", c.worst},
                                  {"bound", c.bound},
                                  {"detail", c.detail}});
  }
  rep["checks"] = checks;
  write_report(rep, cli.cfg);
  return suite.pass ? 0 : 3;
}

int cmd_orbit(const Cli& cli) {
  const kobdyn::ParsedSpec spec = load_spec(cli);
  const kobdyn::SelfMap& f = require_map(spec);
  if (cli.steps < 0) throw kobdyn::Error("orbit: --steps must be >= 0");

  kobdyn::CVector z0;
  if (cli.point_json.empty()) {
    z0 = kobdyn::default_base(f.domain(), f.dim());
  } else {
    nlohmann::json pj;
    try {
      pj = nlohmann::json::parse(cli.point_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw kobdyn::Error(std::string("orbit: invalid --point JSON: ") + e.what());
    }
    z0 = kobdyn::json_to_cvector(pj, "point");
    if (z0.size() != f.dim()) throw kobdyn::Error("orbit: point dimension mismatch");
    if (kobdyn::interior_margin(f.domain(), z0) <= 0.0) {
      throw kobdyn::Error("orbit: point lies outside the map's domain");
    }
  }

  ordered_json rep = base_report("orbit", cli, spec);
  ordered_json rows = ordered_json::array();
  std::string error_note;
  const kobdyn::Domain d = f.domain();
  kobdyn::CVector z = z0;
  bool truncated = false;
  for (int m = 0; m <= cli.steps; ++m) {
    ordered_json row;
    row["m"] = m;
    row["z"] = cvec_json(z);
    row["norm"] = z.norm();
    row["k_from_start"] = m == 0 ? 0.0 : kobdyn::kobayashi_distance(d, z0, z);
    kobdyn::CVector next;
    if (m < cli.steps) {
      try {
        next = f(z);
        row["k_step"] = kobdyn::kobayashi_distance(d, z, next);
      } catch (const kobdyn::DomainEscape& e) {
        rows.push_back(row);
        ordered_json err;
        err["m"] = m + 1;
        err["error"] = e.what();
        rows.push_back(err);
        truncated = true;
        error_note = e.what();
        break;
      }
    }
    rows.push_back(row);
    if (m < cli.steps) z = next;
  }
  rep["truncated"] = truncated;
  rep["rows"] = rows;

  if (cli.cfg.format == "csv") {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!cli.cfg.output.empty()) {
      file.open(cli.cfg.output);
      if (!file) throw kobdyn::Error("cannot open output file: " + cli.cfg.output);
      out = &file;
    }
    *out << "m";
    for (int i = 0; i < f.dim(); ++i) *out << ",re_z" << i << ",im_z" << i;
    *out << ",norm,k_from_start,k_step\n";
    for (const auto& row : rows) {
      if (row.contains("error")) {
        *out << row["m"].get<int>() << ",error," << row["error"].get<std::string>()
             << "\n";
        continue;
      }
      *out << row["m"].get<int>();
      for (const auto& coord : row["z"]) {
        *out << "," << fmt17(coord[0].get<double>()) << ","
             << fmt17(coord[1].get<double>());
      }
      *out << "," << fmt17(row["norm"].get<double>()) << ","
           << fmt17(row["k_from_start"].get<double>()) << ","
           << (row.contains("k_step") ? fmt17(row["k_step"].get<double>()) : "");
      *out << "\n";
    }
  } else {
    write_report(rep, cli.cfg);
  }
  return truncated ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kobdyn: iteration invariants of holomorphic self-maps of the "
               "unit ball and its half-space realization"};
  app.require_subcommand(1);

  Cli cli;
  try {
    cli.cfg = kobdyn::default_run_config();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  auto add_common = [&cli](CLI::App* sub, bool with_map = true) {
    if (with_map) sub->add_option("--map", cli.map_file, "map/flow spec JSON file");
    sub->add_option("--tol", cli.cfg.tol, "convergence tolerance");
    sub->add_option("--max-iter", cli.cfg.max_iter, "iteration budget");
    sub->add_option("--cap", cli.cfg.cap, "orbit/sample-sequence cap");
    sub->add_option("--samples", cli.cfg.samples, "sample count");
    sub->add_option("--seed", cli.cfg.seed, "RNG seed");
    sub->add_option("--eig-tol", cli.cfg.eig_tol, "eigenvalue rank cutoff");
    sub->add_option("--format", cli.cfg.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", cli.cfg.output, "output path (default stdout)");
  };

  CLI::App* classify = app.add_subcommand("classify", "Denjoy-Wolff classification");
  add_common(classify);
  CLI::App* divrate =
      app.add_subcommand("divergence-rate", "orbit divergence rate with bracket");
  add_common(divrate);
  CLI::App* step = app.add_subcommand("step", "hyperbolic m-step limit");
  add_common(step);
  step->add_option("--m", cli.step_m, "gap m")->check(CLI::PositiveNumber);
  CLI::App* model =
      app.add_subcommand("model", "canonical semi-model of an LFT normal form");
  add_common(model);
  CLI::App* valiron = app.add_subcommand("valiron", "solve Theta o f = Theta/lambda");
  add_common(valiron);
  CLI::App* abel = app.add_subcommand("abel", "solve theta o f = theta + 1");
  add_common(abel);
  CLI::App* semigroup =
      app.add_subcommand("semigroup", "flow rate, linearity, classification");
  add_common(semigroup);
  CLI::App* verify = app.add_subcommand("verify", "run a named invariant suite");
  verify->add_option("suite", cli.suite, "convexity|julia|fekete|steplimit|"
                                         "conjugation|semigroup-linearity|lindelof")
      ->required();
  add_common(verify, /*with_map=*/false);
  CLI::App* orbit = app.add_subcommand("orbit", "emit an orbit table");
  add_common(orbit);
  orbit->add_option("--point", cli.point_json, "start point as JSON [re,im] pairs");
  orbit->add_option("--steps", cli.steps, "number of iterations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmd_classify(cli);
    if (*divrate) return cmd_divergence_rate(cli);
    if (*step) return cmd_step(cli);
    if (*model) return cmd_model(cli);
    if (*valiron) return cmd_valiron(cli, /*abel=*/false);
    if (*abel) return cmd_valiron(cli, /*abel=*/true);
    if (*semigroup) return cmd_semigroup(cli);
    if (*verify) return cmd_verify(cli);
    if (*orbit) return cmd_orbit(cli);
  } catch (const kobdyn::Inconclusive& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const kobdyn::NotConvergent& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return 2;
  } catch (const kobdyn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
