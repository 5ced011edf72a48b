#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bcsp/api.hpp"
#include "bcsp/verify.hpp"

using bcsp::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  bool timing = false;
  std::string output;
};

json read_json_arg(const std::string& text_or_path) {
  if (text_or_path.empty()) return json::object();
  std::string text = text_or_path;
  std::ifstream in(text_or_path);
  if (in) {
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw bcsp::StructuralError("argument '" + text_or_path + "' is neither a JSON file nor JSON text: " + e.what());
  }
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bcsp::StructuralError("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw bcsp::StructuralError("instance file '" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw bcsp::StructuralError("field 'mus': bad number '" + tok + "'");
    }
  }
  return out;
}

void emit(const json& report, const Globals& g) {
  std::string text = bcsp::dump_json(report) + "\n";
  if (g.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(g.output);
    if (!out) throw bcsp::StructuralError("cannot write output file '" + g.output + "'");
    out << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("bcsp");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("BCSP_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));

  CLI::App app{"Biased CSP and densest subhypergraph toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--timing", g.timing, "Include wall time in the report");
  app.add_option("-o,--output", g.output, "Write the report to a file");

  // analyze-predicate
  auto* an = app.add_subcommand("analyze-predicate", "Minimal elements and bias dependence of a predicate");
  std::string table_name, pred_json;
  auto* an_table = an->add_option("--table", table_name, "Named predicate (AND3, NEQ, EXACT1:3, BETA:101, ...)");
  an->add_option("--predicate", pred_json, "Predicate JSON text or file")->excludes(an_table);

  // reduce
  auto* rd = app.add_subcommand("reduce", "Apply a reduction to an instance");
  std::string rd_kind, rd_input, rd_params;
  std::optional<double> rd_bias;
  rd->add_option("--kind", rd_kind, "Reduction kind")
      ->required()
      ->check(CLI::IsMember({"dksh-to-pred", "pred-to-dksh", "heavy-split", "cloud", "clique", "dks-to-2csp", "rescale"}));
  rd->add_option("--input", rd_input, "Instance JSON file")->required();
  rd->add_option("--params", rd_params, "Reduction parameters (JSON text or file)");
  rd->add_option("--bias", rd_bias, "Bias mu");

  // solve
  auto* sv = app.add_subcommand("solve", "Run an approximation algorithm");
  std::string sv_problem, sv_input, sv_backend = "greedy-peel", sv_algorithm = "auto", sv_config;
  std::optional<double> sv_bias;
  double sv_eta = 0.0;
  int sv_reps = 0;
  sv->add_option("--problem", sv_problem, "Problem")->required()->check(CLI::IsMember({"dks", "dksh", "csp"}));
  sv->add_option("--input", sv_input, "Instance JSON file")->required();
  sv->add_option("--bias", sv_bias, "Bias mu (default: instance field)");
  sv->add_option("--eta", sv_eta, "Weight slack eta (0: default)");
  sv->add_option("--backend", sv_backend, "DkS backend")->check(CLI::IsMember({"exact", "greedy-peel", "via-2csp"}));
  sv->add_option("--algorithm", sv_algorithm, "Algorithm")
      ->check(CLI::IsMember({"auto", "exact", "weighted", "bounded", "unweighted", "single-string", "general", "negations"}));
  sv->add_option("--reps", sv_reps, "Repetitions (0: default)");
  sv->add_option("--config", sv_config, "Solver config (JSON text or file)");

  // gadget
  auto* gd = app.add_subcommand("gadget", "Dictatorship test simulation");
  std::string gd_test, gd_assignment = "dictator", gd_params;
  gd->add_option("--test", gd_test, "Test")->check(CLI::IsMember({"hypercube", "sse", "ug"}));
  gd->add_option("--assignment", gd_assignment, "dictator, constant:v or table:file");
  gd->add_option("--params", gd_params, "Gadget parameters (JSON text or file)");
  auto* gm = gd->add_subcommand("gamma", "Iterated Gaussian stability");
  double gm_rho = 0.0;
  std::string gm_mus;
  gm->add_option("--rho", gm_rho, "Correlation")->required();
  gm->add_option("--mus", gm_mus, "Comma-separated biases")->required();

  // verify
  auto* vf = app.add_subcommand("verify", "Run a named property suite");
  std::string vf_claim;
  bcsp::SuiteOptions vo;
  std::vector<std::string> claims = bcsp::suite_names();
  claims.push_back("all");
  vf->add_option("--claim", vf_claim, "Suite name or all")->required()->check(CLI::IsMember(claims));
  vf->add_option("--n-max", vo.n_max, "Largest instance size (0: suite default)");
  vf->add_option("--trials", vo.trials, "Instance count (0: suite default)");
  vf->add_option("--samples", vo.samples, "Monte Carlo samples (0: suite default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto start = std::chrono::steady_clock::now();
  json report;
  int exit_code = 0;
  try {
    if (an->parsed()) {
      report["command"] = "analyze-predicate";
      bcsp::Predicate p;
      if (!table_name.empty()) {
        p = bcsp::parse_named_predicate(table_name);
        report["config"] = json{{"table", table_name}};
      } else if (!pred_json.empty()) {
        auto j = read_json_arg(pred_json);
        p = bcsp::parse_predicate_json(j);
        report["config"] = json{{"predicate", j}};
      } else {
        throw bcsp::StructuralError("analyze-predicate needs --table or --predicate");
      }
      report["seed"] = g.seed;
      report["result"] = bcsp::api::analyze_predicate(p);
    } else if (rd->parsed()) {
      json params = read_json_arg(rd_params);
      if (rd_bias) params["bias"] = *rd_bias;
      report["command"] = "reduce";
      report["config"] = json{{"kind", rd_kind}, {"input", rd_input}, {"params", params}};
      report["seed"] = g.seed;
      spdlog::info("reduce {} on {}", rd_kind, rd_input);
      report["result"] = bcsp::api::reduce(rd_kind, load_file(rd_input), params, g.seed);
    } else if (sv->parsed()) {
      bcsp::SolverConfig cfg;
      if (!sv_config.empty()) cfg = bcsp::api::config_from_json(read_json_arg(sv_config));
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      if (sv->count("--eta")) cfg.eta = sv_eta;
      if (sv->count("--reps")) cfg.repetitions = sv_reps;
      if (sv->count("--backend") || sv_config.empty()) cfg.dks_backend = bcsp::parse_dks_backend(sv_backend);
      json inst = load_file(sv_input);
      report["command"] = "solve";
      json conf = bcsp::api::config_to_json(cfg);
      conf["problem"] = sv_problem;
      conf["algorithm"] = sv_algorithm;
      conf["input"] = sv_input;
      conf["bias"] = sv_bias ? json(*sv_bias) : json(nullptr);
      report["config"] = conf;
      report["seed"] = g.seed;
      spdlog::info("solve {} on {}", sv_problem, sv_input);
      report["result"] = bcsp::api::solve(sv_problem, inst, sv_bias, cfg, sv_algorithm);
    } else if (gm->parsed()) {
      auto mus = parse_list(gm_mus);
      report["command"] = "gadget gamma";
      report["config"] = json{{"rho", gm_rho}, {"mus", mus}};
      report["seed"] = g.seed;
      report["result"] = bcsp::api::gamma(gm_rho, mus);
    } else if (gd->parsed()) {
      if (gd_test.empty()) throw bcsp::StructuralError("gadget needs --test or the gamma subcommand");
      json params = read_json_arg(gd_params);
      if (!params.is_object()) throw bcsp::StructuralError("field 'params': must be a JSON object");
      params["seed"] = g.seed;
      params["threads"] = g.threads;
      report["command"] = "gadget";
      json echo = params;
      echo.erase("threads");
      report["config"] = json{{"test", gd_test}, {"assignment", gd_assignment}, {"params", echo}};
      report["seed"] = g.seed;
      report["result"] = bcsp::api::gadget(gd_test, gd_assignment, params);
    } else if (vf->parsed()) {
      vo.seed = g.seed;
      vo.threads = g.threads;
      report["command"] = "verify";
      report["config"] = json{{"claim", vf_claim}, {"n_max", vo.n_max}, {"trials", vo.trials}, {"samples", vo.samples}};
      report["seed"] = g.seed;
      std::vector<std::string> run = vf_claim == "all" ? bcsp::suite_names() : std::vector<std::string>{vf_claim};
      json suites = json::array();
      std::size_t passed = 0, failed = 0;
      for (const auto& name : run) {
        spdlog::info("verify {}", name);
        auto r = bcsp::run_suite(name, vo);
        passed += r.passed;
        failed += r.failed;
        suites.push_back(bcsp::to_json(r));
      }
      report["result"] = json{{"suites", suites}};
      report["passed"] = passed;
      report["failed"] = failed;
      if (failed > 0) exit_code = 1;
    }
  } catch (const bcsp::StructuralError& e) {
    spdlog::error("{}", e.what());
    std::cout << bcsp::dump_json(json{{"error", {{"type", "StructuralError"}, {"message", e.what()}}}}) << "\n";
    return 2;
  } catch (const bcsp::DomainError& e) {
    std::string type = dynamic_cast<const bcsp::CapExceeded*>(&e)       ? "CapExceeded"
                       : dynamic_cast<const bcsp::DegenerateError*>(&e) ? "DegenerateError"
                                                                         : "DomainError";
    spdlog::error("{}", e.what());
    std::cout << bcsp::dump_json(json{{"error", {{"type", type}, {"message", e.what()}}}}) << "\n";
    return 1;
  } catch (const json::exception& e) {
    spdlog::error("{}", e.what());
    std::cout << bcsp::dump_json(json{{"error", {{"type", "StructuralError"}, {"message", e.what()}}}}) << "\n";
    return 2;
  }
  if (g.timing)
    report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    emit(report, g);
  } catch (const bcsp::StructuralError& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return exit_code;
}
