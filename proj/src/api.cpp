#include "bcsp/api.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bcsp/gaussian.hpp"

namespace bcsp::api {

namespace {

BiasMode parse_mode(const std::string& m) {
  if (m == "at-most" || m == "atmost" || m == "le") return BiasMode::AtMost;
  if (m == "exactly" || m == "exact" || m == "eq") return BiasMode::Exactly;
  throw StructuralError("unknown bias mode '" + m + "'");
}

double resolve_bias(const ParsedInstance& pi, std::optional<double> bias) {
  if (bias) return *bias;
  if (pi.bias) return *pi.bias;
  throw StructuralError("field 'bias': required (flag or instance field)");
}

json labeling_json(const Labeling& s) { return s.to_string(); }

SolveResult exact_result(const BruteForceResult& b, double mu) {
  SolveResult r;
  r.labeling = b.labeling;
  r.value = b.value;
  r.relative_weight = b.relative_weight;
  r.bias = mu;
  r.weight_limit = mu;
  r.slack_used = mu > 0 ? b.relative_weight / mu - 1.0 : 0.0;
  return r;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw StructuralError("file '" + path + "' is not valid JSON: " + e.what());
  }
}

template <class T>
T param(const json& j, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw StructuralError("field '" + key + "': " + e.what());
  }
}

json cert_json(const ReductionCertificate& c) {
  return json{{"inequality", c.inequality},   {"source_value", c.source_value}, {"target_value", c.target_value},
              {"decoded", labeling_json(c.decoded)}, {"holds", c.holds},   {"coordinate_order", c.coordinate_order}};
}

}  // namespace

json analyze_predicate(const Predicate& p) {
  auto prof = classify_bias_dependence(p);
  json j = to_json(prof, p.arity());
  json acc = json::array();
  for (auto b : p.accepting()) acc.push_back(p.to_string(b));
  j["arity"] = p.arity();
  j["accepting"] = acc;
  return j;
}

json brute_force(const json& instance, double mu, const std::string& mode, const std::string& problem, int threads) {
  auto pi = parse_instance(instance, true);
  BruteForceOptions opt;
  opt.threads = threads;
  BruteForceResult r;
  if (problem == "csp")
    r = brute_force_opt(pi.csp(mu), mu, parse_mode(mode), opt);
  else
    r = brute_force_opt(pi.graph, mu, parse_mode(mode), opt);
  return json{{"labeling", labeling_json(r.labeling)}, {"value", r.value}, {"relative_weight", r.relative_weight}};
}

json reduce(const std::string& kind, const json& instance, const json& params, std::uint64_t seed) {
  json out;
  out["kind"] = kind;
  if (kind == "pred-to-dksh") {
    auto pi = parse_instance(instance);
    auto csp = pi.csp(param<double>(params, "bias", pi.bias.value_or(0.5)));
    out["instance"] = to_json(predicate_to_dksh(csp));
    return out;
  }
  auto pi = parse_instance(instance, true);
  const Hypergraph& h = pi.graph;
  if (kind == "dksh-to-pred") {
    if (!params.contains("predicate")) throw StructuralError("field 'predicate': required for dksh-to-pred");
    Predicate psi = parse_predicate_json(params.at("predicate"));
    double mu = param<double>(params, "bias", pi.bias.value_or(0.5));
    std::uint32_t beta;
    if (params.contains("beta")) {
      beta = psi.parse_pattern(param<std::string>(params, "beta", ""));
    } else {
      auto mins = minimal_elements(psi);
      std::optional<std::uint32_t> pick;
      for (auto b : mins)
        if (hamming_weight(b) == h.arity) {
          pick = b;
          break;
        }
      if (!pick) throw DomainError("no minimal element of weight equal to the hypergraph arity");
      beta = *pick;
    }
    auto red = dksh_to_predicate(h, psi, beta, mu);
    out["instance"] = to_json(red.instance);
    out["source_bias"] = red.source_bias;
    out["target_bias"] = red.target_bias;
    out["beta"] = psi.to_string(beta);
    out["coordinate_order"] = red.coordinate_order;
    if (param<bool>(params, "certify", false)) {
      auto best = brute_force_opt(red.instance, red.target_bias, BiasMode::AtMost);
      out["certificate"] = cert_json(red.certify(h, best.labeling));
    }
    return out;
  }
  if (kind == "heavy-split") {
    double mu = param<double>(params, "bias", pi.bias.value_or(0.5));
    double eta = param<double>(params, "eta", default_eta(mu));
    auto T = heavy_set(h, mu, param<double>(params, "heavy_exponent", 10.0));
    std::vector<std::uint8_t> sigma_t(T.size(), 0);
    if (params.contains("sigma_t")) {
      auto s = param<std::string>(params, "sigma_t", "");
      if (s.size() != T.size()) throw StructuralError("field 'sigma_t': length must equal the heavy set size");
      for (std::size_t k = 0; k < s.size(); ++k) sigma_t[k] = s[k] == '1';
    }
    auto sp = heavy_vertex_split(h, mu, eta, T, sigma_t);
    out["heavy"] = sp.heavy;
    out["light"] = sp.light;
    out["instance"] = to_json(sp.sub);
    out["delta"] = sp.delta;
    out["labeled_weight"] = sp.labeled_weight;
    out["light_weight"] = sp.light_weight;
    out["surviving_mass"] = sp.surviving_mass;
    return out;
  }
  if (kind == "cloud") {
    auto ce = cloud_expansion(h, param<std::int64_t>(params, "cap", kCloudCap));
    out["instance"] = to_json(ce.expanded);
    out["cloud_size"] = ce.cloud_size;
    out["N"] = ce.N;
    return out;
  }
  if (kind == "clique") {
    double mu = param<double>(params, "bias", pi.bias.value_or(0.5));
    out["instance"] = to_json(clique_expansion(h, mu, param<bool>(params, "dedupe", false)));
    return out;
  }
  if (kind == "dks-to-2csp") {
    double mu = param<double>(params, "bias", pi.bias.value_or(0.5));
    auto red = dks_to_max2csp(h, mu, seed);
    json cons = json::array();
    for (const auto& c : red.instance.constraints) {
      json pairs = json::array();
      for (const auto& [a, b] : c.pairs) pairs.push_back({a, b});
      cons.push_back(json{{"i", c.i}, {"j", c.j}, {"pairs", pairs}, {"weights", c.weights}});
    }
    out["n_vars"] = red.instance.n_vars;
    out["label_size"] = red.instance.label_size;
    out["constraints"] = cons;
    out["blocks"] = red.partition.blocks;
    return out;
  }
  if (kind == "rescale") {
    if (!params.contains("from") || !params.contains("to"))
      throw StructuralError("field 'from'/'to': required for rescale");
    auto dir_s = param<std::string>(params, "direction", "pad");
    RescaleDirection dir;
    if (dir_s == "pad")
      dir = RescaleDirection::Pad;
    else if (dir_s == "subsample")
      dir = RescaleDirection::Subsample;
    else
      throw StructuralError("field 'direction': must be pad or subsample");
    auto b = bias_rescale(h, param<double>(params, "from", 0), param<double>(params, "to", 0), dir);
    out["from_size"] = b.from_size;
    out["to_size"] = b.to_size;
    out["direction"] = dir_s;
    if (params.contains("labeling")) {
      auto s = Labeling::from_string(param<std::string>(params, "labeling", ""));
      out["labeling"] = labeling_json(b.apply(s, seed));
    }
    return out;
  }
  throw StructuralError("unknown reduction kind '" + kind + "'");
}

json config_to_json(const SolverConfig& c) {
  return json{{"seed", c.seed},
              {"repetitions", c.repetitions},
              {"max_repetitions", c.max_repetitions},
              {"eta", c.eta},
              {"backend", to_string(c.dks_backend)},
              {"heavy_exponent", c.heavy_exponent},
              {"bounded_exponent", c.bounded_exponent},
              {"size_band", c.size_band},
              {"rounding_alpha", c.rounding_alpha},
              {"cleanup_epsilon", c.cleanup_epsilon},
              {"heavy_cap", c.heavy_cap},
              {"cloud_budget", c.cloud_budget},
              {"brute_force_cap", c.brute_force_cap},
              {"partition_trials", c.partition_trials},
              {"max2csp_exact_cap", c.max2csp_exact_cap}};
}

SolverConfig config_from_json(const json& j, SolverConfig c) {
  c.seed = param(j, "seed", c.seed);
  c.repetitions = param(j, "repetitions", c.repetitions);
  c.max_repetitions = param(j, "max_repetitions", c.max_repetitions);
  c.eta = param(j, "eta", c.eta);
  if (j.is_object() && j.contains("backend")) c.dks_backend = parse_dks_backend(param<std::string>(j, "backend", ""));
  c.heavy_exponent = param(j, "heavy_exponent", c.heavy_exponent);
  c.bounded_exponent = param(j, "bounded_exponent", c.bounded_exponent);
  c.size_band = param(j, "size_band", c.size_band);
  c.rounding_alpha = param(j, "rounding_alpha", c.rounding_alpha);
  c.cleanup_epsilon = param(j, "cleanup_epsilon", c.cleanup_epsilon);
  c.heavy_cap = param(j, "heavy_cap", c.heavy_cap);
  c.cloud_budget = param(j, "cloud_budget", c.cloud_budget);
  c.brute_force_cap = param(j, "brute_force_cap", c.brute_force_cap);
  c.partition_trials = param(j, "partition_trials", c.partition_trials);
  c.max2csp_exact_cap = param(j, "max2csp_exact_cap", c.max2csp_exact_cap);
  c.threads = param(j, "threads", c.threads);
  return c;
}

json result_to_json(const SolveResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) {
    json m = json::object();
    for (const auto& [k, v] : t.metrics) m[k] = v;
    trace.push_back(json{{"stage", t.stage}, {"value", t.value}, {"relative_weight", t.relative_weight}, {"metrics", m}});
  }
  return json{{"labeling", labeling_json(r.labeling)},
              {"value", r.value},
              {"relative_weight", r.relative_weight},
              {"bias", r.bias},
              {"eta", r.eta},
              {"weight_limit", r.weight_limit},
              {"slack_used", r.slack_used},
              {"trace", trace}};
}

json solve(const std::string& problem, const json& instance, std::optional<double> bias, const SolverConfig& cfg,
           const std::string& algorithm) {
  auto pi = parse_instance(instance, true);
  double mu = resolve_bias(pi, bias);
  SolveResult r;
  std::string used = algorithm;
  if (problem == "dks") {
    used = "dks-" + to_string(cfg.dks_backend);
    r = solve_dks(pi.graph, mu, cfg);
  } else if (problem == "dksh") {
    if (algorithm == "auto" || algorithm == "weighted") {
      used = "weighted";
      r = solve_dksh_weighted(pi.graph, mu, cfg);
    } else if (algorithm == "exact") {
      BruteForceOptions bo{cfg.brute_force_cap, cfg.threads};
      r = exact_result(brute_force_opt(pi.graph, mu, BiasMode::AtMost, bo), mu);
    } else if (algorithm == "bounded") {
      r = solve_dksh_bounded(pi.graph, mu, cfg);
    } else if (algorithm == "unweighted") {
      r = solve_dksh_unweighted(pi.graph, mu, cfg);
    } else {
      throw StructuralError("unknown dksh algorithm '" + algorithm + "'");
    }
  } else if (problem == "csp") {
    auto csp = pi.csp(mu);
    if (algorithm == "auto") {
      used = csp.has_negations() || mu > 0.5 ? "negations" : "general";
      r = used == "negations" ? solve_with_negations(csp, mu, cfg) : solve_general(csp, mu, cfg);
    } else if (algorithm == "exact") {
      BruteForceOptions bo{cfg.brute_force_cap, cfg.threads};
      r = exact_result(brute_force_opt(csp, mu, BiasMode::AtMost, bo), mu);
    } else if (algorithm == "single-string") {
      r = solve_single_string(csp, mu, cfg);
    } else if (algorithm == "general") {
      r = solve_general(csp, mu, cfg);
    } else if (algorithm == "negations") {
      r = solve_with_negations(csp, mu, cfg);
    } else {
      throw StructuralError("unknown csp algorithm '" + algorithm + "'");
    }
  } else {
    throw StructuralError("unknown problem '" + problem + "'");
  }
  json j = result_to_json(r);
  j["algorithm"] = used;
  return j;
}

json gadget_params_to_json(const GadgetParams& p) {
  return json{{"mu", p.mu},
              {"rho", p.rho},
              {"beta", p.beta},
              {"eta", p.eta},
              {"r", p.r},
              {"R", p.R},
              {"t", p.t},
              {"label_size", p.label_size},
              {"samples", p.samples},
              {"seed", p.seed},
              {"rho_formula", p.rho_formula},
              {"c_prime", p.c_prime},
              {"nu", p.nu},
              {"tau", p.tau},
              {"alpha", p.alpha},
              {"epsilon", p.epsilon},
              {"M", p.M}};
}

GadgetParams gadget_params_from_json(const json& j, GadgetParams p) {
  p.mu = param(j, "mu", p.mu);
  p.rho = param(j, "rho", p.rho);
  p.beta = param(j, "beta", p.beta);
  p.eta = param(j, "eta", p.eta);
  p.r = param(j, "r", p.r);
  p.R = param(j, "R", p.R);
  p.t = param(j, "t", p.t);
  p.label_size = param(j, "label_size", p.label_size);
  p.samples = param(j, "samples", p.samples);
  p.seed = param(j, "seed", p.seed);
  p.threads = param(j, "threads", p.threads);
  p.c_prime = param(j, "c_prime", p.c_prime);
  p.rho_formula = param<std::string>(j, "rho_formula", p.rho_formula);
  p.nu = param(j, "nu", p.nu);
  p.tau = param(j, "tau", p.tau);
  p.alpha = param(j, "alpha", p.alpha);
  p.epsilon = param(j, "epsilon", p.epsilon);
  p.M = param(j, "M", p.M);
  if (p.rho_formula == "default") {
    p.rho = default_rho(p.r, p.mu, p.c_prime);
  } else if (p.rho_formula != "input") {
    throw StructuralError("field 'rho_formula': must be input or default");
  }
  p.validate();
  return p;
}

json gadget(const std::string& test, const std::string& assignment, const json& params) {
  GadgetParams p = gadget_params_from_json(params);
  enum class Kind { Dictator, Constant, Table } kind;
  double constant = 0.0;
  json table;
  if (assignment == "dictator") {
    kind = Kind::Dictator;
  } else if (assignment.rfind("constant:", 0) == 0) {
    kind = Kind::Constant;
    try {
      constant = std::stod(assignment.substr(9));
    } catch (const std::exception&) {
      throw StructuralError("assignment: bad constant '" + assignment.substr(9) + "'");
    }
  } else if (assignment.rfind("table:", 0) == 0) {
    kind = Kind::Table;
    table = read_json_file(assignment.substr(6));
  } else {
    throw StructuralError("assignment: expected dictator, constant:v or table:file");
  }

  json out;
  out["test"] = test;
  out["assignment"] = assignment;
  json exact = nullptr, bound = nullptr;
  McEstimate est;

  if (test == "hypercube") {
    auto variant = parse_hypercube_variant(param<std::string>(params, "variant", "shared-theta"));
    CubeAssignment f;
    if (kind == Kind::Dictator) {
      f = CubeAssignment::dictator(param<std::size_t>(params, "coordinate", 0));
      if (f.coordinate >= static_cast<std::size_t>(p.R)) throw StructuralError("field 'coordinate': out of range");
    } else if (kind == Kind::Constant) {
      if (!(constant >= 0 && constant <= 1)) throw StructuralError("assignment: constant must lie in [0, 1]");
      f = CubeAssignment::constant_value(constant);
    } else {
      f.kind = CubeAssignment::Kind::Table;
      f.table = (table.is_object() ? table.at("table") : table).get<std::vector<double>>();
      if (p.R > 20 || f.table.size() != (std::size_t{1} << p.R))
        throw StructuralError("table: expected 2^R entries");
      for (double v : f.table)
        if (!(v >= 0 && v <= 1)) throw StructuralError("table: values must lie in [0, 1]");
    }
    est = mc_acceptance(
        [&](Rng& rng) {
          auto xs = sample_noisy_hypercube_edge(p, variant, rng);
          double a = 1.0;
          for (const auto& x : xs) a *= f(x);
          return a;
        },
        p.samples, p.seed, p.threads);
    if (p.r * p.R <= 20) exact = hypercube_acceptance_exact(p, variant, f);
    if (kind == Kind::Dictator) bound = hypercube_dictator_closed_form(p, variant);
    if (kind == Kind::Constant) bound = std::pow(constant, p.r);
    out["variant"] = to_string(variant);
  } else if (test == "sse") {
    SmallGraph g;
    std::string gk = param<std::string>(params, "graph", "two-cliques");
    std::size_t m = param<std::size_t>(params, "graph_size", 3);
    if (gk == "two-cliques")
      g = SmallGraph::two_cliques(m);
    else if (gk == "cycle")
      g = SmallGraph::cycle(m);
    else
      throw StructuralError("field 'graph': must be two-cliques or cycle");
    g.validate();
    std::vector<std::uint8_t> in_s(g.n, 0);
    if (params.contains("set")) {
      for (auto v : param<std::vector<std::uint32_t>>(params, "set", {})) {
        if (v >= g.n) throw StructuralError("field 'set': vertex out of range");
        in_s[v] = 1;
      }
    } else {
      for (std::size_t v = 0; v < g.n / 2; ++v) in_s[v] = 1;
    }
    if (kind == Kind::Table) throw DomainError("the SSE test supports dictator and constant assignments");
    if (kind == Kind::Constant && !(constant >= 0 && constant <= 1))
      throw StructuralError("assignment: constant must lie in [0, 1]");
    est = mc_acceptance(
        [&](Rng& rng) {
          auto d = sse_test_sample(g, p, rng);
          return kind == Kind::Dictator ? sse_dictator_acceptance(d, in_s) : std::pow(constant, p.r);
        },
        p.samples, p.seed, p.threads);
    if (kind == Kind::Dictator && 2 * p.r * p.R <= 20) exact = sse_dictator_exact(g, in_s, p);
    if (kind == Kind::Constant) exact = bound = std::pow(constant, p.r);
    out["graph"] = json{{"kind", gk}, {"n", g.n}};
  } else if (test == "ug") {
    std::vector<std::uint32_t> sigma;
    auto inst = UgInstance::planted_cycle(param<std::size_t>(params, "ug_n", 6), static_cast<std::size_t>(p.t),
                                          derive_seed(p.seed, 0x7567), &sigma);
    bool fold = param<bool>(params, "fold", true);
    const auto t = static_cast<std::size_t>(p.t), R = static_cast<std::size_t>(p.label_size);
    std::vector<LongCode> codes;
    if (kind == Kind::Dictator) {
      for (std::size_t v = 0; v < inst.n; ++v) codes.push_back(LongCode::dictator(t, R, sigma[v]));
      bound = ug_completeness_bound(p, 1.0 - inst.satisfied_fraction(sigma));
    } else if (kind == Kind::Constant) {
      double c = std::round(constant);
      if (c < 0 || c >= static_cast<double>(R)) throw StructuralError("assignment: constant must be a label in [0, R)");
      for (std::size_t v = 0; v < inst.n; ++v) {
        auto f = LongCode::dictator(t, R, 0);
        std::fill(f.table.begin(), f.table.end(), static_cast<std::uint32_t>(c));
        codes.push_back(std::move(f));
      }
    } else {
      auto tabs = (table.is_object() ? table.at("codes") : table).get<std::vector<std::vector<std::uint32_t>>>();
      if (tabs.size() != inst.n) throw StructuralError("table: need one code per UG vertex");
      for (auto& tb : tabs) {
        auto f = LongCode::dictator(t, R, 0);
        if (tb.size() != f.table.size()) throw StructuralError("table: code must have R^t entries");
        for (auto v : tb)
          if (v >= R) throw StructuralError("table: code values must lie in [0, R)");
        f.table = std::move(tb);
        codes.push_back(std::move(f));
      }
    }
    est = mc_acceptance(
        [&](Rng& rng) {
          auto d = ug_test_sample(inst, p, rng);
          return ug_accepts(d, codes, fold) ? 1.0 : 0.0;
        },
        p.samples, p.seed, p.threads);
    out["ug"] = json{{"n", inst.n}, {"arcs", inst.arcs.size()}, {"fold", fold}};
  } else {
    throw StructuralError("unknown gadget test '" + test + "'");
  }
  out["params"] = gadget_params_to_json(p);
  out["estimate"] = est.estimate;
  out["stderr"] = est.std_error;
  out["exact"] = exact;
  out["analytic_bound"] = bound;
  return out;
}

json gamma(double rho, const std::vector<double>& mus) {
  return json{{"rho", rho}, {"mus", mus}, {"probability", gaussian_stability(rho, mus)}};
}

}  // namespace bcsp::api
