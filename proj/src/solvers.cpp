#include "bcsp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace bcsp {

namespace {

enum Tag : std::uint64_t {
  kTagRound = 11,
  kTagDecode = 12,
  kTagUnweighted = 13,
  kTagVia2Csp = 14,
  kTagWeighted = 15,
  kTagSingleDksh = 16,
  kTagSubsample = 17,
  kTagGeneral = 18,
  kTagNegation = 19,
};

SolveResult make_result(Labeling sigma, double value, double rel, double mu, double eta) {
  SolveResult r;
  r.labeling = std::move(sigma);
  r.value = value;
  r.relative_weight = rel;
  r.bias = mu;
  r.eta = eta;
  r.weight_limit = mu * (1.0 + eta);
  r.slack_used = mu > 0 ? rel / mu - 1.0 : 0.0;
  return r;
}

int max_edge_length(const Hypergraph& h) {
  int m = 0;
  for (const auto& e : h.edges) m = std::max(m, static_cast<int>(e.size()));
  return m;
}

// First maximizer by index over candidates evaluated in parallel.
struct Candidate {
  bool valid = false;
  double value = 0.0;
  Labeling labeling;
};

std::optional<std::size_t> first_max(const std::vector<Candidate>& c) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].valid && (!best || c[i].value > c[*best].value)) best = i;
  return best;
}

Labeling adjust_size(Labeling s, std::size_t k) {
  std::size_t c = s.count();
  for (std::size_t i = s.size(); i > 0 && c > k; --i)
    if (s.bits[i - 1]) {
      s.bits[i - 1] = 0;
      --c;
    }
  return rescale_pad(s, k);
}

// Drops one-vertices in descending index until the relative weight fits.
Labeling trim_to_weight(Labeling s, const std::vector<double>& w, double cap) {
  double rel = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.bits[i]) rel += w[i];
  for (std::size_t i = s.size(); i > 0 && rel > cap + kTol; --i)
    if (s.bits[i - 1]) {
      s.bits[i - 1] = 0;
      rel -= w[i - 1];
    }
  return s;
}

double weight_of(const Labeling& s, const std::vector<double>& w) {
  double rel = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.bits[i]) rel += w[i];
  return rel;
}

// Greedy cover for instances whose edges have at most one vertex.
Labeling greedy_cover_capped(const Hypergraph& h, const std::vector<double>& w, double cap) {
  std::vector<double> gain(h.n, 0.0);
  for (std::size_t i = 0; i < h.edges.size(); ++i)
    if (h.edges[i].size() >= 1) gain[h.edges[i][0]] += h.edge_weights[i];
  std::vector<std::uint32_t> order(h.n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return gain[a] > gain[b]; });
  Labeling s(h.n);
  double used = 0.0;
  for (auto v : order) {
    if (!(gain[v] > 0)) break;
    if (used + w[v] <= cap + kTol) {
      s.bits[v] = 1;
      used += w[v];
    }
  }
  return s;
}

Labeling unweighted_core(const Hypergraph& h, double mu, const SolverConfig& cfg, std::uint64_t seed,
                         std::vector<TraceEntry>* trace) {
  const std::size_t n = h.n;
  std::size_t k = static_cast<std::size_t>(std::clamp<long long>(std::llround(mu * static_cast<double>(n)), 0,
                                                                  static_cast<long long>(n)));
  std::vector<double> uw(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  if (h.arity < 2 || max_edge_length(h) < 2) {
    Labeling s = greedy_cover_capped(h, uw, static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(n, 1)));
    return rescale_pad(s, k);
  }
  Hypergraph g = clique_expansion(h, mu, true);
  SolverConfig dcfg = cfg;
  dcfg.seed = derive_seed(seed, kTagUnweighted);
  SolveResult dks = solve_dks_k(g, k, dcfg);
  const Labeling& S = dks.labeling;
  const int r = h.arity;
  double alpha = cfg.rounding_alpha > 0 ? cfg.rounding_alpha : 2.0 / static_cast<double>(r);
  int reps = resolve_repetitions(cfg, mu, r);
  double target = mu * static_cast<double>(n);
  double lo = target * (1.0 - cfg.size_band) - kTol, hi = target * (1.0 + cfg.size_band) + kTol;

  std::vector<Candidate> cands(static_cast<std::size_t>(reps));
  std::vector<double> raw(static_cast<std::size_t>(reps), 0.0);
  parallel_for(cands.size(), cfg.threads, [&](std::size_t j) {
    Rng rng(derive_seed(seed, kTagRound, j));
    Labeling x = round_dks_set(S, alpha, mu, rng);
    raw[j] = induced_weight(x, h);
    double c = static_cast<double>(x.count());
    if (c < lo || c > hi) return;
    Labeling y = adjust_size(std::move(x), k);
    cands[j].valid = true;
    cands[j].value = induced_weight(y, h);
    cands[j].labeling = std::move(y);
  });
  auto best = first_max(cands);
  Labeling out = best ? cands[*best].labeling : adjust_size(S, k);
  if (trace) {
    TraceEntry t;
    t.stage = "dks";
    t.value = dks.value;
    t.relative_weight = static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(n, 1));
    t.metrics["graph_edges"] = static_cast<double>(g.edges.size());
    trace->push_back(t);
    TraceEntry u;
    u.stage = "rounding";
    u.value = value_dksh(out, h);
    u.relative_weight = relative_weight(out, h);
    double te = h.total_edge_weight();
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= static_cast<double>(std::max(reps, 1));
    u.metrics["alpha"] = alpha;
    u.metrics["repetitions"] = reps;
    u.metrics["in_band"] = static_cast<double>(std::count_if(cands.begin(), cands.end(), [](auto& c) { return c.valid; }));
    u.metrics["expected_induced_value"] = te > 0 ? mean / te : 0.0;
    trace->push_back(u);
  }
  return out;
}

Labeling bounded_core(const Hypergraph& h, double mu, double eta, double cap, const SolverConfig& cfg,
                      std::uint64_t seed, std::vector<TraceEntry>* trace) {
  const std::size_t n = h.n;
  auto w = h.normalized_weights();
  Labeling out(n);
  if (cap >= 1.0 - kTol) {
    std::fill(out.bits.begin(), out.bits.end(), 1);
    return out;
  }
  // contract zero-weight vertices (labeled 1)
  std::vector<std::uint32_t> local(n, 0), keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0) {
      local[i] = static_cast<std::uint32_t>(keep.size());
      keep.push_back(static_cast<std::uint32_t>(i));
    } else {
      out.bits[i] = 1;
    }
  }
  if (keep.empty()) return out;
  Hypergraph h2;
  h2.n = keep.size();
  h2.arity = h.arity;
  h2.allow_empty_edges = true;
  for (auto v : keep) h2.vertex_weights.push_back(w[v]);
  std::map<Edge, std::size_t> index;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    Edge t;
    for (auto v : h.edges[i])
      if (w[v] > 0) t.push_back(local[v]);
    auto it = index.find(t);
    if (it != index.end()) {
      h2.edge_weights[it->second] += h.edge_weights[i];
    } else {
      index.emplace(t, h2.edges.size());
      h2.edges.push_back(std::move(t));
      h2.edge_weights.push_back(h.edge_weights[i]);
    }
  }
  auto w2 = h2.normalized_weights();
  Labeling pi(h2.n);
  if (h2.edges.empty() || max_edge_length(h2) == 0) {
    // nothing to gain
  } else if (max_edge_length(h2) < 2) {
    pi = greedy_cover_capped(h2, w2, cap);
  } else {
    std::int64_t N = static_cast<std::int64_t>(cfg.cloud_budget);
    std::vector<std::int64_t> sizes;
    try {
      N = minimal_cloud_denominator(w2, static_cast<std::int64_t>(cfg.cloud_budget));
      for (double x : w2) sizes.push_back(std::llround(x * static_cast<double>(N)));
    } catch (const CapExceeded&) {
      for (double x : w2) sizes.push_back(std::max<std::int64_t>(1, std::llround(x * static_cast<double>(N))));
    }
    std::optional<CloudExpansion> ce;
    while (!ce) {
      try {
        ce = cloud_expansion_with_sizes(h2, sizes, N);
      } catch (const CapExceeded&) {
        if (N <= 1) throw;
        N /= 2;
        for (std::size_t i = 0; i < sizes.size(); ++i)
          sizes[i] = std::max<std::int64_t>(1, std::llround(w2[i] * static_cast<double>(N)));
      }
    }
    Labeling expanded = unweighted_core(ce->expanded, mu, cfg, derive_seed(seed, kTagUnweighted), trace);
    int reps = resolve_repetitions(cfg, mu, std::max(h2.arity, 1));
    std::vector<Candidate> cands(static_cast<std::size_t>(reps));
    std::vector<std::uint8_t> in_band(cands.size(), 0);
    parallel_for(cands.size(), cfg.threads, [&](std::size_t j) {
      Rng rng(derive_seed(seed, kTagDecode, j));
      Labeling s = ce->decode(expanded, rng);
      double rel = weight_of(s, w2);
      in_band[j] = std::fabs(rel - mu) <= mu * eta + kTol;
      if (rel > cap + kTol) return;
      cands[j].valid = true;
      cands[j].value = induced_weight(s, h2);
      cands[j].labeling = std::move(s);
    });
    auto best = first_max(cands);
    if (best) {
      pi = cands[*best].labeling;
    } else {
      Rng rng(derive_seed(seed, kTagDecode, 0));
      pi = trim_to_weight(ce->decode(expanded, rng), w2, cap);
    }
    if (trace) {
      TraceEntry t;
      t.stage = "cloud-decode";
      t.value = value_dksh(pi, h2);
      t.relative_weight = weight_of(pi, w2);
      t.metrics["cloud_vertices"] = static_cast<double>(ce->expanded.n);
      t.metrics["N"] = static_cast<double>(ce->N);
      t.metrics["expanded_value"] = value_dksh(expanded, ce->expanded);
      t.metrics["in_band_fraction"] =
          static_cast<double>(std::count(in_band.begin(), in_band.end(), 1)) / static_cast<double>(std::max(reps, 1));
      trace->push_back(t);
    }
  }
  for (std::size_t k = 0; k < keep.size(); ++k) out.bits[keep[k]] = pi.bits[k];
  return out;
}

}  // namespace

std::string to_string(DksBackend b) {
  switch (b) {
    case DksBackend::Exact:
      return "exact";
    case DksBackend::GreedyPeel:
      return "greedy-peel";
    case DksBackend::Via2Csp:
      return "via-2csp";
  }
  return "unknown";
}

DksBackend parse_dks_backend(const std::string& s) {
  if (s == "exact") return DksBackend::Exact;
  if (s == "greedy-peel" || s == "greedy") return DksBackend::GreedyPeel;
  if (s == "via-2csp") return DksBackend::Via2Csp;
  throw StructuralError("unknown DkS backend '" + s + "'");
}

double default_eta(double mu) { return mu * mu < 0.5 ? 0.5 : (1.0 + mu * mu) / 2.0; }

double resolve_eta(const SolverConfig& cfg, double mu) {
  if (cfg.eta <= 0) return default_eta(mu);
  if (!(cfg.eta > mu * mu && cfg.eta < 1.0))
    throw DomainError("eta must lie in (mu^2, 1); got " + std::to_string(cfg.eta));
  return cfg.eta;
}

int resolve_repetitions(const SolverConfig& cfg, double mu, int arity) {
  if (cfg.repetitions > 0) return cfg.repetitions;
  if (!(mu > 0)) return 1;
  double r = std::ceil(std::pow(1.0 / mu, std::max(arity, 1)) - 1e-9);
  if (!(r < static_cast<double>(cfg.max_repetitions))) return std::max(cfg.max_repetitions, 1);
  return std::max(1, static_cast<int>(r));
}

Labeling subsample_half(const Labeling& sigma, Rng& rng) {
  Labeling out(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma.bits[i]) out.bits[i] = rng.bernoulli(0.5) ? 1 : 0;
  return out;
}

Labeling subsample_half(const Labeling& sigma, std::uint64_t seed) {
  Rng rng(seed);
  return subsample_half(sigma, rng);
}

Labeling greedy_dksh1(const Hypergraph& h, std::size_t k) {
  if (h.arity > 1) throw DomainError("greedy cover needs arity 1");
  if (k > h.n) throw DomainError("k exceeds the number of vertices");
  std::vector<double> gain(h.n, 0.0);
  for (std::size_t i = 0; i < h.edges.size(); ++i)
    if (!h.edges[i].empty()) gain[h.edges[i][0]] += h.edge_weights[i];
  Labeling s(h.n);
  for (std::size_t step = 0; step < k; ++step) {
    std::optional<std::size_t> pick;
    for (std::size_t v = 0; v < h.n; ++v)
      if (!s.bits[v] && (!pick || gain[v] > gain[*pick])) pick = v;
    s.bits[*pick] = 1;
  }
  return s;
}

Max2CspSolution solve_max2csp_exact(const Max2CspInstance& inst, std::size_t cap) {
  double total = std::pow(static_cast<double>(inst.label_size), static_cast<double>(inst.n_vars));
  if (total > static_cast<double>(cap)) throw CapExceeded("2-CSP labeling space exceeds cap");
  std::vector<std::uint32_t> labels(inst.n_vars, 0);
  Max2CspSolution best;
  best.exact = true;
  bool found = false;
  while (true) {
    double v = inst.value(labels);
    if (!found || v > best.value) {
      found = true;
      best.value = v;
      best.labels = labels;
    }
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(inst.n_vars) - 1;
    for (; i >= 0; --i) {
      auto ui = static_cast<std::size_t>(i);
      if (++labels[ui] < inst.label_size) break;
      labels[ui] = 0;
    }
    if (i < 0) break;
  }
  return best;
}

Max2CspSolution solve_max2csp_greedy(const Max2CspInstance& inst) {
  Max2CspSolution s;
  s.labels.assign(inst.n_vars, 0);
  s.value = inst.value(s.labels);
  for (int pass = 0; pass < 100; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < inst.n_vars; ++i) {
      std::uint32_t keep = s.labels[i];
      for (std::uint32_t a = 0; a < inst.label_size; ++a) {
        if (a == keep) continue;
        s.labels[i] = a;
        double v = inst.value(s.labels);
        if (v > s.value + 1e-15) {
          s.value = v;
          keep = a;
          improved = true;
        }
      }
      s.labels[i] = keep;
    }
    if (!improved) break;
  }
  return s;
}

SolveResult solve_dks_k(const Hypergraph& g, std::size_t k, const SolverConfig& cfg) {
  g.validate();
  if (k > g.n) throw DomainError("k exceeds the number of vertices");
  const double nn = static_cast<double>(std::max<std::size_t>(g.n, 1));
  Labeling best(g.n);
  std::vector<TraceEntry> trace;
  switch (cfg.dks_backend) {
    case DksBackend::Exact: {
      BruteForceOptions o;
      o.cap = cfg.brute_force_cap;
      o.threads = cfg.threads;
      Hypergraph u = with_uniform_weights(g);
      u.allow_empty_edges = true;
      best = brute_force_opt(u, static_cast<double>(k) / nn, BiasMode::Exactly, o).labeling;
      break;
    }
    case DksBackend::GreedyPeel: {
      std::vector<std::vector<std::uint32_t>> distinct(g.edges.size());
      std::vector<std::vector<std::uint32_t>> incident(g.n);
      std::vector<double> deg(g.n, 0.0);
      for (std::size_t i = 0; i < g.edges.size(); ++i) {
        auto& d = distinct[i];
        for (auto v : g.edges[i])
          if (std::find(d.begin(), d.end(), v) == d.end()) d.push_back(v);
        for (auto v : d) {
          incident[v].push_back(static_cast<std::uint32_t>(i));
          deg[v] += g.edge_weights[i];
        }
      }
      std::vector<std::uint8_t> alive(g.n, 1), edge_alive(g.edges.size(), 1);
      for (std::size_t step = 0; step + k < g.n; ++step) {
        std::optional<std::size_t> pick;
        for (std::size_t v = 0; v < g.n; ++v)
          if (alive[v] && (!pick || deg[v] < deg[*pick])) pick = v;
        alive[*pick] = 0;
        for (auto e : incident[*pick]) {
          if (!edge_alive[e]) continue;
          edge_alive[e] = 0;
          for (auto u : distinct[e])
            if (u != *pick) deg[u] -= g.edge_weights[e];
        }
      }
      best = Labeling(alive);
      break;
    }
    case DksBackend::Via2Csp: {
      if (k == 0 || g.n % k != 0) throw DomainError("via-2csp needs n divisible by k = mu*n");
      double mu = static_cast<double>(k) / nn;
      std::vector<Candidate> cands(static_cast<std::size_t>(std::max(cfg.partition_trials, 1)));
      std::vector<std::uint8_t> exact(cands.size(), 0);
      parallel_for(cands.size(), cfg.threads, [&](std::size_t t) {
        auto red = dks_to_max2csp(g, mu, derive_seed(cfg.seed, kTagVia2Csp, t));
        double space = std::pow(static_cast<double>(red.instance.label_size), static_cast<double>(red.instance.n_vars));
        Max2CspSolution sol = space <= static_cast<double>(cfg.max2csp_exact_cap) ? solve_max2csp_exact(red.instance)
                                                                                   : solve_max2csp_greedy(red.instance);
        exact[t] = sol.exact;
        Labeling s = red.partition.decode(sol.labels);
        cands[t].valid = true;
        cands[t].value = induced_weight(s, g);
        cands[t].labeling = std::move(s);
      });
      best = cands[*first_max(cands)].labeling;
      TraceEntry te;
      te.stage = "via-2csp";
      te.metrics["partitions"] = static_cast<double>(cands.size());
      te.metrics["exact_labelers"] = static_cast<double>(std::count(exact.begin(), exact.end(), 1));
      trace.push_back(te);
      break;
    }
  }
  double mu = static_cast<double>(k) / nn;
  SolveResult r = make_result(best, value_dksh(best, g), static_cast<double>(best.count()) / nn, mu, 0.0);
  r.weight_limit = mu;
  r.trace = std::move(trace);
  return r;
}

SolveResult solve_dks(const Hypergraph& g, double mu, const SolverConfig& cfg) {
  g.validate();
  if (!(mu >= 0 && mu <= 1)) throw DomainError("bias must lie in [0, 1]");
  double k = mu * static_cast<double>(g.n);
  if (cfg.dks_backend != DksBackend::GreedyPeel && !near_integer(k))
    throw DomainError("mu*n must be integral for the " + to_string(cfg.dks_backend) + " backend");
  if (cfg.dks_backend == DksBackend::Via2Csp && !near_integer(1.0 / mu))
    throw DomainError("via-2csp needs 1/mu integral");
  return solve_dks_k(g, static_cast<std::size_t>(std::llround(k)), cfg);
}

Labeling round_dks_set(const Labeling& s, double alpha, double mu, Rng& rng) {
  Labeling x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (rng.bernoulli(alpha))
      x.bits[i] = s.bits[i];
    else
      x.bits[i] = rng.bernoulli(mu) ? 1 : 0;
  }
  return x;
}

SolveResult solve_dksh_unweighted(const Hypergraph& h, double mu, const SolverConfig& cfg) {
  h.validate();
  if (h.arity < 2) throw DomainError("unweighted DkSH solver needs arity >= 2");
  if (!(mu > 0 && mu <= 1)) throw DomainError("bias must lie in (0, 1]");
  std::vector<TraceEntry> trace;
  Labeling s = unweighted_core(h, mu, cfg, cfg.seed, &trace);
  SolveResult r = make_result(s, value_dksh(s, h), relative_weight(s, h), mu, 0.0);
  r.weight_limit = mu;
  r.trace = std::move(trace);
  return r;
}

SolveResult solve_dksh_bounded(const Hypergraph& h, double mu, const SolverConfig& cfg) {
  h.validate();
  if (!(mu > 0 && mu < 1)) throw DomainError("bias must lie in (0, 1)");
  double eta = resolve_eta(cfg, mu);
  auto w = h.normalized_weights();
  double bound = std::pow(mu, cfg.bounded_exponent);
  for (double x : w)
    if (x > bound * (1 + 1e-12))
      throw DomainError("vertex weight " + std::to_string(x) + " exceeds the bound mu^" +
                        std::to_string(cfg.bounded_exponent) + " = " + std::to_string(bound));
  std::vector<TraceEntry> trace;
  double cap = mu * (1.0 + eta);
  Labeling s = bounded_core(h, mu, eta, cap, cfg, cfg.seed, &trace);
  SolveResult r = make_result(s, value_dksh(s, h), relative_weight(s, h), mu, eta);
  r.trace = std::move(trace);
  return r;
}

SolveResult solve_dksh_weighted(const Hypergraph& h, double mu, const SolverConfig& cfg) {
  h.validate();
  if (!(mu > 0 && mu <= 1)) throw DomainError("bias must lie in (0, 1]");
  double eta = resolve_eta(cfg, mu);
  auto w = h.normalized_weights();
  auto T = heavy_set(h, mu, cfg.heavy_exponent);
  if (T.size() > cfg.heavy_cap)
    throw CapExceeded("heavy set has " + std::to_string(T.size()) + " vertices, above cap " +
                      std::to_string(cfg.heavy_cap));
  const std::size_t t = T.size();
  double light_weight = 0.0;
  {
    std::vector<std::uint8_t> in_t(h.n, 0);
    for (auto v : T) in_t[v] = 1;
    for (std::size_t i = 0; i < h.n; ++i)
      if (!in_t[i]) light_weight += w[i];
  }
  const bool fill_light = light_weight < mu * eta;
  const std::uint64_t space = std::uint64_t{1} << t;
  int threads = std::max(1, cfg.threads);
  std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), space));
  SolverConfig inner = cfg;
  if (chunks > 1) inner.threads = 1;

  struct Best {
    bool found = false;
    double value = 0.0;
    Labeling labeling;
    std::uint64_t mask = 0;
    std::size_t feasible = 0;
  };
  std::vector<Best> best(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Best b;
    std::uint64_t lo = space * c / chunks, hi = space * (c + 1) / chunks;
    std::vector<std::uint8_t> sigma_t(t);
    for (std::uint64_t m = lo; m < hi; ++m) {
      double wt = 0.0;
      for (std::size_t k = 0; k < t; ++k) {
        sigma_t[k] = (m >> (t - 1 - k)) & 1u;
        if (sigma_t[k]) wt += w[T[k]];
      }
      if (wt > mu + kTol) continue;
      ++b.feasible;
      Labeling cand(h.n);
      if (fill_light) {
        std::fill(cand.bits.begin(), cand.bits.end(), 1);
        for (std::size_t k = 0; k < t; ++k) cand.bits[T[k]] = sigma_t[k];
      } else {
        HeavySplit split = heavy_vertex_split(h, mu, eta, T, sigma_t);
        SolverConfig sc = inner;
        sc.seed = derive_seed(cfg.seed, kTagWeighted, m);
        double delta = split.delta;
        Labeling pi = bounded_core(split.sub, std::min(delta, 1.0), eta, delta, sc, sc.seed, nullptr);
        cand = split.concatenate(sigma_t, pi);
      }
      double v = induced_weight(cand, h);
      if (!b.found || v > b.value) {
        b.found = true;
        b.value = v;
        b.labeling = std::move(cand);
        b.mask = m;
      }
    }
    best[c] = std::move(b);
  });
  std::optional<std::size_t> g;
  std::size_t feasible = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    feasible += best[c].feasible;
    if (best[c].found && (!g || best[c].value > best[*g].value)) g = c;
  }
  if (!g) throw DomainError("no feasible labeling of the heavy set");
  const Labeling& s = best[*g].labeling;
  SolveResult r = make_result(s, value_dksh(s, h), relative_weight(s, h), mu, eta);
  TraceEntry te;
  te.stage = "weighted";
  te.value = r.value;
  te.relative_weight = r.relative_weight;
  te.metrics["heavy"] = static_cast<double>(t);
  te.metrics["light_weight"] = light_weight;
  te.metrics["fill_light"] = fill_light ? 1.0 : 0.0;
  te.metrics["feasible_heavy_labelings"] = static_cast<double>(feasible);
  te.metrics["best_heavy_mask"] = static_cast<double>(best[*g].mask);
  r.trace.push_back(te);
  return r;
}

SolveResult solve_single_string(const CspInstance& psi, double mu, const SolverConfig& cfg) {
  psi.validate();
  if (!single_accepting_string(psi.predicate)) throw DomainError("predicate must have exactly one accepting string");
  if (psi.has_negations()) throw DomainError("negated constraints need solve_with_negations");
  double eta = resolve_eta(cfg, mu);
  Hypergraph h = predicate_to_dksh(psi);
  SolverConfig c1 = cfg;
  c1.seed = derive_seed(cfg.seed, kTagSingleDksh);
  SolveResult s1 = solve_dksh_weighted(h, mu, c1);
  int reps = resolve_repetitions(cfg, mu, psi.predicate.arity());
  std::vector<Candidate> cands(static_cast<std::size_t>(reps) + 1);
  cands[0].valid = true;
  cands[0].labeling = s1.labeling;
  cands[0].value = value_csp(s1.labeling, psi);
  std::vector<double> vals(cands.size(), 0.0);
  parallel_for(static_cast<std::size_t>(reps), cfg.threads, [&](std::size_t j) {
    Labeling s2 = subsample_half(s1.labeling, derive_seed(cfg.seed, kTagSubsample, j));
    cands[j + 1].valid = true;
    cands[j + 1].value = value_csp(s2, psi);
    cands[j + 1].labeling = std::move(s2);
  });
  auto b = *first_max(cands);
  const Labeling& s = cands[b].labeling;
  SolveResult r = make_result(s, value_csp(s, psi), relative_weight(s, psi.graph), mu, eta);
  r.trace = s1.trace;
  TraceEntry t1;
  t1.stage = "dksh";
  t1.value = s1.value;
  t1.relative_weight = s1.relative_weight;
  r.trace.push_back(t1);
  TraceEntry t2;
  t2.stage = "subsample";
  t2.value = r.value;
  t2.relative_weight = r.relative_weight;
  double mean = 0.0;
  for (std::size_t j = 1; j < cands.size(); ++j) mean += cands[j].value;
  t2.metrics["repetitions"] = reps;
  t2.metrics["mean_subsampled_value"] = reps > 0 ? mean / reps : 0.0;
  t2.metrics["chosen_repetition"] = static_cast<double>(b) - 1.0;
  r.trace.push_back(t2);
  return r;
}

SolveResult solve_general(const CspInstance& psi, double mu, const SolverConfig& cfg) {
  psi.validate();
  if (psi.has_negations()) throw DomainError("negated constraints need solve_with_negations");
  double eta = resolve_eta(cfg, mu);
  auto mins = minimal_elements(psi.predicate);
  if (mins.empty()) {
    Labeling z(psi.graph.n);
    SolveResult r = make_result(z, 0.0, 0.0, mu, eta);
    r.trace.push_back(TraceEntry{"empty-minimal-set", 0.0, 0.0, {}});
    return r;
  }
  std::vector<Candidate> cands(mins.size());
  std::vector<TraceEntry> stages(mins.size());
  for (std::size_t i = 0; i < mins.size(); ++i) {
    CspInstance sub = psi;
    sub.predicate = single_string_predicate(mins[i], psi.predicate.arity());
    SolverConfig c = cfg;
    c.seed = derive_seed(cfg.seed, kTagGeneral, mins[i]);
    SolveResult s = solve_single_string(sub, mu, c);
    cands[i].valid = true;
    cands[i].value = value_csp(s.labeling, psi);
    cands[i].labeling = s.labeling;
    stages[i].stage = "beta=" + psi.predicate.to_string(mins[i]);
    stages[i].value = cands[i].value;
    stages[i].relative_weight = s.relative_weight;
    stages[i].metrics["single_string_value"] = s.value;
  }
  auto b = *first_max(cands);
  const Labeling& s = cands[b].labeling;
  SolveResult r = make_result(s, value_csp(s, psi), relative_weight(s, psi.graph), mu, eta);
  r.trace = std::move(stages);
  return r;
}

SolveResult solve_with_negations(const CspInstance& psi, double mu, const SolverConfig& cfg) {
  psi.validate();
  if (!(mu > 0 && mu <= 1)) throw DomainError("bias must lie in (0, 1]");
  const std::size_t m = psi.graph.edges.size();
  if (mu >= 1.0) {
    Labeling all(psi.graph.n);
    std::fill(all.bits.begin(), all.bits.end(), 1);
    return make_result(all, value_csp(all, psi), 1.0, mu, 0.0);
  }
  const bool flip = mu > 0.5;
  const double mu1 = flip ? 1.0 - mu : mu;
  Predicate psi1 = flip ? complement_predicate(psi.predicate) : psi.predicate;
  CspInstance full1 = psi;
  full1.predicate = psi1;
  double eta = resolve_eta(cfg, mu1);

  std::vector<std::uint32_t> pattern(m, 0);
  if (!psi.negations.empty())
    for (std::size_t e = 0; e < m; ++e) pattern[e] = signs_to_mask(psi.negations[e]);
  std::vector<std::uint32_t> classes = pattern;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  const int r = psi.predicate.arity();
  std::vector<Candidate> cands(classes.size());
  std::vector<TraceEntry> stages;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<int> signs(static_cast<std::size_t>(r), 1);
    for (int j = 0; j < r; ++j)
      if (classes[c] >> (r - 1 - j) & 1u) signs[static_cast<std::size_t>(j)] = -1;
    CspInstance sub;
    sub.graph.n = psi.graph.n;
    sub.graph.arity = psi.graph.arity;
    sub.graph.vertex_weights = psi.graph.vertex_weights;
    for (std::size_t e = 0; e < m; ++e)
      if (pattern[e] == classes[c]) {
        sub.graph.edges.push_back(psi.graph.edges[e]);
        sub.graph.edge_weights.push_back(psi.graph.edge_weights[e]);
      }
    sub.predicate = negation_conjugate(psi1, signs);
    sub.bias = mu1;
    SolverConfig sc = cfg;
    sc.seed = derive_seed(cfg.seed, kTagNegation, classes[c]);
    sc.eta = eta;
    SolveResult s = solve_general(sub, mu1, sc);
    cands[c].valid = true;
    cands[c].value = value_csp(s.labeling, full1);
    cands[c].labeling = s.labeling;
    TraceEntry te;
    te.stage = "pattern=" + pattern_string(classes[c], r);
    te.value = cands[c].value;
    te.relative_weight = s.relative_weight;
    te.metrics["class_edges"] = static_cast<double>(sub.graph.edges.size());
    te.metrics["class_value"] = s.value;
    stages.push_back(te);
  }
  Labeling s = m == 0 ? Labeling(psi.graph.n) : cands[*first_max(cands)].labeling;
  if (flip) s = s.complemented();
  SolveResult out = make_result(s, value_csp(s, psi), relative_weight(s, psi.graph), mu, eta);
  if (flip) {
    out.weight_limit = 1.0;
    TraceEntry te;
    te.stage = "complemented";
    te.metrics["complement_weight_limit"] = mu1 * (1.0 + eta);
    te.metrics["complement_weight"] = 1.0 - out.relative_weight;
    stages.push_back(te);
  }
  out.trace = std::move(stages);
  return out;
}

}  // namespace bcsp
