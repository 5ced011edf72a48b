#include "bcsp/verify.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <map>

#include "bcsp/api.hpp"
#include "bcsp/gadgets.hpp"
#include "bcsp/gaussian.hpp"
#include "bcsp/reductions.hpp"
#include "bcsp/solvers.hpp"

namespace bcsp {

namespace {

constexpr std::size_t kMaxFailures = 10;

std::size_t pick(std::size_t given, std::size_t fallback) { return given ? given : fallback; }

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

bool within_3sigma(double est, double target, double se) { return std::fabs(est - target) <= 3.0 * se + 1e-12; }

struct MeanVar {
  CompensatedSum s, q;
  std::size_t n = 0;
  void add(double x) {
    s.add(x);
    q.add(x * x);
    ++n;
  }
  double mean() const { return s.value() / static_cast<double>(n); }
  double se() const {
    double m = mean();
    double var = n > 1 ? (q.value() - static_cast<double>(n) * m * m) / static_cast<double>(n - 1) : 0.0;
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

Predicate random_predicate(Rng& rng, int r) {
  std::vector<std::uint8_t> t(std::size_t{1} << r);
  for (auto& x : t) x = rng.bernoulli(0.5) ? 1 : 0;
  return Predicate(r, t);
}

// ---------------------------------------------------------------------------

SuiteResult suite_minimal_set(const SuiteOptions&) {
  SuiteResult res;
  auto start = std::chrono::steady_clock::now();
  std::size_t count = 0;
  for (int r = 1; r <= 3; ++r) {
    const std::uint32_t size = 1u << r;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << size); ++code) {
      std::vector<std::uint8_t> t(size);
      for (std::uint32_t x = 0; x < size; ++x) t[x] = (code >> x) & 1u;
      Predicate psi(r, t);
      std::vector<std::uint32_t> oracle;
      for (std::uint32_t b = 0; b < size; ++b) {
        if (!t[b]) continue;
        bool minimal = true;
        for (std::uint32_t a = 0; a < size && minimal; ++a)
          if (t[a] && a != b && (a & ~b) == 0) minimal = false;
        if (minimal) oracle.push_back(b);
      }
      auto got = minimal_elements(psi);
      res.check(got == oracle, "minimal elements mismatch at r=" + std::to_string(r) + " table " + std::to_string(code));
      bool indep = true;
      for (auto b : oracle)
        if (hamming_weight(b) > 1) indep = false;
      res.check(classify_bias_dependence(psi).bias_independent == indep,
                "classification mismatch at r=" + std::to_string(r) + " table " + std::to_string(code));
      ++count;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.metrics["predicates"] = count;
  res.check(secs < 5.0, "runtime " + fmt(secs) + " s exceeds 5 s");
  return res;
}

SuiteResult suite_cl_red(const SuiteOptions& opt) {
  SuiteResult res;
  const std::size_t n_max = pick(opt.n_max, 8);
  const int trials = opt.trials ? opt.trials : 200;
  Rng rng(derive_seed(opt.seed, 0xc1));
  int made = 0;
  while (made < trials) {
    int r = static_cast<int>(uniform_int(rng, 1, 3));
    Predicate psi = random_predicate(rng, r);
    auto mins = minimal_elements(psi);
    std::vector<std::uint32_t> usable;
    for (auto b : mins)
      if (b != 0) usable.push_back(b);
    if (usable.empty()) continue;
    std::uint32_t beta = usable[rng.below(usable.size())];
    int ones = hamming_weight(beta);
    std::size_t n = uniform_int(rng, std::max<std::size_t>(2, static_cast<std::size_t>(ones)), n_max);
    std::size_t k = uniform_int(rng, 1, n - 1);
    double mu = static_cast<double>(k) / static_cast<double>(n);
    Hypergraph h = random_hypergraph(rng, n, ones, uniform_int(rng, 1, 10), false, false);
    auto red = dksh_to_predicate(h, psi, beta, mu);
    auto src = brute_force_opt(h, mu, BiasMode::AtMost);
    auto tgt = brute_force_opt(red.instance, red.target_bias, BiasMode::AtMost);
    res.check(std::fabs(src.value - tgt.value) <= kTol,
              "opt mismatch: source " + fmt(src.value) + " target " + fmt(tgt.value));
    auto cert = red.certify(h, tgt.labeling);
    res.check(cert.holds, "decoded labeling loses value");
    ++made;
  }
  for (int it = 0; it < trials; ++it) {
    int r = static_cast<int>(uniform_int(rng, 1, 3));
    std::uint32_t beta = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << r));
    std::size_t n = uniform_int(rng, std::max<std::size_t>(2, static_cast<std::size_t>(r)), n_max);
    double mu = static_cast<double>(uniform_int(rng, 1, n - 1)) / static_cast<double>(n);
    CspInstance psi;
    psi.graph = random_hypergraph(rng, n, r, uniform_int(rng, 1, 10), false, false);
    psi.predicate = single_string_predicate(beta, r);
    psi.bias = mu;
    Hypergraph h = predicate_to_dksh(psi);
    auto po = brute_force_opt(psi, mu, BiasMode::AtMost);
    auto ho = brute_force_opt(h, mu, BiasMode::AtMost);
    res.check(ho.value >= po.value - kTol, "Val(H) " + fmt(ho.value) + " below Val(Psi) " + fmt(po.value));
    res.check(value_dksh(po.labeling, h) >= value_csp(po.labeling, psi) - kTol, "witness check failed");
  }
  return res;
}

SuiteResult suite_subsample(const SuiteOptions& opt) {
  SuiteResult res;
  const std::uint64_t T = opt.samples ? opt.samples : 100000;
  std::size_t cfg = 0;
  json rows = json::array();
  for (int r = 1; r <= 3; ++r) {
    for (std::uint32_t beta = 1; beta < (1u << r); ++beta) {
      std::uint32_t zeros = ((1u << r) - 1) & ~beta;
      for (std::uint32_t extra = 0; extra < (1u << r); ++extra) {
        if ((extra & ~zeros) != 0) continue;
        std::uint32_t sigma_pat = beta | extra;
        Labeling s1(static_cast<std::size_t>(r));
        for (int j = 0; j < r; ++j) s1.bits[static_cast<std::size_t>(j)] = (sigma_pat >> (r - 1 - j)) & 1u;
        int exponent = hamming_weight(beta) + hamming_weight(extra);
        double p = std::ldexp(1.0, -exponent);
        Rng rng(derive_seed(opt.seed, 0x5b, cfg++));
        std::uint64_t hits = 0;
        Edge e(static_cast<std::size_t>(r));
        for (int j = 0; j < r; ++j) e[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(j);
        for (std::uint64_t t = 0; t < T; ++t)
          if (edge_pattern(subsample_half(s1, rng), e) == beta) ++hits;
        double est = static_cast<double>(hits) / static_cast<double>(T);
        double se = std::sqrt(p * (1.0 - p) / static_cast<double>(T));
        std::string tag = "r=" + std::to_string(r) + " beta=" + pattern_string(beta, r) + " sigma1=" + s1.to_string();
        res.check(within_3sigma(est, p, se), tag + ": estimate " + fmt(est) + " vs " + fmt(p));
        res.check(p >= std::ldexp(1.0, -r), tag + ": closed form below 2^-r");
        rows.push_back(json{{"case", tag}, {"estimate", est}, {"closed_form", p}});
      }
    }
  }
  res.metrics["cases"] = rows;
  return res;
}

SuiteResult suite_cloud(const SuiteOptions& opt) {
  SuiteResult res;
  const std::size_t n_max = std::min<std::size_t>(pick(opt.n_max, 6), 6);
  const int trials = opt.trials ? opt.trials : 60;
  const std::uint64_t samples = opt.samples ? opt.samples : 100000;
  Rng rng(derive_seed(opt.seed, 0xc10));
  for (int it = 0; it < trials; ++it) {
    std::size_t n = uniform_int(rng, 2, n_max);
    int r = static_cast<int>(uniform_int(rng, 1, std::min<std::size_t>(3, n)));
    Hypergraph h = random_hypergraph(rng, n, r, uniform_int(rng, 1, 6), true, false);
    for (auto& w : h.vertex_weights) w = static_cast<double>(uniform_int(rng, 1, 3));
    auto ce = cloud_expansion(h);
    std::size_t N = ce.expanded.n;
    double mu = static_cast<double>(uniform_int(rng, 1, N - 1)) / static_cast<double>(N);
    auto a = brute_force_opt(ce.expanded, mu, BiasMode::Exactly);
    auto b = brute_force_opt(h, mu, BiasMode::AtMost);
    res.check(a.value >= b.value - kTol, "Val_(mu)(H') " + fmt(a.value) + " below Val_<=mu(H) " + fmt(b.value));
  }
  // Edge sampling equivalence.
  json pvals = json::array();
  for (int it = 0; it < 3; ++it) {
    Rng g(derive_seed(opt.seed, 0xc11, static_cast<std::uint64_t>(it)));
    Hypergraph h = random_hypergraph(g, 4, 2, 3, true, false);
    for (auto& w : h.vertex_weights) w = static_cast<double>(uniform_int(g, 1, 3));
    auto ce = cloud_expansion(h);
    std::map<Edge, double> expected;
    double tot = ce.expanded.total_edge_weight();
    for (std::size_t k = 0; k < ce.expanded.edges.size(); ++k) {
      Edge e = ce.expanded.edges[k];
      std::sort(e.begin(), e.end());
      expected[e] += ce.expanded.edge_weights[k] / tot;
    }
    std::vector<double> ew(h.edge_weights);
    std::map<Edge, std::uint64_t> observed;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const Edge& e = h.edges[g.categorical(ew)];
      Edge out;
      for (auto v : e)
        out.push_back(static_cast<std::uint32_t>(ce.cloud_offset[v] +
                                                 g.below(static_cast<std::uint64_t>(ce.cloud_size[v]))));
      std::sort(out.begin(), out.end());
      ++observed[out];
    }
    bool stray = false;
    for (const auto& [e, c] : observed)
      if (!expected.count(e)) stray = true;
    double stat = 0.0;
    for (const auto& [e, p] : expected) {
      double ex = p * static_cast<double>(samples);
      double o = observed.count(e) ? static_cast<double>(observed.at(e)) : 0.0;
      stat += (o - ex) * (o - ex) / ex;
    }
    double pv = expected.size() > 1 ? chi_square_pvalue(stat, static_cast<double>(expected.size() - 1)) : 1.0;
    pvals.push_back(pv);
    res.check(!stray && pv > 0.01, "chi-square p-value " + fmt(pv) + (stray ? " with unexpected edges" : ""));
  }
  res.metrics["chi_square_p"] = pvals;
  // Expected decoded value equals the expanded value.
  for (int it = 0; it < 10; ++it) {
    Rng g(derive_seed(opt.seed, 0xc12, static_cast<std::uint64_t>(it)));
    std::size_t n = uniform_int(g, 2, 6);
    int r = static_cast<int>(uniform_int(g, 1, std::min<std::size_t>(3, n)));
    Hypergraph h = random_hypergraph(g, n, r, uniform_int(g, 1, 6), true, false);
    for (auto& w : h.vertex_weights) w = static_cast<double>(uniform_int(g, 1, 4));
    auto ce = cloud_expansion(h);
    Labeling sp(ce.expanded.n);
    for (auto& b : sp.bits) b = g.bernoulli(0.6) ? 1 : 0;
    double target = value_dksh(sp, ce.expanded);
    MeanVar mv;
    for (int t = 0; t < 10000; ++t) mv.add(value_dksh(ce.decode(sp, g), h));
    res.check(within_3sigma(mv.mean(), target, mv.se()),
              "E[Val_sigma(H)] " + fmt(mv.mean()) + " vs Val_sigma'(H') " + fmt(target));
  }
  return res;
}

SuiteResult suite_clique(const SuiteOptions& opt) {
  SuiteResult res;
  const std::size_t n_max = pick(opt.n_max, 8);
  const int trials = opt.trials ? opt.trials : 100;
  Rng rng(derive_seed(opt.seed, 0xc2));
  for (int it = 0; it < trials; ++it) {
    std::size_t n = uniform_int(rng, 3, n_max);
    double mu = static_cast<double>(uniform_int(rng, 1, n - 1)) / static_cast<double>(n);
    Hypergraph h = random_hypergraph(rng, n, 3, uniform_int(rng, 1, 12), true, false);
    auto best = brute_force_opt(h, mu, BiasMode::Exactly);
    Hypergraph g = clique_expansion(h, mu);
    double lhs = induced_weight(best.labeling, g), rhs = mu * induced_weight(best.labeling, h);
    res.check(lhs >= rhs - kTol, "w'(E_G[S*]) " + fmt(lhs) + " below mu*w(E_H[S*]) " + fmt(rhs));
  }
  const std::uint64_t T = opt.samples ? opt.samples : 10000;
  struct Case {
    std::size_t n;
    double mu;
    int r;
  };
  json rows = json::array();
  std::uint64_t idx = 0;
  for (Case c : {Case{100, 0.25, 3}, Case{200, 0.1, 3}, Case{60, 0.5, 4}, Case{150, 0.2, 2}}) {
    std::size_t k = static_cast<std::size_t>(std::llround(c.mu * static_cast<double>(c.n)));
    std::vector<std::uint32_t> sup(k);
    for (std::size_t i = 0; i < k; ++i) sup[i] = static_cast<std::uint32_t>(i);
    Labeling s = Labeling::from_support(c.n, sup);
    Rng g(derive_seed(opt.seed, 0xc21, idx++));
    std::uint64_t big = 0;
    double thr = 1.2 * static_cast<double>(k);
    for (std::uint64_t t = 0; t < T; ++t)
      if (static_cast<double>(round_dks_set(s, 2.0 / c.r, c.mu, g).count()) >= thr - kTol) ++big;
    double freq = static_cast<double>(big) / static_cast<double>(T);
    double bound = std::exp(-0.04 * static_cast<double>(k));
    rows.push_back(json{{"n", c.n}, {"mu", c.mu}, {"frequency", freq}, {"hoeffding", bound}});
    res.check(freq <= bound, "size tail " + fmt(freq) + " exceeds Hoeffding bound " + fmt(bound));
  }
  res.metrics["size_tail"] = rows;
  return res;
}

SuiteResult suite_greedy_cover(const SuiteOptions& opt) {
  SuiteResult res;
  const std::size_t n_max = pick(opt.n_max, 10);
  const int trials = opt.trials ? opt.trials : 500;
  Rng rng(derive_seed(opt.seed, 0xc3));
  const double ratio = 1.0 - 1.0 / std::exp(1.0);
  double worst = 1.0;
  for (int it = 0; it < trials; ++it) {
    std::size_t n = uniform_int(rng, 1, n_max);
    Hypergraph h = random_hypergraph(rng, n, 1, uniform_int(rng, 1, 15), true, false);
    std::size_t k = uniform_int(rng, 1, n);
    auto opt_v = brute_force_opt(h, static_cast<double>(k) / static_cast<double>(n), BiasMode::AtMost).value;
    double v = value_dksh(greedy_dksh1(h, k), h);
    if (opt_v > 0) worst = std::min(worst, v / opt_v);
    res.check(v >= ratio * opt_v - kTol, "greedy " + fmt(v) + " below (1-1/e)*" + fmt(opt_v));
  }
  res.metrics["worst_ratio"] = worst;
  return res;
}

SuiteResult suite_dks_2csp(const SuiteOptions& opt) {
  SuiteResult res;
  const std::size_t n_max = pick(opt.n_max, 12);
  const int partitions = opt.trials ? opt.trials : 200;
  Rng rng(derive_seed(opt.seed, 0xc4));
  json rows = json::array();
  for (int it = 0; it < 10; ++it) {
    std::size_t R, ell;
    do {
      R = uniform_int(rng, 2, 4);
      ell = uniform_int(rng, 2, 6);
    } while (R * ell > n_max);
    std::size_t n = R * ell;
    double mu = 1.0 / static_cast<double>(R);
    std::vector<Edge> edges;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b)
        if (rng.bernoulli(0.5)) edges.push_back({a, b});
    if (edges.empty()) edges.push_back({0, 1});
    Hypergraph g = Hypergraph::make(n, 2, edges);
    double delta = induced_weight(brute_force_opt(g, mu, BiasMode::Exactly).labeling, g);
    MeanVar mv;
    for (int p = 0; p < partitions; ++p) {
      auto red = dks_to_max2csp(g, mu, derive_seed(opt.seed, 0xc41, static_cast<std::uint64_t>(it * 100000 + p)));
      auto sol = solve_max2csp_exact(red.instance);
      res.check(sol.value <= delta + kTol, "Opt(Psi) " + fmt(sol.value) + " above delta " + fmt(delta));
      Labeling s = red.partition.decode(sol.labels);
      res.check(s.count() == ell && induced_weight(s, g) >= sol.value - kTol, "decoded set loses value");
      mv.add(sol.value);
    }
    rows.push_back(json{{"n", n}, {"mu", mu}, {"delta", delta}, {"mean_opt", mv.mean()}, {"se", mv.se()}});
    res.check(mv.mean() >= 0.5 * delta - 3.0 * mv.se() - kTol,
              "E[Opt(Psi)] " + fmt(mv.mean()) + " below delta/2 = " + fmt(0.5 * delta));
  }
  res.metrics["instances"] = rows;
  return res;
}

SuiteResult suite_weighted(const SuiteOptions& opt) {
  SuiteResult res;
  auto start = std::chrono::steady_clock::now();
  const std::size_t n_max = pick(opt.n_max, 10);
  const int trials = opt.trials ? opt.trials : 200;
  Rng rng(derive_seed(opt.seed, 0xc5));
  const double mus[] = {0.2, 0.25, 0.3, 1.0 / 3.0, 0.4, 0.5};
  int floor_ok = 0;
  for (int it = 0; it < trials; ++it) {
    std::size_t n = uniform_int(rng, 2, n_max);
    int r = static_cast<int>(uniform_int(rng, 1, std::min<std::size_t>(3, n)));
    Hypergraph h = random_hypergraph(rng, n, r, uniform_int(rng, 1, 10), true, true);
    double mu = mus[rng.below(6)];
    SolverConfig cfg;
    cfg.seed = derive_seed(opt.seed, 0xc51, static_cast<std::uint64_t>(it));
    cfg.threads = opt.threads;
    auto s = solve_dksh_weighted(h, mu, cfg);
    double limit = mu * (1.0 + s.eta);
    double w = relative_weight(s.labeling, h);
    res.check(w <= limit + kTol, "weight " + fmt(w) + " above mu(1+eta) " + fmt(limit));
    double upper = brute_force_opt(h, limit, BiasMode::AtMost).value;
    double v = value_dksh(s.labeling, h);
    res.check(v <= upper + kTol, "value " + fmt(v) + " above oracle at mu(1+eta) " + fmt(upper));
    res.check(std::fabs(v - s.value) <= kTol, "reported value differs from recomputed value");
    double opt_v = brute_force_opt(h, mu, BiasMode::AtMost).value;
    if (v >= std::ldexp(1.0, -4 * r) * std::pow(mu, r - 1) * opt_v - 1e-12) ++floor_ok;
  }
  double frac = static_cast<double>(floor_ok) / trials;
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.metrics["floor_fraction"] = frac;
  res.check(frac >= 0.9, "approximation floor met in only " + fmt(frac) + " of instances");
  res.check(secs < 120.0, "runtime " + fmt(secs) + " s exceeds 2 min");
  return res;
}

SuiteResult suite_gadget(const SuiteOptions& opt) {
  SuiteResult res;
  json rows = json::array();
  {
    GadgetParams p;
    p.mu = 0.1;
    p.rho = 0.5;
    p.r = 2;
    p.R = 4;
    for (auto v : {HypercubeVariant::SharedTheta, HypercubeVariant::IndependentCopies}) {
      auto f = CubeAssignment::dictator(0);
      auto est = mc_acceptance(
          [&](Rng& rng) {
            auto xs = sample_noisy_hypercube_edge(p, v, rng);
            double a = 1.0;
            for (const auto& x : xs) a *= f(x);
            return a;
          },
          opt.samples ? opt.samples : 1000000, derive_seed(opt.seed, 0x9a, static_cast<std::uint64_t>(v)), opt.threads);
      double closed = hypercube_dictator_closed_form(p, v);
      double exact = hypercube_acceptance_exact(p, v, f);
      rows.push_back(json{{"test", "hypercube-" + to_string(v)}, {"estimate", est.estimate}, {"stderr", est.std_error},
                          {"exact", closed}});
      res.check(within_3sigma(est.estimate, closed, est.std_error),
                to_string(v) + ": estimate " + fmt(est.estimate) + " vs closed form " + fmt(closed));
      res.check(std::fabs(exact - closed) <= 1e-12, to_string(v) + ": enumeration disagrees with closed form");
      if (v == HypercubeVariant::IndependentCopies)
        res.check(closed >= p.mu * std::pow(p.rho, p.r), "independent-copies below mu*rho^r");
    }
  }
  {
    GadgetParams p;
    p.mu = 0.3;
    p.beta = 0.5;
    p.rho = 0.5;
    p.eta = 0.1;
    p.r = 2;
    p.R = 4;
    auto g = SmallGraph::two_cliques(3);
    std::vector<std::uint8_t> in_s = {1, 1, 1, 0, 0, 0};
    auto est = mc_acceptance([&](Rng& rng) { return sse_dictator_acceptance(sse_test_sample(g, p, rng), in_s); },
                             opt.samples ? opt.samples : 400000, derive_seed(opt.seed, 0x9b), opt.threads);
    double exact = sse_dictator_exact(g, in_s, p);
    rows.push_back(json{{"test", "sse"}, {"estimate", est.estimate}, {"stderr", est.std_error}, {"exact", exact}});
    res.check(within_3sigma(est.estimate, exact, est.std_error),
              "sse: estimate " + fmt(est.estimate) + " vs enumeration " + fmt(exact));
  }
  {
    for (auto [rho, eta] : {std::pair{0.9, 0.05}, std::pair{1.0, 0.0}}) {
      GadgetParams p;
      p.rho = rho;
      p.eta = eta;
      p.r = 2;
      p.t = 3;
      p.label_size = 3;
      std::vector<std::uint32_t> sigma;
      auto inst = UgInstance::planted_cycle(6, 3, derive_seed(opt.seed, 0x9c), &sigma);
      std::vector<LongCode> codes;
      for (std::size_t v = 0; v < inst.n; ++v) codes.push_back(LongCode::dictator(3, 3, sigma[v]));
      auto est = mc_acceptance([&](Rng& rng) { return ug_accepts(ug_test_sample(inst, p, rng), codes, true) ? 1.0 : 0.0; },
                               opt.samples ? opt.samples : 200000, derive_seed(opt.seed, 0x9d), opt.threads);
      double bound = ug_completeness_bound(p, 1.0 - inst.satisfied_fraction(sigma));
      rows.push_back(json{{"test", "ug"}, {"rho", rho}, {"estimate", est.estimate}, {"bound", bound}});
      res.check(est.estimate >= bound - 3.0 * est.std_error,
                "ug: estimate " + fmt(est.estimate) + " below completeness bound " + fmt(bound));
    }
  }
  res.metrics["estimates"] = rows;
  return res;
}

SuiteResult suite_gamma(const SuiteOptions&) {
  SuiteResult res;
  res.check(std::fabs(gaussian_stability(0.0, {0.3, 0.5}) - 0.15) <= 1e-6, "Gamma_0(0.3,0.5) != 0.15");
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double b : {0.1, 0.3, 0.5, 0.7, 0.9})
      res.check(std::fabs(gaussian_stability(0.0, {a, b}) - a * b) <= 1e-6, "Gamma_0 is not the product");
  res.check(std::fabs(gaussian_stability(0.5, {0.5, 0.5}) - 1.0 / 3.0) <= 1e-6, "Gamma_0.5(0.5,0.5) != 1/3");
  const double grid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const double rhos[] = {0.0, 0.2, 0.4, 0.6, 0.8, 0.95};
  for (double a : grid)
    for (double b : grid) {
      res.check(std::fabs(gaussian_stability(0.6, {a, b}) - gaussian_stability(0.6, {b, a})) <= 1e-9,
                "asymmetric at (" + fmt(a) + ", " + fmt(b) + ")");
      double prev = -1.0;
      for (double rho : rhos) {
        double g = gaussian_stability(rho, {a, b});
        res.check(g >= prev - 1e-9, "not monotone in rho at (" + fmt(a) + ", " + fmt(b) + ")");
        prev = g;
      }
    }
  json rows = json::array();
  const double mu = 1.0 / 16.0;
  for (double c : {1.0, 2.0, 4.0}) {
    double rho = 1.0 / (2.0 * c * 9.0 * std::log(16.0));
    double g = gaussian_stability(rho, {mu, mu, mu});
    rows.push_back(json{{"c_prime", c}, {"rho", rho}, {"gamma", g}, {"bound", 3.0 * mu * mu * mu}});
    res.check(g <= 3.0 * mu * mu * mu, "Gamma^(3) exceeds 3 mu^3 at C'=" + fmt(c));
  }
  res.metrics["stability"] = rows;
  return res;
}

SuiteResult suite_determinism(const SuiteOptions& opt) {
  SuiteResult res;
  Rng rng(derive_seed(opt.seed, 0xc6));
  Hypergraph h = random_hypergraph(rng, 9, 3, 12, true, true);
  json inst = to_json(h);
  inst["bias"] = 0.3;
  auto run_solve = [&](int threads) {
    SolverConfig c;
    c.seed = opt.seed;
    c.threads = threads;
    return dump_json(api::solve("dksh", inst, std::nullopt, c, "auto"));
  };
  auto run_gadget = [&](int threads) {
    json p = {{"mu", 0.2}, {"rho", 0.4}, {"r", 3}, {"R", 4}, {"samples", 20000}, {"seed", opt.seed}, {"threads", threads}};
    return dump_json(api::gadget("hypercube", "dictator", p));
  };
  for (const auto& run : {std::function<std::string(int)>(run_solve), std::function<std::string(int)>(run_gadget)}) {
    std::string ref = run(1);
    for (int rep = 0; rep < 2; ++rep) res.check(run(1) == ref, "repeat run differs");
    for (int rep = 0; rep < 3; ++rep) res.check(run(4) == ref, "4-thread run differs");
  }
  return res;
}

}  // namespace

void SuiteResult::check(bool cond, const std::string& what) {
  if (cond) {
    ++passed;
    return;
  }
  ++failed;
  if (failures.size() < kMaxFailures) failures.push_back(what);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"minimal-set", "cl-red",   "subsample",           "cloud",
                                                  "clique",      "greedy-cover", "dks-2csp",        "weighted",
                                                  "gadget-completeness", "gamma", "determinism"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  static const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>> table = {
      {"minimal-set", suite_minimal_set}, {"cl-red", suite_cl_red},
      {"subsample", suite_subsample},     {"cloud", suite_cloud},
      {"clique", suite_clique},           {"greedy-cover", suite_greedy_cover},
      {"dks-2csp", suite_dks_2csp},       {"weighted", suite_weighted},
      {"gadget-completeness", suite_gadget}, {"gamma", suite_gamma},
      {"determinism", suite_determinism}};
  auto it = table.find(name);
  if (it == table.end()) throw StructuralError("unknown verify claim '" + name + "'");
  SuiteResult r = it->second(opt);
  r.name = name;
  return r;
}

json to_json(const SuiteResult& r) {
  return json{{"claim", r.name},
              {"passed", r.passed},
              {"failed", r.failed},
              {"ok", r.ok()},
              {"failures", r.failures},
              {"metrics", r.metrics}};
}

Hypergraph random_hypergraph(Rng& rng, std::size_t n, int len, std::size_t m, bool weighted_edges,
                             bool weighted_vertices) {
  if (static_cast<std::size_t>(len) > n) throw DomainError("edge length exceeds vertex count");
  std::vector<Edge> edges;
  std::vector<double> ew, vw;
  for (std::size_t k = 0; k < m; ++k) {
    auto perm = rng.permutation(n);
    edges.emplace_back(perm.begin(), perm.begin() + len);
    ew.push_back(weighted_edges ? static_cast<double>(uniform_int(rng, 1, 4)) : 1.0);
  }
  for (std::size_t v = 0; v < n; ++v) vw.push_back(weighted_vertices ? 0.25 + rng.uniform() * 1.75 : 1.0);
  return Hypergraph::make(n, len, std::move(edges), std::move(ew), std::move(vw), len == 0);
}

double chi_square_pvalue(double stat, double dof) { return boost::math::gamma_q(dof / 2.0, stat / 2.0); }

}  // namespace bcsp
