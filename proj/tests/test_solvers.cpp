#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bcsp/solvers.hpp"
#include "bcsp/verify.hpp"
#include "oracle.hpp"

using namespace bcsp;

namespace {

SolverConfig exact_cfg() {
  SolverConfig c;
  c.dks_backend = DksBackend::Exact;
  return c;
}

}  // namespace

TEST(Subsample, ZerosStayZeros) {
  EXPECT_EQ(subsample_half(Labeling(6), 3), Labeling(6));
  auto s = subsample_half(Labeling::from_string("101100"), 3);
  for (std::size_t i = 0; i < 6; ++i)
    if (s.bits[i]) EXPECT_TRUE(Labeling::from_string("101100").bits[i]);
}

TEST(GreedyDksh1, Examples) {
  auto h = Hypergraph::make(2, 1, {{0}, {0}, {1}});
  auto s = greedy_dksh1(h, 1);
  EXPECT_EQ(s.to_string(), "10");
  EXPECT_NEAR(value_dksh(s, h), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(value_dksh(greedy_dksh1(h, 2), h), 1.0);
}

TEST(GreedyDksh1, ReachesOneMinusInverseE) {
  Rng rng(31);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 2 + rng.below(9);
    auto h = random_hypergraph(rng, n, 1, 1 + rng.below(12), it % 2 == 1, false);
    std::size_t k = 1 + rng.below(n);
    auto s = greedy_dksh1(h, k);
    EXPECT_EQ(s.count(), k);
    double opt = oracle::opt(h, static_cast<double>(k) / static_cast<double>(n), true).value;
    EXPECT_GE(oracle::value(s.bits, h), (1.0 - std::exp(-1.0)) * opt - 1e-12);
  }
}

TEST(SolveDks, ExactOnK4) {
  std::vector<Edge> e;
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = a + 1; b < 4; ++b) e.push_back({a, b});
  auto g = Hypergraph::make(4, 2, e);
  auto r = solve_dks(g, 0.5, exact_cfg());
  EXPECT_NEAR(r.value, 1.0 / 6.0, 1e-12);
  EXPECT_EQ(r.labeling.count(), 2u);
}

TEST(SolveDks, PeelFindsPlantedClique) {
  std::vector<Edge> e;
  for (std::uint32_t a = 0; a < 5; ++a)
    for (std::uint32_t b = a + 1; b < 5; ++b) e.push_back({a + 3, b + 3});
  auto g = Hypergraph::make(12, 2, e);
  auto r = solve_dks(g, 5.0 / 12.0, SolverConfig{});
  EXPECT_EQ(r.labeling.support(), (std::vector<std::uint32_t>{3, 4, 5, 6, 7}));
  EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(SolveDks, BackendsAgreeWithOracleBound) {
  Rng rng(32);
  for (int it = 0; it < 20; ++it) {
    auto g = random_hypergraph(rng, 8, 2, 12, false, false);
    double opt = oracle::opt(g, 0.5, true).value;
    for (auto b : {DksBackend::Exact, DksBackend::GreedyPeel, DksBackend::Via2Csp}) {
      SolverConfig c;
      c.dks_backend = b;
      c.seed = static_cast<std::uint64_t>(it);
      auto r = solve_dks(g, 0.5, c);
      EXPECT_EQ(r.labeling.count(), 4u);
      EXPECT_LE(r.value, opt + 1e-12);
      if (b == DksBackend::Exact) EXPECT_NEAR(r.value, opt, 1e-12);
    }
  }
}

TEST(SolveDksh, UnweightedArityTwoWithoutRoundingIsDks) {
  Rng rng(33);
  auto g = random_hypergraph(rng, 8, 2, 12, false, false);
  SolverConfig c = exact_cfg();
  c.rounding_alpha = 1.0;
  c.size_band = 0.0;
  auto r = solve_dksh_unweighted(g, 0.5, c);
  EXPECT_NEAR(r.value, oracle::opt(g, 0.5, true).value, 1e-12);
}

TEST(SolveDksh, AllHeavyIsExact) {
  Rng rng(34);
  for (int it = 0; it < 20; ++it) {
    auto h = random_hypergraph(rng, 6, 2, 8, true, true);
    SolverConfig c;
    c.heavy_exponent = 60.0;  // threshold mu^60: every vertex is heavy
    auto r = solve_dksh_weighted(h, 0.5, c);
    // heavy labelings are enumerated at weight <= mu
    EXPECT_LE(r.relative_weight, 0.5 + 1e-9);
    EXPECT_NEAR(r.value, oracle::opt(h, 0.5, false).value, 1e-9);
  }
}

TEST(SolveDksh, FeasibleConsistentAndDominated) {
  Rng rng(35);
  for (int it = 0; it < 60; ++it) {
    std::size_t n = 3 + rng.below(7);
    int r = 1 + static_cast<int>(rng.below(3));
    auto h = random_hypergraph(rng, n, std::min<int>(r, static_cast<int>(n)), 1 + rng.below(10), true, true);
    double mu = 0.25 + 0.25 * static_cast<double>(rng.below(2));
    SolverConfig c = exact_cfg();
    c.seed = static_cast<std::uint64_t>(it);
    auto out = solve_dksh_weighted(h, mu, c);
    double limit = mu * (1 + out.eta);
    EXPECT_LE(out.relative_weight, limit + 1e-9);
    EXPECT_NEAR(out.value, oracle::value(out.labeling.bits, h), 1e-9);
    EXPECT_NEAR(out.relative_weight, oracle::weight(out.labeling.bits, h), 1e-9);
    EXPECT_LE(out.value, oracle::opt(h, limit, false).value + 1e-9);
  }
}

TEST(SolveDksh, EtaValidation) {
  auto h = Hypergraph::make(4, 2, {{0, 1}});
  SolverConfig c;
  c.eta = 0.01;
  EXPECT_THROW(solve_dksh_weighted(h, 0.5, c), DomainError);
  EXPECT_DOUBLE_EQ(default_eta(0.5), 0.5);
}

TEST(SolveSingleString, BetaTenOnOneEdge) {
  CspInstance c;
  c.graph = Hypergraph::make(2, 2, {{0, 1}});
  c.predicate = single_string_predicate("10");
  auto r = solve_single_string(c, 0.5, exact_cfg());
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_EQ(r.labeling.to_string(), "10");
}

TEST(SolveGeneral, SingleMinimalMatchesSingleString) {
  Rng rng(36);
  auto h = random_hypergraph(rng, 7, 2, 9, false, false);
  CspInstance c{h, and_predicate(2), 0.5, {}};
  auto a = solve_general(c, 0.5, exact_cfg());
  auto b = solve_single_string(c, 0.5, exact_cfg());
  EXPECT_LE(a.relative_weight, 0.5 * (1 + a.eta) + 1e-9);
  EXPECT_NEAR(a.value, oracle::value(a.labeling.bits, h, &c.predicate), 1e-12);
  EXPECT_LE(b.relative_weight, 0.5 * (1 + b.eta) + 1e-9);
}

TEST(SolveGeneral, OrOnStarBeatsSingleStrings) {
  auto g = Hypergraph::make(6, 2, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  CspInstance c{g, or_predicate(2), 0.5, {}};
  auto r = solve_general(c, 0.5, exact_cfg());
  for (const char* beta : {"01", "10", "11"}) {
    auto single = single_string_predicate(beta);
    EXPECT_GE(r.value, oracle::opt(g, 0.5, false, &single).value * std::pow(2.0, -8) - 1e-12);
  }
  EXPECT_GT(r.value, 0.0);
}

TEST(SolveGeneral, EmptyMinimalSet) {
  auto g = Hypergraph::make(3, 2, {{0, 1}});
  CspInstance c{g, Predicate(2, {0, 0, 0, 0}), 0.5, {}};
  EXPECT_DOUBLE_EQ(solve_general(c, 0.5, exact_cfg()).value, 0.0);
}

TEST(SolveGeneral, FloorOnRandomInstances) {
  Rng rng(37);
  int ok = 0, total = 0;
  for (int it = 0; it < 60; ++it) {
    std::size_t n = 4 + rng.below(5);
    int r = 1 + static_cast<int>(rng.below(3));
    CspInstance c;
    c.graph = random_hypergraph(rng, n, r, 2 + rng.below(8), false, false);
    std::vector<std::uint8_t> t(std::size_t{1} << r);
    for (auto& x : t) x = rng.bernoulli(0.4);
    c.predicate = Predicate(r, t);
    double mu = 0.5;
    SolverConfig cfg = exact_cfg();
    cfg.seed = static_cast<std::uint64_t>(it);
    auto out = solve_general(c, mu, cfg);
    EXPECT_LE(out.relative_weight, mu * (1 + out.eta) + 1e-9);
    EXPECT_NEAR(out.value, oracle::value(out.labeling.bits, c.graph, &c.predicate), 1e-12);
    double opt = oracle::opt(c.graph, mu, false, &c.predicate).value;
    EXPECT_LE(out.value, oracle::opt(c.graph, mu * (1 + out.eta), false, &c.predicate).value + 1e-9);
    ++total;
    if (out.value >= std::pow(2.0, -4 * r) * std::pow(mu, r - 1) * opt - 1e-12) ++ok;
  }
  EXPECT_GE(ok, static_cast<int>(0.9 * total));
}

TEST(SolveNegations, AllPositiveEqualsGeneral) {
  Rng rng(38);
  auto h = random_hypergraph(rng, 7, 2, 9, false, false);
  CspInstance c{h, neq_predicate(), 0.5, {}};
  auto a = solve_with_negations(c, 0.4, exact_cfg());
  EXPECT_NEAR(a.value, oracle::value(a.labeling.bits, h, &c.predicate), 1e-12);
  CspInstance d = c;
  d.negations.assign(h.edges.size(), {1, 1});
  auto b = solve_with_negations(d, 0.4, exact_cfg());
  EXPECT_EQ(a.labeling, b.labeling);
}

TEST(SolveNegations, HighBiasIsComplemented) {
  auto g = Hypergraph::make(4, 2, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CspInstance c{g, and_predicate(2), 0.75, {}};
  auto r = solve_with_negations(c, 0.75, exact_cfg());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.back().stage, "complemented");
  EXPECT_NEAR(r.value, oracle::value(r.labeling.bits, g, &c.predicate), 1e-12);
  double eta = resolve_eta(SolverConfig{}, 0.25);
  EXPECT_GE(r.relative_weight, 1.0 - 0.25 * (1 + eta) - 1e-9);
}

TEST(SolveNegations, SomePatternClassCarriesItsShare) {
  Rng rng(39);
  for (int it = 0; it < 20; ++it) {
    std::size_t n = 6;
    CspInstance c;
    c.graph = random_hypergraph(rng, n, 2, 8, false, false);
    c.predicate = and_predicate(2);
    for (std::size_t e = 0; e < c.graph.edges.size(); ++e)
      c.negations.push_back({rng.bernoulli(0.5) ? 1 : -1, rng.bernoulli(0.5) ? 1 : -1});
    auto best = oracle::opt(c.graph, 0.5, false, &c.predicate, &c.negations);
    std::map<std::uint32_t, double> share;
    double total = 0;
    for (std::size_t e = 0; e < c.graph.edges.size(); ++e)
      if (oracle::edge_ok(best.labeling, c.graph.edges[e], &c.predicate, &c.negations[e])) {
        share[signs_to_mask(c.negations[e])] += 1;
        total += 1;
      }
    double mx = 0;
    for (auto& [k, v] : share) mx = std::max(mx, v);
    EXPECT_GE(mx, total / 4.0);
    auto out = solve_with_negations(c, 0.5, exact_cfg());
    EXPECT_NEAR(out.value, oracle::value(out.labeling.bits, c.graph, &c.predicate, &c.negations), 1e-12);
  }
}

TEST(Determinism, ThreadsDoNotChangeOutput) {
  Rng rng(40);
  auto h = random_hypergraph(rng, 10, 3, 20, true, true);
  CspInstance c{h, or_predicate(3), 0.3, {}};
  SolverConfig a;
  a.seed = 9;
  SolverConfig b = a;
  b.threads = 4;
  auto x = solve_general(c, 0.3, a);
  auto y = solve_general(c, 0.3, b);
  EXPECT_EQ(x.labeling, y.labeling);
  EXPECT_EQ(x.value, y.value);
  auto z = solve_general(c, 0.3, a);
  EXPECT_EQ(x.labeling, z.labeling);
}
