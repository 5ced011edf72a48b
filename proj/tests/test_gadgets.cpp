#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bcsp/gadgets.hpp"
#include "bcsp/gaussian.hpp"

using namespace bcsp;

namespace {

TabulatedFunction random_table(int dims, double mu, Rng& rng) {
  TabulatedFunction f{ProductSpace::biased_cube(dims, mu), {}};
  f.table.resize(f.domain.size());
  for (auto& v : f.table) v = rng.uniform();
  return f;
}

GadgetParams cube_params(int r, double mu, double rho, int R) {
  GadgetParams p;
  p.r = r;
  p.mu = mu;
  p.rho = rho;
  p.R = R;
  return p;
}

}  // namespace

TEST(Sampling, CorrelatedExtremes) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    auto w = sample_correlated({0.3, 0.7}, 4, 1.0, rng);
    for (auto x : w) EXPECT_EQ(x, w[0]);
  }
  int agree = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto w = sample_correlated({0.5, 0.5}, 2, 0.0, rng);
    agree += w[0] == w[1];
  }
  EXPECT_NEAR(agree / double(n), 0.5, 3 * std::sqrt(0.25 / n) + 1e-3);
}

TEST(Sampling, CorrelatedCovariance) {
  Rng rng(2);
  const double mu = 0.3, rho = 0.5;
  const int n = 200000;
  double sa = 0, sb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    auto w = sample_correlated({1 - mu, mu}, 2, rho, rng);
    sa += static_cast<double>(w[0]);
    sb += static_cast<double>(w[1]);
    sab += static_cast<double>(w[0] * w[1]);
  }
  double cov = sab / n - (sa / n) * (sb / n);
  double want = rho * mu * (1 - mu);
  // Var of the product indicator bounds the estimator's spread.
  double sigma = std::sqrt((mu * (rho + (1 - rho) * mu)) / n);
  EXPECT_NEAR(cov, want, 3 * sigma);
}

TEST(Hypercube, MarginalsAreBiased) {
  Rng rng(3);
  auto p = cube_params(3, 0.2, 0.6, 4);
  for (auto v : {HypercubeVariant::IndependentCopies, HypercubeVariant::SharedTheta}) {
    double ones = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
      auto e = sample_noisy_hypercube_edge(p, v, rng);
      ones += e[1][2];
    }
    EXPECT_NEAR(ones / n, 0.2, 3 * std::sqrt(0.16 / n));
  }
}

TEST(Hypercube, SharedThetaDictatorExample) {
  auto p = cube_params(2, 0.1, 0.5, 3);
  EXPECT_NEAR(hypercube_dictator_closed_form(p, HypercubeVariant::SharedTheta), 0.0325, 1e-15);
  EXPECT_NEAR(hypercube_acceptance_exact(p, HypercubeVariant::SharedTheta, CubeAssignment::dictator(0)), 0.0325, 1e-12);
}

TEST(Hypercube, ExactMatchesClosedFormAndLaw) {
  for (double rho : {0.0, 0.3, 0.8, 1.0})
    for (int r : {1, 2, 3}) {
      auto p = cube_params(r, 0.3, rho, 3);
      for (auto v : {HypercubeVariant::IndependentCopies, HypercubeVariant::SharedTheta}) {
        double exact = hypercube_acceptance_exact(p, v, CubeAssignment::dictator(1));
        EXPECT_NEAR(exact, hypercube_dictator_closed_form(p, v), 1e-12);
        auto law = hypercube_coordinate_law(p, v);
        double total = 0;
        for (double x : law) total += x;
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NEAR(law.back(), exact, 1e-12);
      }
      auto p2 = p;
      EXPECT_GE(hypercube_dictator_closed_form(p2, HypercubeVariant::IndependentCopies),
                0.3 * std::pow(rho, r) - 1e-12);
    }
}

TEST(Hypercube, ConstantOneAlwaysAccepts) {
  auto p = cube_params(3, 0.2, 0.5, 4);
  EXPECT_DOUBLE_EQ(hypercube_acceptance_exact(p, HypercubeVariant::SharedTheta, CubeAssignment::constant_value(1.0)),
                   1.0);
  auto e = mc_acceptance([](Rng&) { return 1.0; }, 10000, 0);
  EXPECT_DOUBLE_EQ(e.estimate, 1.0);
  EXPECT_DOUBLE_EQ(e.std_error, 0.0);
}

TEST(Hypercube, MonteCarloWithinThreeSigma) {
  auto p = cube_params(2, 0.3, 0.7, 3);
  for (auto v : {HypercubeVariant::IndependentCopies, HypercubeVariant::SharedTheta}) {
    auto f = CubeAssignment::dictator(0);
    auto e = mc_acceptance(
        [&](Rng& rng) {
          auto edge = sample_noisy_hypercube_edge(p, v, rng);
          double a = 1;
          for (const auto& x : edge) a *= f(x);
          return a;
        },
        200000, 5);
    EXPECT_NEAR(e.estimate, hypercube_dictator_closed_form(p, v), 3 * e.std_error);
  }
}

TEST(Influence, DictatorExample) {
  TabulatedFunction f{ProductSpace::biased_cube(2, 0.3), {}};
  f.table.resize(4);
  for (std::size_t i = 0; i < 4; ++i) f.table[i] = static_cast<double>(f.domain.point(i)[0]);
  EXPECT_NEAR(influence(f, 0), 0.21, 1e-12);
  EXPECT_NEAR(influence(f, 1), 0.0, 1e-15);
  TabulatedFunction c{ProductSpace::biased_cube(3, 0.3), std::vector<double>(8, 0.4)};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(influence(c, i), 0.0, 1e-15);
}

TEST(Influence, BoundedInfluentialCoordinates) {
  Rng rng(6);
  for (int it = 0; it < 20; ++it) {
    auto f = random_table(8, 0.3, rng);
    for (double eta : {0.1, 0.3})
      for (double tau : {0.001, 0.01}) EXPECT_LE(static_cast<double>(count_influential(f, eta, tau)), 1.0 / (eta * tau));
  }
}

TEST(NoiseOperator, IdentityConstantAndSemigroup) {
  Rng rng(7);
  auto f = random_table(6, 0.3, rng);
  auto t1 = noise_operator(f, 1.0);
  for (std::size_t i = 0; i < f.table.size(); ++i) EXPECT_NEAR(t1.table[i], f.table[i], 1e-12);
  auto t0 = noise_operator(f, 0.0);
  for (double v : t0.table) EXPECT_NEAR(v, f.expectation(), 1e-12);
  EXPECT_NEAR(noise_operator(f, 0.6).expectation(), f.expectation(), 1e-12);
  auto ab = noise_operator(noise_operator(f, 0.7), 0.4);
  auto direct = noise_operator(f, 0.28);
  for (std::size_t i = 0; i < f.table.size(); ++i) EXPECT_NEAR(ab.table[i], direct.table[i], 1e-12);
}

TEST(NoiseOperator, CapEnforced) {
  TabulatedFunction big{ProductSpace::biased_cube(21, 0.5), {}};
  EXPECT_THROW(big.domain.size(), CapExceeded);
}

TEST(Sse, DictatorStrategyCases) {
  std::vector<std::uint8_t> in_s = {1, 1, 0, 0};
  auto one = dictator_strategy({0, 2, 3}, {1, 1, 1}, in_s);
  EXPECT_TRUE(one.singleton);
  EXPECT_EQ(one.index, 0u);
  auto two = dictator_strategy({2, 1, 3}, {1, 1, 0}, in_s);
  EXPECT_TRUE(two.singleton);
  EXPECT_EQ(two.index, 1u);
  auto none = dictator_strategy({2, 3, 0}, {1, 1, 0}, in_s);
  EXPECT_FALSE(none.singleton);
  EXPECT_TRUE(none.pi_set.empty());
  EXPECT_EQ(none.index, 0u);
}

TEST(Sse, WalkStaysInsideClosedSet) {
  auto g = SmallGraph::two_cliques(3);
  GadgetParams p;
  p.R = 4;
  p.r = 2;
  p.eta = 0.0;
  Rng rng(8);
  for (int k = 0; k < 2000; ++k) {
    auto d = sse_test_sample(g, p, rng);
    for (std::size_t j = 0; j < d.B.size(); ++j)
      for (std::size_t i = 0; i < d.A.size(); ++i) EXPECT_EQ(d.A[i] < 3, d.B[j][i] < 3);
  }
}

TEST(Sse, LeakageAndThetaSemantics) {
  auto g = SmallGraph::two_cliques(3);
  GadgetParams p;
  p.R = 4;
  p.r = 3;
  p.eta = 0.0;
  p.rho = 1.0;
  p.beta = 0.999999;
  Rng rng(9);
  for (int k = 0; k < 500; ++k) {
    auto d = sse_test_sample(g, p, rng);
    for (std::size_t j = 0; j < d.xj.size(); ++j) {
      EXPECT_EQ(d.xj[j], d.x);
      EXPECT_EQ(d.zj[j], d.z);
      for (std::size_t i = 0; i < d.A.size(); ++i)
        if (d.zprime[j][i]) {
          EXPECT_EQ(d.leaked[j].B[i], d.B[j][i]);
          EXPECT_EQ(d.leaked[j].x[i], d.xhat[j][i]);
        }
    }
  }
}

TEST(Sse, PiInvariantUnderLeakageAndPermutation) {
  auto g = SmallGraph::two_cliques(3);
  std::vector<std::uint8_t> in_s = {1, 1, 1, 0, 0, 0};
  GadgetParams p;
  p.R = 3;
  p.r = 2;
  p.eta = 0.1;
  Rng rng(10);
  for (int k = 0; k < 5000; ++k) {
    auto d = sse_test_sample(g, p, rng);
    for (std::size_t j = 0; j < d.leaked.size(); ++j) {
      auto before = dictator_strategy(d.B[j], d.zprime[j], in_s);
      auto after = dictator_strategy(d.leaked[j].B, d.leaked[j].z, in_s);
      EXPECT_EQ(before.pi_set, after.pi_set);
      auto q = d.queries[j];
      auto cq = dictator_strategy(q.B, q.z, in_s);
      auto cl = dictator_strategy(d.leaked[j].B, d.leaked[j].z, in_s);
      if (cl.singleton) {
        EXPECT_TRUE(cq.singleton);
        EXPECT_EQ(q.x[cq.index], d.leaked[j].x[cl.index]);
      }
    }
  }
}

TEST(Sse, MonteCarloMatchesExactEnumeration) {
  auto g = SmallGraph::two_cliques(3);
  std::vector<std::uint8_t> in_s = {1, 1, 1, 0, 0, 0};
  GadgetParams p;
  p.R = 3;
  p.r = 2;
  p.mu = 0.3;
  p.rho = 0.6;
  p.eta = 0.1;
  p.beta = 0.6;
  double exact = sse_dictator_exact(g, in_s, p);
  auto e = mc_acceptance(
      [&](Rng& rng) { return sse_dictator_acceptance(sse_test_sample(g, p, rng), in_s); }, 200000, 11);
  EXPECT_NEAR(e.estimate, exact, 3 * e.std_error);
}

TEST(Sse, CapsEnforced) {
  GadgetParams p;
  p.R = 17;
  Rng rng(0);
  EXPECT_THROW(sse_test_sample(SmallGraph::cycle(5), p, rng), CapExceeded);
  p.R = 6;
  p.r = 2;
  std::vector<std::uint8_t> s(6, 0);
  EXPECT_THROW(sse_dictator_exact(SmallGraph::cycle(6), s, p), CapExceeded);
}

TEST(Ug, DictatorIsFoldedWithUniformLabels) {
  for (std::size_t i = 0; i < 3; ++i) {
    auto f = LongCode::dictator(3, 4, i);
    EXPECT_TRUE(f.is_folded());
  }
  Rng rng(12);
  for (int it = 0; it < 10; ++it) {
    auto f = LongCode::random(3, 4, rng).folded();
    EXPECT_TRUE(f.is_folded());
    for (double x : f.label_distribution()) EXPECT_NEAR(x, 0.25, 1e-12);
  }
}

TEST(Ug, PerfectCompletenessAtRhoOne) {
  std::vector<std::uint32_t> sigma;
  auto inst = UgInstance::planted_cycle(6, 3, 5, &sigma);
  EXPECT_DOUBLE_EQ(inst.satisfied_fraction(sigma), 1.0);
  GadgetParams p;
  p.r = 3;
  p.t = 3;
  p.label_size = 4;
  p.rho = 1.0;
  p.eta = 0.0;
  std::vector<LongCode> codes;
  for (auto s : sigma) codes.push_back(LongCode::dictator(3, 4, s));
  Rng rng(13);
  for (int k = 0; k < 2000; ++k) EXPECT_TRUE(ug_accepts(ug_test_sample(inst, p, rng), codes, true));
}

TEST(Ug, CompletenessBound) {
  std::vector<std::uint32_t> sigma;
  auto inst = UgInstance::planted_cycle(6, 3, 6, &sigma);
  GadgetParams p;
  p.r = 3;
  p.t = 3;
  p.label_size = 4;
  p.rho = 0.9;
  p.eta = 0.05;
  std::vector<LongCode> codes;
  for (auto s : sigma) codes.push_back(LongCode::dictator(3, 4, s));
  auto e = mc_acceptance([&](Rng& rng) { return ug_accepts(ug_test_sample(inst, p, rng), codes, true) ? 1.0 : 0.0; },
                         100000, 14);
  EXPECT_GE(e.estimate, ug_completeness_bound(p) - 3 * e.std_error);
  EXPECT_NEAR(ug_completeness_bound(p), 0.9 * 0.85, 1e-12);
}

TEST(Ug, CapsEnforced) {
  auto inst = UgInstance::planted_cycle(5, 3, 0, nullptr);
  GadgetParams p;
  p.t = 9;
  Rng rng(0);
  EXPECT_THROW(ug_test_sample(inst, p, rng), CapExceeded);
  p.t = 2;
  EXPECT_THROW(ug_test_sample(inst, p, rng), DomainError);
}

TEST(McAcceptance, DeterministicAcrossThreads) {
  auto p = cube_params(2, 0.2, 0.5, 4);
  auto trial = [&](Rng& rng) {
    auto edge = sample_noisy_hypercube_edge(p, HypercubeVariant::SharedTheta, rng);
    return static_cast<double>(edge[0][0] * edge[1][0]);
  };
  auto a = mc_acceptance(trial, 50000, 3, 1);
  auto b = mc_acceptance(trial, 50000, 3, 4);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Params, Validation) {
  GadgetParams p;
  EXPECT_NO_THROW(p.validate());
  p.mu = 1.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = GadgetParams{};
  p.rho = 1.5;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_NEAR(default_rho(3, 1.0 / 16, 1.0), 1.0 / (2 * 9 * std::log(16.0)), 1e-15);
}

TEST(Gaussian, QuantileTable) {
  const std::pair<double, double> table[] = {
      {0.5, 0.0}, {0.975, 1.959963984540054}, {0.9, 1.2815515655446004}, {0.01, -2.3263478740408408},
      {1e-6, -4.753424308822899}};
  for (auto [p, z] : table) EXPECT_NEAR(normal_quantile(p), z, 1e-9);
  for (double p : {1e-10, 0.001, 0.3, 0.77, 0.999}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(Gaussian, StabilityExamples) {
  EXPECT_NEAR(gaussian_stability2(0.0, 0.3, 0.5), 0.15, 1e-9);
  EXPECT_NEAR(gaussian_stability2(0.5, 0.5, 0.5), 0.25 + std::asin(0.5) / (2 * std::numbers::pi), 1e-9);
  EXPECT_NEAR(gaussian_stability2(0.5, 0.5, 0.5), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(gaussian_stability2(0.4, 0.2, 0.7), gaussian_stability2(0.4, 0.7, 0.2), 1e-12);
  EXPECT_DOUBLE_EQ(gaussian_stability2(0.4, 0.0, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(gaussian_stability2(0.4, 1.0, 0.7), 0.7);
  EXPECT_THROW(gaussian_stability(1.0, {0.5, 0.5}), DomainError);
  EXPECT_THROW(gaussian_stability(0.5, {}), DomainError);
}

TEST(Gaussian, StabilityMatchesMonteCarlo) {
  Rng rng(15);
  const double rho = 0.6, m1 = 0.2, m2 = 0.4;
  double h = normal_quantile(m1), k = normal_quantile(m2);
  const int n = 400000;
  int hit = 0;
  for (int i = 0; i < n; ++i) {
    double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform(), u4 = rng.uniform();
    double g1 = std::sqrt(-2 * std::log1p(-u1)) * std::cos(2 * std::numbers::pi * u2);
    double g2 = std::sqrt(-2 * std::log1p(-u3)) * std::cos(2 * std::numbers::pi * u4);
    double y = rho * g1 + std::sqrt(1 - rho * rho) * g2;
    hit += g1 <= h && y <= k;
  }
  double want = gaussian_stability2(rho, m1, m2);
  EXPECT_NEAR(hit / double(n), want, 3 * std::sqrt(want * (1 - want) / n));
}

TEST(Gaussian, MonotoneInRhoAndIterated) {
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double b : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      double prev = -1;
      for (double rho = 0.0; rho < 0.99; rho += 0.1) {
        double v = gaussian_stability2(rho, a, b);
        EXPECT_GE(v, prev - 1e-12);
        prev = v;
      }
    }
  double mu = 1.0 / 16;
  EXPECT_NEAR(gaussian_stability(0.3, {0.2, 0.4, 0.6}),
              gaussian_stability2(0.3, 0.2, gaussian_stability2(0.3, 0.4, 0.6)), 1e-14);
  for (double c : {1.0, 2.0, 4.0}) {
    double rho = default_rho(3, mu, c);
    EXPECT_LE(gaussian_stability(rho, {mu, mu, mu}), 3 * mu * mu * mu);
  }
}
