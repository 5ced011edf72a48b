#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bcsp/instance.hpp"
#include "bcsp/reductions.hpp"

namespace bcsp {

enum class DksBackend { Exact, GreedyPeel, Via2Csp };

std::string to_string(DksBackend b);
DksBackend parse_dks_backend(const std::string& s);

struct SolverConfig {
  std::uint64_t seed = 0;
  int repetitions = 0;          // 0: ceil((1/mu)^r) capped at max_repetitions
  int max_repetitions = 10000;
  double eta = 0.0;             // 0: default for the bias
  DksBackend dks_backend = DksBackend::GreedyPeel;
  double heavy_exponent = 10.0;
  double bounded_exponent = 8.0;
  double size_band = 0.2;
  double rounding_alpha = 0.0;  // 0: 2/r
  double cleanup_epsilon = 0.5;
  std::size_t heavy_cap = 20;
  std::size_t cloud_budget = 64;
  std::size_t brute_force_cap = 22;
  int partition_trials = 8;
  std::size_t max2csp_exact_cap = std::size_t{1} << 20;
  int threads = 1;
};

double default_eta(double mu);
double resolve_eta(const SolverConfig& cfg, double mu);
int resolve_repetitions(const SolverConfig& cfg, double mu, int arity);

struct TraceEntry {
  std::string stage;
  double value = 0.0;
  double relative_weight = 0.0;
  std::map<std::string, double> metrics;
};

struct SolveResult {
  Labeling labeling;
  double value = 0.0;
  double relative_weight = 0.0;
  double bias = 0.0;
  double eta = 0.0;
  double weight_limit = 0.0;
  double slack_used = 0.0;  // relative_weight / bias - 1
  std::vector<TraceEntry> trace;
};

Labeling subsample_half(const Labeling& sigma, Rng& rng);
Labeling subsample_half(const Labeling& sigma, std::uint64_t seed);

Labeling greedy_dksh1(const Hypergraph& h, std::size_t k);

struct Max2CspSolution {
  std::vector<std::uint32_t> labels;
  double value = 0.0;
  bool exact = false;
};

Max2CspSolution solve_max2csp_exact(const Max2CspInstance& inst, std::size_t cap = std::size_t{1} << 22);
Max2CspSolution solve_max2csp_greedy(const Max2CspInstance& inst);

SolveResult solve_dks(const Hypergraph& g, double mu, const SolverConfig& cfg);
SolveResult solve_dks_k(const Hypergraph& g, std::size_t k, const SolverConfig& cfg);
SolveResult solve_dksh_unweighted(const Hypergraph& h, double mu, const SolverConfig& cfg);
SolveResult solve_dksh_bounded(const Hypergraph& h, double mu, const SolverConfig& cfg);
SolveResult solve_dksh_weighted(const Hypergraph& h, double mu, const SolverConfig& cfg);
SolveResult solve_single_string(const CspInstance& psi, double mu, const SolverConfig& cfg);
SolveResult solve_general(const CspInstance& psi, double mu, const SolverConfig& cfg);
SolveResult solve_with_negations(const CspInstance& psi, double mu, const SolverConfig& cfg);

// Rounding step of the unweighted pipeline: x_i = 1_S(i) w.p. alpha, else Bernoulli(mu).
Labeling round_dks_set(const Labeling& s, double alpha, double mu, Rng& rng);

}  // namespace bcsp
