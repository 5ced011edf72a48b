#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcsp/io.hpp"

namespace bcsp {

struct SuiteOptions {
  std::size_t n_max = 0;  // 0: suite default
  std::uint64_t seed = 0;
  int threads = 1;
  int trials = 0;             // 0: suite default
  std::uint64_t samples = 0;  // 0: suite default
};

struct SuiteResult {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;  // first few only
  json metrics = json::object();

  bool ok() const { return failed == 0 && passed > 0; }
  void check(bool cond, const std::string& what);
};

// minimal-set, cl-red, subsample, cloud, clique, greedy-cover, dks-2csp, weighted,
// gadget-completeness, gamma, determinism
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt = {});
json to_json(const SuiteResult& r);

// Random edges of exactly `len` distinct vertices.
Hypergraph random_hypergraph(Rng& rng, std::size_t n, int len, std::size_t m, bool weighted_edges,
                             bool weighted_vertices);

double chi_square_pvalue(double stat, double dof);

}  // namespace bcsp
