#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bcsp/common.hpp"
#include "bcsp/predicate.hpp"

namespace bcsp {

using Edge = std::vector<std::uint32_t>;

struct Hypergraph {
  std::size_t n = 0;
  int arity = 0;
  std::vector<double> vertex_weights;
  std::vector<Edge> edges;
  std::vector<double> edge_weights;
  bool allow_empty_edges = false;

  void validate() const;
  double total_vertex_weight() const;
  double total_edge_weight() const;
  bool uniform_weights() const;
  std::vector<double> normalized_weights() const;

  static Hypergraph make(std::size_t n, int arity, std::vector<Edge> edges, std::vector<double> edge_weights = {},
                         std::vector<double> vertex_weights = {}, bool allow_empty = false);
};

struct Labeling {
  std::vector<std::uint8_t> bits;

  Labeling() = default;
  explicit Labeling(std::size_t n) : bits(n, 0) {}
  explicit Labeling(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
  static Labeling from_string(const std::string& s);
  static Labeling from_support(std::size_t n, const std::vector<std::uint32_t>& support);

  std::size_t size() const { return bits.size(); }
  std::size_t count() const;
  std::vector<std::uint32_t> support() const;
  std::string to_string() const;
  bool operator[](std::size_t i) const { return bits[i] != 0; }
  Labeling complemented() const;

  friend bool operator==(const Labeling& a, const Labeling& b) { return a.bits == b.bits; }
};

struct CspInstance {
  Hypergraph graph;
  Predicate predicate;
  double bias = 0.5;
  std::vector<std::vector<int>> negations;  // empty or one sign vector per edge

  void validate() const;
  bool has_negations() const;
};

struct ValueReport {
  double value = 0.0;
  double relative_weight = 0.0;
  bool feasible = false;
};

enum class BiasMode { AtMost, Exactly };

double relative_weight(const Labeling& sigma, const Hypergraph& h);
double value_dksh(const Labeling& sigma, const Hypergraph& h);
double value_csp(const Labeling& sigma, const CspInstance& psi);
// Absolute satisfied edge weight.
double induced_weight(const Labeling& sigma, const Hypergraph& h);

bool weight_feasible(double rel_weight, double mu, BiasMode mode, const Hypergraph& h);
ValueReport evaluate_dksh(const Labeling& sigma, const Hypergraph& h, double mu, BiasMode mode);
ValueReport evaluate_csp(const Labeling& sigma, const CspInstance& psi, double mu, BiasMode mode);

// Edge pattern sigma(e) with coordinate j at bit (|e|-1-j).
std::uint32_t edge_pattern(const Labeling& sigma, const Edge& e);

struct BruteForceOptions {
  std::size_t cap = 22;
  int threads = 1;
};

struct BruteForceResult {
  Labeling labeling;
  double value = 0.0;
  double relative_weight = 0.0;
};

BruteForceResult brute_force_opt(const Hypergraph& h, double mu, BiasMode mode, const BruteForceOptions& opt = {});
BruteForceResult brute_force_opt(const CspInstance& psi, double mu, BiasMode mode, const BruteForceOptions& opt = {});

Hypergraph with_uniform_weights(const Hypergraph& h);

}  // namespace bcsp
