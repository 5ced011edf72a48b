#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bcsp/instance.hpp"

namespace bcsp {

struct ReductionCertificate {
  std::string inequality;
  double source_value = 0.0;
  double target_value = 0.0;
  Labeling decoded;
  bool holds = false;
  std::vector<int> coordinate_order;
};

// DkSH on i*-uniform H -> biased CSP on psi through a minimal element beta.
struct DkshToPredicate {
  CspInstance instance;
  std::size_t source_n = 0;
  double source_bias = 0.0;
  double target_bias = 0.0;
  std::uint32_t beta = 0;
  int ones = 0;
  // Coordinates of beta's one-positions followed by its zero-positions.
  std::vector<int> coordinate_order;

  Labeling decode(const Labeling& target) const;
  ReductionCertificate certify(const Hypergraph& source, const Labeling& target) const;
};

DkshToPredicate dksh_to_predicate(const Hypergraph& h, const Predicate& psi, std::uint32_t beta, double mu);

// Truncates each edge to the one-positions of the single accepting string.
Hypergraph predicate_to_dksh(const CspInstance& psi);

std::vector<std::uint32_t> heavy_set(const Hypergraph& h, double mu, double exponent = 10.0);

struct HeavySplit {
  std::vector<std::uint32_t> heavy;
  std::vector<std::uint32_t> light;
  Hypergraph sub;
  double delta = 0.0;
  double labeled_weight = 0.0;   // w(sigma_T), normalized
  double light_weight = 0.0;     // w(V \ T), normalized
  double surviving_mass = 0.0;   // Pr_e[sigma_T(e|_T) = 1]

  Labeling concatenate(const std::vector<std::uint8_t>& sigma_t, const Labeling& pi) const;
};

// sigma_t[k] labels heavy[k].
HeavySplit heavy_vertex_split(const Hypergraph& h, double mu, double eta, const std::vector<std::uint32_t>& heavy,
                              const std::vector<std::uint8_t>& sigma_t);

struct CloudExpansion {
  Hypergraph expanded;
  std::vector<std::int64_t> cloud_size;
  std::vector<std::size_t> cloud_offset;
  std::int64_t N = 0;

  std::vector<std::int64_t> sample_indices(Rng& rng) const;
  Labeling decode(const Labeling& expanded_sigma, const std::vector<std::int64_t>& indices) const;
  Labeling decode(const Labeling& expanded_sigma, Rng& rng) const;
  // Expanded labeling that labels whole clouds as sigma does.
  Labeling lift(const Labeling& sigma) const;
};

inline constexpr std::int64_t kCloudCap = 1'000'000;
inline constexpr std::size_t kCloudEdgeCap = 4'000'000;

std::int64_t minimal_cloud_denominator(const std::vector<double>& normalized_weights, std::int64_t cap = kCloudCap);
CloudExpansion cloud_expansion(const Hypergraph& h, std::int64_t cap = kCloudCap);
CloudExpansion cloud_expansion_with_sizes(const Hypergraph& h, std::vector<std::int64_t> sizes, std::int64_t N,
                                          std::size_t edge_cap = kCloudEdgeCap);

// One weighted pair edge per (hyperedge, pair); weight mu^{l-2} w / C(l,2) with l the edge length.
Hypergraph clique_expansion(const Hypergraph& h, double mu, bool dedupe_tuples = false);

struct Max2CspInstance {
  struct Constraint {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<double> weights;
  };
  std::size_t n_vars = 0;
  std::size_t label_size = 0;
  std::vector<Constraint> constraints;

  void validate() const;
  double value(const std::vector<std::uint32_t>& labels) const;
};

struct DksPartition {
  std::vector<std::vector<std::uint32_t>> blocks;  // block i, position a -> vertex
  std::size_t n = 0;

  Labeling decode(const std::vector<std::uint32_t>& labels) const;
  // Labels that pick the S-members of each block where possible.
  std::vector<std::uint32_t> encode(const Labeling& s) const;
};

struct DksToMax2Csp {
  Max2CspInstance instance;
  DksPartition partition;
};

DksToMax2Csp dks_to_max2csp(const Hypergraph& g, double mu, std::uint64_t seed);

enum class RescaleDirection { Pad, Subsample };

Labeling rescale_pad(const Labeling& s, std::size_t target);
Labeling rescale_subsample(const Labeling& s, std::size_t target, Rng& rng);

struct BiasRescale {
  std::size_t n = 0;
  std::size_t from_size = 0;
  std::size_t to_size = 0;
  RescaleDirection direction = RescaleDirection::Pad;

  Labeling apply(const Labeling& s, std::uint64_t seed) const;
};

BiasRescale bias_rescale(const Hypergraph& h, double from_bias, double to_bias, RescaleDirection direction);

}  // namespace bcsp
