#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bcsp/common.hpp"

namespace bcsp {

using BitString = std::vector<std::uint8_t>;

struct GadgetParams {
  double mu = 0.1;
  double rho = 0.5;
  double beta = 0.5;
  double eta = 0.0;
  int r = 2;
  int R = 4;
  int t = 2;
  int label_size = 2;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string rho_formula = "input";
  double c_prime = 2.0;
  // diagnostic only
  double nu = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double M = 0.0;

  void validate() const;
};

double default_rho(int r, double mu, double c_prime = 2.0);

std::vector<std::size_t> sample_correlated(const std::vector<double>& gamma, int r, double rho, Rng& rng);

enum class HypercubeVariant { IndependentCopies, SharedTheta };

HypercubeVariant parse_hypercube_variant(const std::string& s);
std::string to_string(HypercubeVariant v);

std::vector<BitString> sample_noisy_hypercube_edge(const GadgetParams& p, HypercubeVariant v, Rng& rng);

// Law of (x_1(i), .., x_r(i)) for one coordinate; pattern bit j-1 <-> copy j at bit (r-j).
std::vector<double> hypercube_coordinate_law(const GadgetParams& p, HypercubeVariant v);

struct CubeAssignment {
  enum class Kind { Dictator, Constant, Table };
  Kind kind = Kind::Dictator;
  std::size_t coordinate = 0;
  double constant = 1.0;
  std::vector<double> table;  // index: bit i of the index is x(i)

  double operator()(const BitString& x) const;
  static CubeAssignment dictator(std::size_t i);
  static CubeAssignment constant_value(double v);
};

double hypercube_acceptance_exact(const GadgetParams& p, HypercubeVariant v, const CubeAssignment& f);
double hypercube_dictator_closed_form(const GadgetParams& p, HypercubeVariant v);

inline constexpr std::size_t kTableCap = std::size_t{1} << 20;

struct ProductSpace {
  std::vector<std::vector<double>> measures;

  std::size_t size() const;
  std::size_t dims() const { return measures.size(); }
  std::vector<std::size_t> point(std::size_t index) const;
  double probability(std::size_t index) const;
  static ProductSpace biased_cube(int dims, double mu);
  static ProductSpace uniform(int dims, int q);
};

struct TabulatedFunction {
  ProductSpace domain;
  std::vector<double> table;  // coordinate 0 varies fastest

  void validate() const;
  double expectation() const;
};

double influence(const TabulatedFunction& f, std::size_t i);
TabulatedFunction noise_operator(const TabulatedFunction& f, double rho);
std::size_t count_influential(const TabulatedFunction& f, double eta, double tau);

struct SmallGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> adj;

  void validate() const;
  std::vector<double> stationary() const;
  static SmallGraph two_cliques(std::size_t m);
  static SmallGraph cycle(std::size_t n);
};

struct SsePoint {
  std::vector<std::uint32_t> B;
  BitString x;
  BitString z;  // 1 is top
};

struct SseDraw {
  std::vector<std::uint32_t> A;
  BitString x, z, theta;
  std::vector<std::vector<std::uint32_t>> B;
  std::vector<BitString> xj, zj, xhat, zprime;
  std::vector<SsePoint> leaked;
  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<SsePoint> queries;
};

SseDraw sse_test_sample(const SmallGraph& g, const GadgetParams& p, Rng& rng);
SsePoint permute_point(const SsePoint& q, const std::vector<std::uint32_t>& perm);

struct DictatorChoice {
  std::vector<std::uint32_t> pi_set;
  std::size_t index = 0;
  bool singleton = false;
};

DictatorChoice dictator_strategy(const std::vector<std::uint32_t>& A, const BitString& z,
                                 const std::vector<std::uint8_t>& in_s);
double sse_dictator_acceptance(const SseDraw& d, const std::vector<std::uint8_t>& in_s);
// Exact acceptance of the dictator strategy by enumerating per-coordinate states; (4^r)^R <= 2^20.
double sse_dictator_exact(const SmallGraph& g, const std::vector<std::uint8_t>& in_s, const GadgetParams& p);

struct UgInstance {
  struct Arc {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::vector<std::uint32_t> perm;  // sigma(v) = perm[sigma(u)]
  };
  std::size_t n = 0;
  std::size_t labels = 0;
  std::vector<Arc> arcs;

  void validate() const;
  // (w, pi_{w->v}) for every arc touching v
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> neighbors(std::uint32_t v) const;
  double satisfied_fraction(const std::vector<std::uint32_t>& sigma) const;
  static UgInstance planted_cycle(std::size_t n, std::size_t labels, std::uint64_t seed,
                                  std::vector<std::uint32_t>* planted);
};

struct LongCode {
  std::size_t t = 0;
  std::size_t R = 0;
  std::vector<std::uint32_t> table;  // coordinate 0 varies fastest

  std::uint32_t operator()(const std::vector<std::uint32_t>& z) const;
  LongCode folded() const;
  bool is_folded() const;
  std::vector<double> label_distribution() const;
  static LongCode dictator(std::size_t t, std::size_t R, std::size_t i);
  static LongCode random(std::size_t t, std::size_t R, Rng& rng);
};

struct UgDraw {
  std::uint32_t v = 0;
  std::vector<std::uint32_t> w;
  std::vector<std::vector<std::uint32_t>> perms;  // pi_{w_j -> v}
  std::vector<std::uint32_t> z;
  BitString theta;
  std::vector<std::vector<std::uint32_t>> zj, zprime, queries;
};

UgDraw ug_test_sample(const UgInstance& inst, const GadgetParams& p, Rng& rng);
bool ug_accepts(const UgDraw& d, const std::vector<LongCode>& codes, bool fold);
double ug_completeness_bound(const GadgetParams& p, double eps_c = 0.0);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

inline constexpr std::uint64_t kMcBatch = 4096;

// Trial returns the acceptance value in [0,1] of one draw.
McEstimate mc_acceptance(const std::function<double(Rng&)>& trial, std::uint64_t samples, std::uint64_t seed,
                         int threads = 1);

}  // namespace bcsp
