#include "bcsp/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace bcsp {

void Hypergraph::validate() const {
  if (arity < 0) throw StructuralError("arity must be nonnegative");
  if (vertex_weights.size() != n) throw StructuralError("vertex_weights length must equal n");
  if (edge_weights.size() != edges.size()) throw StructuralError("edge_weights length must equal number of edges");
  bool positive = false;
  for (double w : vertex_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw StructuralError("vertex_weights must be finite and nonnegative");
    if (w > 0) positive = true;
  }
  if (n > 0 && !positive) throw StructuralError("vertex_weights must have a positive entry");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.empty() && !allow_empty_edges) throw StructuralError("edge " + std::to_string(i) + " is empty");
    if (static_cast<int>(e.size()) > arity)
      throw StructuralError("edge " + std::to_string(i) + " is longer than the arity");
    for (auto v : e)
      if (v >= n) throw StructuralError("edge " + std::to_string(i) + " has vertex index out of range");
    if (!(edge_weights[i] > 0.0) || !std::isfinite(edge_weights[i]))
      throw StructuralError("edge_weights must be positive");
  }
}

double Hypergraph::total_vertex_weight() const {
  double s = 0.0;
  for (double w : vertex_weights) s += w;
  return s;
}

double Hypergraph::total_edge_weight() const {
  double s = 0.0;
  for (double w : edge_weights) s += w;
  return s;
}

bool Hypergraph::uniform_weights() const {
  for (double w : vertex_weights)
    if (w != vertex_weights.front()) return false;
  return true;
}

std::vector<double> Hypergraph::normalized_weights() const {
  double t = total_vertex_weight();
  std::vector<double> w(vertex_weights);
  for (auto& x : w) x /= t;
  return w;
}

Hypergraph Hypergraph::make(std::size_t n, int arity, std::vector<Edge> edges, std::vector<double> edge_weights,
                            std::vector<double> vertex_weights, bool allow_empty) {
  Hypergraph h;
  h.n = n;
  h.arity = arity;
  h.edges = std::move(edges);
  h.edge_weights = edge_weights.empty() ? std::vector<double>(h.edges.size(), 1.0) : std::move(edge_weights);
  h.vertex_weights = vertex_weights.empty() ? std::vector<double>(n, 1.0) : std::move(vertex_weights);
  h.allow_empty_edges = allow_empty;
  h.validate();
  return h;
}

Labeling Labeling::from_string(const std::string& s) {
  Labeling l(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw StructuralError("labeling string must be binary");
    l.bits[i] = s[i] == '1';
  }
  return l;
}

Labeling Labeling::from_support(std::size_t n, const std::vector<std::uint32_t>& support) {
  Labeling l(n);
  for (auto v : support) {
    if (v >= n) throw StructuralError("support index out of range");
    l.bits[v] = 1;
  }
  return l;
}

std::size_t Labeling::count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

std::vector<std::uint32_t> Labeling::support() const {
  std::vector<std::uint32_t> s;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s.push_back(static_cast<std::uint32_t>(i));
  return s;
}

std::string Labeling::to_string() const {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s[i] = '1';
  return s;
}

Labeling Labeling::complemented() const {
  Labeling l(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) l.bits[i] = bits[i] ? 0 : 1;
  return l;
}

void CspInstance::validate() const {
  graph.validate();
  if (predicate.arity() != graph.arity) throw StructuralError("predicate arity must equal hypergraph arity");
  for (std::size_t i = 0; i < graph.edges.size(); ++i)
    if (static_cast<int>(graph.edges[i].size()) != graph.arity)
      throw StructuralError("edge " + std::to_string(i) + " length must equal the predicate arity");
  if (!negations.empty()) {
    if (negations.size() != graph.edges.size()) throw StructuralError("negations must have one entry per edge");
    for (const auto& s : negations) {
      if (static_cast<int>(s.size()) != graph.arity) throw StructuralError("negation pattern length must equal arity");
      for (int v : s)
        if (v != 1 && v != -1) throw StructuralError("negation entries must be +1 or -1");
    }
  }
  if (!(bias > 0.0 && bias <= 1.0)) throw StructuralError("bias must lie in (0, 1]");
}

bool CspInstance::has_negations() const {
  for (const auto& s : negations)
    for (int v : s)
      if (v == -1) return true;
  return false;
}

namespace {

void check_size(const Labeling& sigma, const Hypergraph& h) {
  if (sigma.size() != h.n)
    throw StructuralError("labeling length " + std::to_string(sigma.size()) + " does not match n = " +
                          std::to_string(h.n));
}

}  // namespace

double relative_weight(const Labeling& sigma, const Hypergraph& h) {
  check_size(sigma, h);
  double s = 0.0;
  for (std::size_t i = 0; i < h.n; ++i)
    if (sigma.bits[i]) s += h.vertex_weights[i];
  return s / h.total_vertex_weight();
}

double induced_weight(const Labeling& sigma, const Hypergraph& h) {
  check_size(sigma, h);
  double s = 0.0;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    bool all = true;
    for (auto v : h.edges[i])
      if (!sigma.bits[v]) {
        all = false;
        break;
      }
    if (all) s += h.edge_weights[i];
  }
  return s;
}

double value_dksh(const Labeling& sigma, const Hypergraph& h) {
  double t = h.total_edge_weight();
  double s = induced_weight(sigma, h);
  return t > 0 ? s / t : 0.0;
}

std::uint32_t edge_pattern(const Labeling& sigma, const Edge& e) {
  std::uint32_t p = 0;
  for (auto v : e) p = (p << 1) | (sigma.bits[v] ? 1u : 0u);
  return p;
}

double value_csp(const Labeling& sigma, const CspInstance& psi) {
  check_size(sigma, psi.graph);
  const auto& h = psi.graph;
  double s = 0.0;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    std::uint32_t p = edge_pattern(sigma, h.edges[i]);
    if (!psi.negations.empty()) p ^= signs_to_mask(psi.negations[i]);
    if (psi.predicate.accepts(p)) s += h.edge_weights[i];
  }
  double t = h.total_edge_weight();
  return t > 0 ? s / t : 0.0;
}

bool weight_feasible(double rel_weight, double mu, BiasMode mode, const Hypergraph& h) {
  if (mode == BiasMode::AtMost) return rel_weight <= mu + kTol;
  if (h.uniform_weights()) {
    double k = std::round(mu * static_cast<double>(h.n));
    return std::fabs(rel_weight * static_cast<double>(h.n) - k) <= 1e-6;
  }
  return std::fabs(rel_weight - mu) <= kTol;
}

ValueReport evaluate_dksh(const Labeling& sigma, const Hypergraph& h, double mu, BiasMode mode) {
  ValueReport r;
  r.value = value_dksh(sigma, h);
  r.relative_weight = relative_weight(sigma, h);
  r.feasible = weight_feasible(r.relative_weight, mu, mode, h);
  return r;
}

ValueReport evaluate_csp(const Labeling& sigma, const CspInstance& psi, double mu, BiasMode mode) {
  ValueReport r;
  r.value = value_csp(sigma, psi);
  r.relative_weight = relative_weight(sigma, psi.graph);
  r.feasible = weight_feasible(r.relative_weight, mu, mode, psi.graph);
  return r;
}

namespace {

// Enumerates labelings in lexicographic order (vertex 0 is the most significant
// bit of the counter) and keeps the first maximizer.
template <class Satisfied>
BruteForceResult brute_force_core(const Hypergraph& h, double mu, BiasMode mode, const BruteForceOptions& opt,
                                  Satisfied&& satisfied) {
  if (h.n > opt.cap)
    throw CapExceeded("brute force refused: n = " + std::to_string(h.n) + " exceeds cap " + std::to_string(opt.cap));
  if (!(mu >= 0.0)) throw DomainError("bias must be nonnegative");
  const std::size_t n = h.n;
  const double total_w = h.total_vertex_weight();
  const bool uniform = h.uniform_weights();
  long long exact_k = -1;
  if (mode == BiasMode::Exactly && uniform) {
    double k = mu * static_cast<double>(n);
    if (!near_integer(k)) throw DomainError("exactly mode needs mu*n integral, got " + std::to_string(k));
    exact_k = std::llround(k);
  }
  long long atmost_k = static_cast<long long>(std::floor(mu * static_cast<double>(n) + kTol));

  std::vector<std::uint64_t> vbit(n);
  for (std::size_t i = 0; i < n; ++i) vbit[i] = std::uint64_t{1} << (n - 1 - i);

  auto feasible = [&](std::uint64_t mask) {
    if (uniform) {
      long long c = std::popcount(mask);
      return mode == BiasMode::Exactly ? c == exact_k : c <= atmost_k;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & vbit[i]) s += h.vertex_weights[i];
    double rel = s / total_w;
    return mode == BiasMode::AtMost ? rel <= mu + kTol : std::fabs(rel - mu) <= kTol;
  };

  const std::uint64_t space = std::uint64_t{1} << n;
  int threads = std::max(1, opt.threads);
  std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), space));
  struct Best {
    bool found = false;
    std::uint64_t mask = 0;
    double score = 0.0;
  };
  std::vector<Best> best(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::uint64_t lo = space * c / chunks, hi = space * (c + 1) / chunks;
    Best b;
    for (std::uint64_t m = lo; m < hi; ++m) {
      if (!feasible(m)) continue;
      double s = 0.0;
      for (std::size_t e = 0; e < h.edges.size(); ++e)
        if (satisfied(e, m, vbit)) s += h.edge_weights[e];
      if (!b.found || s > b.score) {
        b.found = true;
        b.score = s;
        b.mask = m;
      }
    }
    best[c] = b;
  });
  Best g;
  for (const auto& b : best)
    if (b.found && (!g.found || b.score > g.score)) g = b;
  if (!g.found) throw DomainError("no labeling satisfies the bias constraint");

  BruteForceResult r;
  r.labeling = Labeling(n);
  for (std::size_t i = 0; i < n; ++i) r.labeling.bits[i] = (g.mask & vbit[i]) ? 1 : 0;
  double te = h.total_edge_weight();
  r.value = te > 0 ? g.score / te : 0.0;
  r.relative_weight = relative_weight(r.labeling, h);
  return r;
}

}  // namespace

BruteForceResult brute_force_opt(const Hypergraph& h, double mu, BiasMode mode, const BruteForceOptions& opt) {
  h.validate();
  std::vector<std::uint64_t> emask(h.edges.size(), 0);
  if (h.n <= 63)
    for (std::size_t e = 0; e < h.edges.size(); ++e)
      for (auto v : h.edges[e]) emask[e] |= std::uint64_t{1} << (h.n - 1 - v);
  return brute_force_core(h, mu, mode, opt, [&](std::size_t e, std::uint64_t m, const std::vector<std::uint64_t>&) {
    return (m & emask[e]) == emask[e];
  });
}

BruteForceResult brute_force_opt(const CspInstance& psi, double mu, BiasMode mode, const BruteForceOptions& opt) {
  psi.validate();
  const auto& h = psi.graph;
  std::vector<std::uint32_t> neg(h.edges.size(), 0);
  if (!psi.negations.empty())
    for (std::size_t e = 0; e < h.edges.size(); ++e) neg[e] = signs_to_mask(psi.negations[e]);
  return brute_force_core(h, mu, mode, opt, [&](std::size_t e, std::uint64_t m, const std::vector<std::uint64_t>& vb) {
    std::uint32_t p = 0;
    for (auto v : h.edges[e]) p = (p << 1) | ((m & vb[v]) ? 1u : 0u);
    return psi.predicate.accepts(p ^ neg[e]);
  });
}

Hypergraph with_uniform_weights(const Hypergraph& h) {
  Hypergraph g = h;
  g.vertex_weights.assign(h.n, 1.0);
  return g;
}

}  // namespace bcsp
