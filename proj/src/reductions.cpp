#include "bcsp/reductions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace bcsp {

namespace {

std::size_t integral_size(double mu, std::size_t n, const std::string& what) {
  double k = mu * static_cast<double>(n);
  if (!near_integer(k)) throw DomainError(what + ": mu*n = " + std::to_string(k) + " is not integral");
  return static_cast<std::size_t>(std::llround(k));
}

// Appends (edge, weight) merging identical tuples, keeping first-appearance order.
struct EdgeMerger {
  std::map<Edge, std::size_t> index;
  std::vector<Edge> edges;
  std::vector<double> weights;

  void add(Edge e, double w) {
    auto it = index.find(e);
    if (it != index.end()) {
      weights[it->second] += w;
      return;
    }
    index.emplace(e, edges.size());
    edges.push_back(std::move(e));
    weights.push_back(w);
  }
};

}  // namespace

DkshToPredicate dksh_to_predicate(const Hypergraph& h, const Predicate& psi, std::uint32_t beta, double mu) {
  h.validate();
  auto mins = minimal_elements(psi);
  if (std::find(mins.begin(), mins.end(), beta) == mins.end())
    throw DomainError("beta " + pattern_string(beta, psi.arity()) + " is not a minimal element of the predicate");
  const int r = psi.arity();
  const int ones = hamming_weight(beta);
  if (h.arity != ones) throw StructuralError("hypergraph arity must equal the weight of beta");
  for (const auto& e : h.edges)
    if (static_cast<int>(e.size()) != ones) throw StructuralError("hypergraph must be uniform of arity |beta|");

  DkshToPredicate red;
  red.source_n = h.n;
  red.source_bias = mu;
  red.beta = beta;
  red.ones = ones;
  std::vector<int> one_pos, zero_pos;
  for (int j = 0; j < r; ++j) (beta >> (r - 1 - j) & 1u ? one_pos : zero_pos).push_back(j);
  red.coordinate_order = one_pos;
  red.coordinate_order.insert(red.coordinate_order.end(), zero_pos.begin(), zero_pos.end());

  const std::size_t dummies = zero_pos.size();
  const double n = static_cast<double>(h.n);
  const double scale = n / h.total_vertex_weight();
  Hypergraph g;
  g.n = h.n + dummies;
  g.arity = r;
  g.vertex_weights.reserve(g.n);
  for (double w : h.vertex_weights) g.vertex_weights.push_back(w * scale);
  for (std::size_t t = 0; t < dummies; ++t) g.vertex_weights.push_back(n);
  for (const auto& e : h.edges) {
    Edge f(static_cast<std::size_t>(r));
    for (std::size_t k = 0; k < one_pos.size(); ++k) f[static_cast<std::size_t>(one_pos[k])] = e[k];
    for (std::size_t t = 0; t < dummies; ++t)
      f[static_cast<std::size_t>(zero_pos[t])] = static_cast<std::uint32_t>(h.n + t);
    g.edges.push_back(std::move(f));
  }
  g.edge_weights = h.edge_weights;
  g.validate();

  red.target_bias = mu / static_cast<double>(r - ones + 1);
  red.instance.graph = std::move(g);
  red.instance.predicate = psi;
  red.instance.bias = red.target_bias;
  red.instance.validate();
  return red;
}

Labeling DkshToPredicate::decode(const Labeling& target) const {
  if (target.size() != instance.graph.n) throw StructuralError("labeling length does not match reduced instance");
  Labeling s(source_n);
  for (std::size_t i = 0; i < source_n; ++i) s.bits[i] = target.bits[i];
  std::size_t k = static_cast<std::size_t>(std::floor(source_bias * static_cast<double>(source_n) + kTol));
  std::size_t c = s.count();
  for (std::size_t i = 0; i < source_n && c < k; ++i)
    if (!s.bits[i]) {
      s.bits[i] = 1;
      ++c;
    }
  return s;
}

ReductionCertificate DkshToPredicate::certify(const Hypergraph& source, const Labeling& target) const {
  ReductionCertificate c;
  c.inequality = "Val(decoded, H) >= Val(target, Psi')";
  c.decoded = decode(target);
  c.source_value = value_dksh(c.decoded, source);
  c.target_value = value_csp(target, instance);
  c.holds = c.source_value >= c.target_value - kTol;
  c.coordinate_order = coordinate_order;
  return c;
}

Hypergraph predicate_to_dksh(const CspInstance& psi) {
  psi.validate();
  auto beta = single_accepting_string(psi.predicate);
  if (!beta) throw DomainError("predicate must have exactly one accepting string");
  if (psi.has_negations()) throw DomainError("negated constraints are not supported here");
  const int r = psi.predicate.arity();
  std::vector<std::size_t> one_pos;
  for (int j = 0; j < r; ++j)
    if (*beta >> (r - 1 - j) & 1u) one_pos.push_back(static_cast<std::size_t>(j));
  EdgeMerger m;
  for (std::size_t i = 0; i < psi.graph.edges.size(); ++i) {
    Edge t;
    for (auto p : one_pos) t.push_back(psi.graph.edges[i][p]);
    m.add(std::move(t), psi.graph.edge_weights[i]);
  }
  Hypergraph h;
  h.n = psi.graph.n;
  h.arity = static_cast<int>(one_pos.size());
  h.vertex_weights = psi.graph.vertex_weights;
  h.edges = std::move(m.edges);
  h.edge_weights = std::move(m.weights);
  h.allow_empty_edges = one_pos.empty();
  h.validate();
  return h;
}

std::vector<std::uint32_t> heavy_set(const Hypergraph& h, double mu, double exponent) {
  auto w = h.normalized_weights();
  double thr = std::pow(mu, exponent);
  std::vector<std::uint32_t> t;
  for (std::size_t i = 0; i < h.n; ++i)
    if (w[i] > thr) t.push_back(static_cast<std::uint32_t>(i));
  return t;
}

HeavySplit heavy_vertex_split(const Hypergraph& h, double mu, double eta, const std::vector<std::uint32_t>& heavy,
                              const std::vector<std::uint8_t>& sigma_t) {
  if (heavy.size() != sigma_t.size()) throw StructuralError("sigma_T length must equal |T|");
  auto w = h.normalized_weights();
  std::vector<int> label(h.n, -1);
  for (std::size_t k = 0; k < heavy.size(); ++k) {
    if (heavy[k] >= h.n) throw StructuralError("heavy vertex out of range");
    if (label[heavy[k]] != -1) throw StructuralError("heavy set has a repeated vertex");
    label[heavy[k]] = sigma_t[k] ? 1 : 0;
  }
  HeavySplit s;
  s.heavy = heavy;
  std::vector<std::uint32_t> local(h.n, 0);
  for (std::size_t i = 0; i < h.n; ++i) {
    if (label[i] == -1) {
      local[i] = static_cast<std::uint32_t>(s.light.size());
      s.light.push_back(static_cast<std::uint32_t>(i));
      s.light_weight += w[i];
    } else if (label[i] == 1) {
      s.labeled_weight += w[i];
    }
  }
  if (s.labeled_weight > mu + kTol) throw DomainError("sigma_T exceeds the bias");
  if (!(s.light_weight > 0.0)) throw DegenerateError("w(V \\ T) = 0: every vertex is heavy");

  EdgeMerger m;
  double total = h.total_edge_weight();
  double kept = 0.0;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    bool ok = true;
    Edge t;
    for (auto v : h.edges[i]) {
      if (label[v] == 0) {
        ok = false;
        break;
      }
      if (label[v] == -1) t.push_back(local[v]);
    }
    if (!ok) continue;
    kept += h.edge_weights[i];
    m.add(std::move(t), h.edge_weights[i]);
  }
  s.surviving_mass = total > 0 ? kept / total : 0.0;
  s.sub.n = s.light.size();
  s.sub.arity = h.arity;
  for (auto v : s.light) s.sub.vertex_weights.push_back(w[v] / s.light_weight);
  s.sub.edges = std::move(m.edges);
  s.sub.edge_weights = std::move(m.weights);
  s.sub.allow_empty_edges = true;
  s.delta = (mu * (1.0 + eta) - s.labeled_weight) / s.light_weight;
  return s;
}

Labeling HeavySplit::concatenate(const std::vector<std::uint8_t>& sigma_t, const Labeling& pi) const {
  if (pi.size() != light.size()) throw StructuralError("pi length must equal |V \\ T|");
  Labeling out(heavy.size() + light.size());
  for (std::size_t k = 0; k < heavy.size(); ++k) out.bits[heavy[k]] = sigma_t[k] ? 1 : 0;
  for (std::size_t k = 0; k < light.size(); ++k) out.bits[light[k]] = pi.bits[k];
  return out;
}

std::int64_t minimal_cloud_denominator(const std::vector<double>& w, std::int64_t cap) {
  for (std::int64_t N = 1; N <= cap; ++N) {
    double tol = 5e-7 * static_cast<double>(N);
    bool ok = true;
    for (double x : w) {
      double y = x * static_cast<double>(N);
      double r = std::round(y);
      if (std::fabs(y - r) > tol || (x > 0 && r < 1)) {
        ok = false;
        break;
      }
    }
    if (ok) return N;
  }
  std::int64_t need = 1;
  for (double x : w) {
    std::int64_t p = std::llround(x * 1e6);
    std::int64_t d = 1'000'000 / std::gcd(p, std::int64_t{1'000'000});
    need = std::lcm(need, d);
  }
  throw CapExceeded("cloud expansion needs N = " + std::to_string(need) + " above cap " + std::to_string(cap));
}

CloudExpansion cloud_expansion(const Hypergraph& h, std::int64_t cap) {
  h.validate();
  auto w = h.normalized_weights();
  for (double x : w)
    if (!(x > 0)) throw DomainError("cloud expansion needs positive vertex weights");
  std::int64_t N = minimal_cloud_denominator(w, cap);
  std::vector<std::int64_t> sizes;
  for (double x : w) sizes.push_back(std::llround(x * static_cast<double>(N)));
  return cloud_expansion_with_sizes(h, std::move(sizes), N);
}

CloudExpansion cloud_expansion_with_sizes(const Hypergraph& h, std::vector<std::int64_t> sizes, std::int64_t N,
                                          std::size_t edge_cap) {
  if (sizes.size() != h.n) throw StructuralError("cloud sizes must have one entry per vertex");
  CloudExpansion c;
  c.N = N;
  c.cloud_size = std::move(sizes);
  std::size_t total = 0;
  for (auto s : c.cloud_size) {
    if (s < 1) throw DomainError("cloud sizes must be positive");
    c.cloud_offset.push_back(total);
    total += static_cast<std::size_t>(s);
  }
  std::size_t count = 0;
  std::vector<std::vector<std::uint32_t>> distinct(h.edges.size());
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    auto& d = distinct[i];
    for (auto v : h.edges[i])
      if (std::find(d.begin(), d.end(), v) == d.end()) d.push_back(v);
    double prod = 1.0;
    for (auto v : d) prod *= static_cast<double>(c.cloud_size[v]);
    count += static_cast<std::size_t>(prod);
    if (prod > static_cast<double>(edge_cap) || count > edge_cap)
      throw CapExceeded("cloud expansion would create more than " + std::to_string(edge_cap) + " edges");
  }
  auto& g = c.expanded;
  g.n = total;
  g.arity = h.arity;
  g.vertex_weights.assign(total, 1.0);
  g.allow_empty_edges = h.allow_empty_edges;
  g.edges.reserve(count);
  g.edge_weights.reserve(count);
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const auto& e = h.edges[i];
    const auto& d = distinct[i];
    double prod = 1.0;
    for (auto v : d) prod *= static_cast<double>(c.cloud_size[v]);
    double wt = h.edge_weights[i] / prod;
    std::vector<std::int64_t> idx(d.size(), 0);
    while (true) {
      Edge f;
      f.reserve(e.size());
      for (auto v : e) {
        std::size_t k = static_cast<std::size_t>(std::find(d.begin(), d.end(), v) - d.begin());
        f.push_back(static_cast<std::uint32_t>(c.cloud_offset[v] + static_cast<std::size_t>(idx[k])));
      }
      g.edges.push_back(std::move(f));
      g.edge_weights.push_back(wt);
      std::ptrdiff_t k = static_cast<std::ptrdiff_t>(d.size()) - 1;
      for (; k >= 0; --k) {
        auto uk = static_cast<std::size_t>(k);
        if (++idx[uk] < c.cloud_size[d[uk]]) break;
        idx[uk] = 0;
      }
      if (k < 0) break;
    }
  }
  return c;
}

std::vector<std::int64_t> CloudExpansion::sample_indices(Rng& rng) const {
  std::vector<std::int64_t> x(cloud_size.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cloud_size[i])));
  return x;
}

Labeling CloudExpansion::decode(const Labeling& sigma, const std::vector<std::int64_t>& x) const {
  if (sigma.size() != expanded.n) throw StructuralError("labeling length does not match expanded instance");
  Labeling out(cloud_size.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.bits[i] = sigma.bits[cloud_offset[i] + static_cast<std::size_t>(x[i])];
  return out;
}

Labeling CloudExpansion::decode(const Labeling& sigma, Rng& rng) const { return decode(sigma, sample_indices(rng)); }

Labeling CloudExpansion::lift(const Labeling& sigma) const {
  Labeling out(expanded.n);
  for (std::size_t i = 0; i < cloud_size.size(); ++i)
    for (std::int64_t k = 0; k < cloud_size[i]; ++k) out.bits[cloud_offset[i] + static_cast<std::size_t>(k)] = sigma.bits[i];
  return out;
}

Hypergraph clique_expansion(const Hypergraph& h, double mu, bool dedupe_tuples) {
  if (h.arity < 2) throw DomainError("clique expansion needs arity >= 2");
  Hypergraph g;
  g.n = h.n;
  g.arity = 2;
  g.vertex_weights = h.vertex_weights;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    Edge t;
    for (auto v : h.edges[i]) {
      if (std::find(t.begin(), t.end(), v) != t.end()) {
        if (!dedupe_tuples) throw StructuralError("clique expansion needs distinct vertices within each edge");
        continue;
      }
      t.push_back(v);
    }
    int l = static_cast<int>(t.size());
    if (l < 2) continue;
    double wt = std::pow(mu, l - 2) * h.edge_weights[i] / binomial(l, 2);
    for (int a = 0; a < l; ++a)
      for (int b = a + 1; b < l; ++b) {
        g.edges.push_back({t[static_cast<std::size_t>(a)], t[static_cast<std::size_t>(b)]});
        g.edge_weights.push_back(wt);
      }
  }
  return g;
}

void Max2CspInstance::validate() const {
  for (const auto& c : constraints) {
    if (c.i == c.j) throw StructuralError("constraint variables must differ");
    if (c.i >= n_vars || c.j >= n_vars) throw StructuralError("constraint variable out of range");
    if (c.pairs.size() != c.weights.size()) throw StructuralError("constraint pair/weight length mismatch");
    for (auto [a, b] : c.pairs)
      if (a >= label_size || b >= label_size) throw StructuralError("constraint pair outside [R]^2");
  }
}

double Max2CspInstance::value(const std::vector<std::uint32_t>& labels) const {
  double s = 0.0;
  for (const auto& c : constraints) {
    auto p = std::make_pair(labels[c.i], labels[c.j]);
    for (std::size_t k = 0; k < c.pairs.size(); ++k)
      if (c.pairs[k] == p) {
        s += c.weights[k];
        break;
      }
  }
  return s;
}

Labeling DksPartition::decode(const std::vector<std::uint32_t>& labels) const {
  if (labels.size() != blocks.size()) throw StructuralError("labeling must have one label per block");
  Labeling s(n);
  for (std::size_t i = 0; i < blocks.size(); ++i) s.bits[blocks[i].at(labels[i])] = 1;
  return s;
}

std::vector<std::uint32_t> DksPartition::encode(const Labeling& s) const {
  std::vector<std::uint32_t> labels(blocks.size(), 0);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t a = 0; a < blocks[i].size(); ++a)
      if (s.bits[blocks[i][a]]) {
        labels[i] = static_cast<std::uint32_t>(a);
        break;
      }
  return labels;
}

DksToMax2Csp dks_to_max2csp(const Hypergraph& g, double mu, std::uint64_t seed) {
  g.validate();
  if (!(mu > 0 && mu <= 1)) throw DomainError("bias must lie in (0, 1]");
  double inv = 1.0 / mu;
  if (!near_integer(inv)) throw DomainError("1/mu must be integral for the 2-CSP reduction");
  std::size_t R = static_cast<std::size_t>(std::llround(inv));
  std::size_t ell = integral_size(mu, g.n, "2-CSP reduction");
  for (const auto& e : g.edges)
    if (e.size() != 2) throw StructuralError("2-CSP reduction needs a graph (edges of length 2)");

  DksToMax2Csp out;
  out.partition.n = g.n;
  Rng rng(seed);
  auto perm = rng.permutation(g.n);
  std::vector<std::uint32_t> block_of(g.n), pos_of(g.n);
  out.partition.blocks.resize(ell);
  for (std::size_t b = 0; b < ell; ++b)
    for (std::size_t a = 0; a < R; ++a) {
      auto v = perm[b * R + a];
      out.partition.blocks[b].push_back(v);
      block_of[v] = static_cast<std::uint32_t>(b);
      pos_of[v] = static_cast<std::uint32_t>(a);
    }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::map<std::pair<std::uint32_t, std::uint32_t>, double>> acc;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    auto u = g.edges[k][0], v = g.edges[k][1];
    if (block_of[u] == block_of[v]) continue;
    if (block_of[u] > block_of[v]) std::swap(u, v);
    acc[{block_of[u], block_of[v]}][{pos_of[u], pos_of[v]}] += g.edge_weights[k];
  }
  auto& inst = out.instance;
  inst.n_vars = ell;
  inst.label_size = R;
  for (const auto& [ij, pairs] : acc) {
    Max2CspInstance::Constraint c;
    c.i = ij.first;
    c.j = ij.second;
    for (const auto& [p, w] : pairs) {
      c.pairs.push_back(p);
      c.weights.push_back(w);
    }
    inst.constraints.push_back(std::move(c));
  }
  inst.validate();
  return out;
}

Labeling rescale_pad(const Labeling& s, std::size_t target) {
  Labeling out = s;
  std::size_t c = out.count();
  for (std::size_t i = 0; i < out.size() && c < target; ++i)
    if (!out.bits[i]) {
      out.bits[i] = 1;
      ++c;
    }
  return out;
}

Labeling rescale_subsample(const Labeling& s, std::size_t target, Rng& rng) {
  auto sup = s.support();
  if (sup.size() <= target) return s;
  rng.shuffle(sup);
  sup.resize(target);
  return Labeling::from_support(s.size(), sup);
}

BiasRescale bias_rescale(const Hypergraph& h, double from_bias, double to_bias, RescaleDirection direction) {
  BiasRescale b;
  b.n = h.n;
  b.from_size = integral_size(from_bias, h.n, "rescale source bias");
  b.to_size = integral_size(to_bias, h.n, "rescale target bias");
  b.direction = direction;
  if (direction == RescaleDirection::Pad && b.to_size < b.from_size)
    throw DomainError("pad direction needs the target bias to be at least the source bias");
  if (direction == RescaleDirection::Subsample && b.to_size > b.from_size)
    throw DomainError("subsample direction needs the target bias to be at most the source bias");
  return b;
}

Labeling BiasRescale::apply(const Labeling& s, std::uint64_t seed) const {
  if (s.size() != n) throw StructuralError("labeling length does not match instance");
  if (direction == RescaleDirection::Pad) return rescale_pad(s, to_size);
  Rng rng(seed);
  return rescale_subsample(s, to_size, rng);
}

}  // namespace bcsp
