#include "bcsp/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace bcsp {

namespace {

BitString sample_bits(std::size_t len, double p, Rng& rng) {
  BitString b(len);
  for (auto& x : b) x = rng.bernoulli(p) ? 1 : 0;
  return b;
}

std::uint32_t sample_vertex(const std::vector<double>& stationary, Rng& rng) {
  return static_cast<std::uint32_t>(rng.categorical(stationary));
}

std::vector<std::uint32_t> inverse(const std::vector<std::uint32_t>& p) {
  std::vector<std::uint32_t> q(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) q[p[a]] = static_cast<std::uint32_t>(a);
  return q;
}

}  // namespace

void GadgetParams::validate() const {
  auto in01 = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in01(mu)) throw DomainError("mu must lie in (0, 1)");
  if (!in01(beta)) throw DomainError("beta must lie in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  if (r < 1) throw DomainError("r must be positive");
  if (R < 1) throw DomainError("R must be positive");
  if (samples < 1) throw DomainError("samples must be at least 1");
}

double default_rho(int r, double mu, double c_prime) {
  return 1.0 / (2.0 * c_prime * static_cast<double>(r * r) * std::log(1.0 / mu));
}

std::vector<std::size_t> sample_correlated(const std::vector<double>& gamma, int r, double rho, Rng& rng) {
  std::vector<std::size_t> out(static_cast<std::size_t>(r));
  if (rng.bernoulli(rho)) {
    std::size_t w = rng.categorical(gamma);
    std::fill(out.begin(), out.end(), w);
  } else {
    for (auto& w : out) w = rng.categorical(gamma);
  }
  return out;
}

HypercubeVariant parse_hypercube_variant(const std::string& s) {
  if (s == "independent-copies" || s == "independent") return HypercubeVariant::IndependentCopies;
  if (s == "shared-theta" || s == "shared") return HypercubeVariant::SharedTheta;
  throw StructuralError("unknown hypercube variant '" + s + "'");
}

std::string to_string(HypercubeVariant v) {
  return v == HypercubeVariant::IndependentCopies ? "independent-copies" : "shared-theta";
}

std::vector<BitString> sample_noisy_hypercube_edge(const GadgetParams& p, HypercubeVariant v, Rng& rng) {
  const auto R = static_cast<std::size_t>(p.R);
  const auto r = static_cast<std::size_t>(p.r);
  BitString x = sample_bits(R, p.mu, rng);
  std::vector<BitString> out(r, BitString(R));
  if (v == HypercubeVariant::IndependentCopies) {
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < R; ++i) out[j][i] = rng.bernoulli(p.rho) ? x[i] : (rng.bernoulli(p.mu) ? 1 : 0);
  } else {
    double share = p.rho * p.rho;
    for (std::size_t i = 0; i < R; ++i) {
      bool all = rng.bernoulli(share);
      for (std::size_t j = 0; j < r; ++j) out[j][i] = all ? x[i] : (rng.bernoulli(p.mu) ? 1 : 0);
    }
  }
  return out;
}

std::vector<double> hypercube_coordinate_law(const GadgetParams& p, HypercubeVariant v) {
  const int r = p.r;
  std::vector<double> law(std::size_t{1} << r, 0.0);
  auto m = [&](int b) { return b ? p.mu : 1.0 - p.mu; };
  for (std::uint32_t pat = 0; pat < law.size(); ++pat) {
    double indep = 1.0;
    for (int j = 0; j < r; ++j) indep *= m(static_cast<int>(pat >> (r - 1 - j) & 1u));
    if (v == HypercubeVariant::IndependentCopies) {
      double s = 0.0;
      for (int b = 0; b < 2; ++b) {
        double prod = m(b);
        for (int j = 0; j < r; ++j) {
          int xj = static_cast<int>(pat >> (r - 1 - j) & 1u);
          prod *= p.rho * (xj == b ? 1.0 : 0.0) + (1.0 - p.rho) * m(xj);
        }
        s += prod;
      }
      law[pat] = s;
    } else {
      double share = p.rho * p.rho;
      double constant = 0.0;
      if (pat == 0) constant = m(0);
      if (pat == law.size() - 1) constant = m(1);
      law[pat] = share * constant + (1.0 - share) * indep;
    }
  }
  return law;
}

double CubeAssignment::operator()(const BitString& x) const {
  switch (kind) {
    case Kind::Dictator:
      return x.at(coordinate) ? 1.0 : 0.0;
    case Kind::Constant:
      return constant;
    case Kind::Table: {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) idx |= std::size_t{1} << i;
      return table.at(idx);
    }
  }
  return 0.0;
}

CubeAssignment CubeAssignment::dictator(std::size_t i) {
  CubeAssignment a;
  a.kind = Kind::Dictator;
  a.coordinate = i;
  return a;
}

CubeAssignment CubeAssignment::constant_value(double v) {
  CubeAssignment a;
  a.kind = Kind::Constant;
  a.constant = v;
  return a;
}

double hypercube_acceptance_exact(const GadgetParams& p, HypercubeVariant v, const CubeAssignment& f) {
  const int r = p.r, R = p.R;
  if (r * R > 20) throw CapExceeded("exact hypercube enumeration needs r*R <= 20");
  auto law = hypercube_coordinate_law(p, v);
  const std::uint64_t per = std::uint64_t{1} << r;
  const std::uint64_t total = std::uint64_t{1} << (r * R);
  CompensatedSum acc;
  std::vector<BitString> x(static_cast<std::size_t>(r), BitString(static_cast<std::size_t>(R)));
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    double prob = 1.0;
    std::uint64_t rest = idx;
    for (int i = 0; i < R; ++i) {
      auto pat = static_cast<std::uint32_t>(rest % per);
      rest /= per;
      prob *= law[pat];
      for (int j = 0; j < r; ++j)
        x[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(pat >> (r - 1 - j) & 1u);
    }
    if (prob == 0.0) continue;
    double a = 1.0;
    for (const auto& xj : x) a *= f(xj);
    acc.add(prob * a);
  }
  return acc.value();
}

double hypercube_dictator_closed_form(const GadgetParams& p, HypercubeVariant v) {
  const double mu = p.mu, rho = p.rho;
  if (v == HypercubeVariant::SharedTheta) {
    double s = rho * rho;
    return s * mu + (1.0 - s) * std::pow(mu, p.r);
  }
  return mu * std::pow(rho + (1.0 - rho) * mu, p.r) + (1.0 - mu) * std::pow((1.0 - rho) * mu, p.r);
}

std::size_t ProductSpace::size() const {
  double s = 1.0;
  for (const auto& m : measures) s *= static_cast<double>(m.size());
  if (s > static_cast<double>(kTableCap)) throw CapExceeded("product space exceeds 2^20 points");
  std::size_t n = 1;
  for (const auto& m : measures) n *= m.size();
  return n;
}

std::vector<std::size_t> ProductSpace::point(std::size_t index) const {
  std::vector<std::size_t> x(measures.size());
  for (std::size_t i = 0; i < measures.size(); ++i) {
    x[i] = index % measures[i].size();
    index /= measures[i].size();
  }
  return x;
}

double ProductSpace::probability(std::size_t index) const {
  double p = 1.0;
  for (const auto& m : measures) {
    p *= m[index % m.size()];
    index /= m.size();
  }
  return p;
}

ProductSpace ProductSpace::biased_cube(int dims, double mu) {
  ProductSpace s;
  s.measures.assign(static_cast<std::size_t>(dims), {1.0 - mu, mu});
  return s;
}

ProductSpace ProductSpace::uniform(int dims, int q) {
  ProductSpace s;
  s.measures.assign(static_cast<std::size_t>(dims), std::vector<double>(static_cast<std::size_t>(q), 1.0 / q));
  return s;
}

void TabulatedFunction::validate() const {
  if (table.size() != domain.size()) throw StructuralError("table size must equal the domain size");
  for (const auto& m : domain.measures) {
    if (m.empty()) throw StructuralError("empty alphabet");
    double s = 0.0;
    for (double x : m) {
      if (!(x >= 0)) throw StructuralError("measure entries must be nonnegative");
      s += x;
    }
    if (std::fabs(s - 1.0) > 1e-9) throw StructuralError("measure must sum to 1");
  }
  for (double v : table)
    if (!(v >= 0.0 && v <= 1.0)) throw StructuralError("table values must lie in [0, 1]");
}

double TabulatedFunction::expectation() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < table.size(); ++i) s.add(domain.probability(i) * table[i]);
  return s.value();
}

namespace {

std::size_t stride_of(const ProductSpace& d, std::size_t i) {
  std::size_t s = 1;
  for (std::size_t k = 0; k < i; ++k) s *= d.measures[k].size();
  return s;
}

// Calls fn(base, prob_without_i) for every point whose coordinate i is 0.
template <class F>
void for_each_fiber(const ProductSpace& d, std::size_t i, F&& fn) {
  const std::size_t total = d.size();
  const std::size_t stride = stride_of(d, i);
  const std::size_t q = d.measures[i].size();
  for (std::size_t base = 0; base < total; ++base) {
    if ((base / stride) % q != 0) continue;
    double p = 1.0;
    std::size_t rest = base;
    for (std::size_t k = 0; k < d.dims(); ++k) {
      std::size_t a = rest % d.measures[k].size();
      rest /= d.measures[k].size();
      if (k != i) p *= d.measures[k][a];
    }
    fn(base, stride, p);
  }
}

}  // namespace

double influence(const TabulatedFunction& f, std::size_t i) {
  f.validate();
  if (i >= f.domain.dims()) throw StructuralError("coordinate out of range");
  const auto& g = f.domain.measures[i];
  CompensatedSum total;
  for_each_fiber(f.domain, i, [&](std::size_t base, std::size_t stride, double p) {
    double m = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) m += g[a] * f.table[base + a * stride];
    double var = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
      double d = f.table[base + a * stride] - m;
      var += g[a] * d * d;
    }
    total.add(p * var);
  });
  return total.value();
}

TabulatedFunction noise_operator(const TabulatedFunction& f, double rho) {
  f.validate();
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("noise rate must lie in [0, 1]");
  TabulatedFunction out = f;
  for (std::size_t i = 0; i < f.domain.dims(); ++i) {
    const auto& g = f.domain.measures[i];
    for_each_fiber(f.domain, i, [&](std::size_t base, std::size_t stride, double) {
      double m = 0.0;
      for (std::size_t a = 0; a < g.size(); ++a) m += g[a] * out.table[base + a * stride];
      for (std::size_t a = 0; a < g.size(); ++a) {
        double& x = out.table[base + a * stride];
        x = rho * x + (1.0 - rho) * m;
      }
    });
  }
  return out;
}

std::size_t count_influential(const TabulatedFunction& f, double eta, double tau) {
  TabulatedFunction g = noise_operator(f, 1.0 - eta);
  std::size_t c = 0;
  for (std::size_t i = 0; i < g.domain.dims(); ++i)
    if (influence(g, i) >= tau) ++c;
  return c;
}

void SmallGraph::validate() const {
  if (adj.size() != n) throw StructuralError("adjacency list length must equal n");
  if (n == 0) throw StructuralError("graph must have vertices");
  for (std::size_t v = 0; v < n; ++v) {
    if (adj[v].empty()) throw StructuralError("every vertex needs a neighbor");
    for (auto u : adj[v])
      if (u >= n) throw StructuralError("neighbor index out of range");
  }
}

std::vector<double> SmallGraph::stationary() const {
  std::vector<double> p(n);
  double tot = 0.0;
  for (std::size_t v = 0; v < n; ++v) tot += static_cast<double>(adj[v].size());
  for (std::size_t v = 0; v < n; ++v) p[v] = static_cast<double>(adj[v].size()) / tot;
  return p;
}

SmallGraph SmallGraph::two_cliques(std::size_t m) {
  if (m < 2) throw DomainError("cliques need at least 2 vertices");
  SmallGraph g;
  g.n = 2 * m;
  g.adj.resize(g.n);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b) g.adj[c * m + a].push_back(static_cast<std::uint32_t>(c * m + b));
  return g;
}

SmallGraph SmallGraph::cycle(std::size_t n) {
  if (n < 3) throw DomainError("cycle needs at least 3 vertices");
  SmallGraph g;
  g.n = n;
  g.adj.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    g.adj[v].push_back(static_cast<std::uint32_t>((v + n - 1) % n));
    g.adj[v].push_back(static_cast<std::uint32_t>((v + 1) % n));
  }
  return g;
}

SsePoint permute_point(const SsePoint& q, const std::vector<std::uint32_t>& perm) {
  SsePoint out;
  const std::size_t R = perm.size();
  out.B.resize(R);
  out.x.resize(R);
  out.z.resize(R);
  for (std::size_t i = 0; i < R; ++i) {
    out.B[i] = q.B[perm[i]];
    out.x[i] = q.x[perm[i]];
    out.z[i] = q.z[perm[i]];
  }
  return out;
}

SseDraw sse_test_sample(const SmallGraph& g, const GadgetParams& p, Rng& rng) {
  if (p.R > 16) throw CapExceeded("SSE test needs R <= 16");
  if (g.n > 64) throw CapExceeded("SSE test needs at most 64 vertices");
  const auto R = static_cast<std::size_t>(p.R);
  const auto r = static_cast<std::size_t>(p.r);
  const auto pi = g.stationary();
  SseDraw d;
  d.A.resize(R);
  for (auto& a : d.A) a = sample_vertex(pi, rng);
  d.B.assign(r, std::vector<std::uint32_t>(R));
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < R; ++i) {
      const auto& nb = g.adj[d.A[i]];
      d.B[j][i] = rng.bernoulli(1.0 - p.eta) ? nb[rng.below(nb.size())] : sample_vertex(pi, rng);
    }
  d.x = sample_bits(R, p.mu, rng);
  d.z = sample_bits(R, p.beta, rng);
  d.theta = sample_bits(R, p.rho, rng);
  d.xj.assign(r, BitString(R));
  d.zj.assign(r, BitString(R));
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      if (d.theta[i]) {
        d.xj[j][i] = d.x[i];
        d.zj[j][i] = d.z[i];
      } else {
        d.xj[j][i] = rng.bernoulli(p.mu) ? 1 : 0;
        d.zj[j][i] = rng.bernoulli(p.beta) ? 1 : 0;
      }
    }
  d.xhat.assign(r, BitString(R));
  d.zprime.assign(r, BitString(R));
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < R; ++i) {
      if (rng.bernoulli(1.0 - p.eta)) {
        d.xhat[j][i] = d.xj[j][i];
        d.zprime[j][i] = d.zj[j][i];
      } else {
        d.xhat[j][i] = rng.bernoulli(p.mu) ? 1 : 0;
        d.zprime[j][i] = rng.bernoulli(p.beta) ? 1 : 0;
      }
    }
  d.leaked.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    auto& q = d.leaked[j];
    q.B.resize(R);
    q.x.resize(R);
    q.z = d.zprime[j];
    for (std::size_t i = 0; i < R; ++i) {
      if (d.zprime[j][i]) {
        q.B[i] = d.B[j][i];
        q.x[i] = d.xhat[j][i];
      } else {
        q.B[i] = sample_vertex(pi, rng);
        q.x[i] = rng.bernoulli(p.mu) ? 1 : 0;
      }
    }
  }
  d.perms.resize(r);
  d.queries.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    d.perms[j] = rng.permutation(R);
    d.queries[j] = permute_point(d.leaked[j], d.perms[j]);
  }
  return d;
}

DictatorChoice dictator_strategy(const std::vector<std::uint32_t>& A, const BitString& z,
                                 const std::vector<std::uint8_t>& in_s) {
  if (A.size() != z.size()) throw StructuralError("A and z must have the same length");
  DictatorChoice c;
  for (std::size_t i = 0; i < A.size(); ++i)
    if (in_s.at(A[i]) && z[i]) c.pi_set.push_back(static_cast<std::uint32_t>(i));
  c.singleton = c.pi_set.size() == 1;
  c.index = c.singleton ? c.pi_set[0] : 0;
  return c;
}

double sse_dictator_acceptance(const SseDraw& d, const std::vector<std::uint8_t>& in_s) {
  for (const auto& q : d.queries) {
    auto c = dictator_strategy(q.B, q.z, in_s);
    if (!q.x[c.index]) return 0.0;
  }
  return 1.0;
}

double sse_dictator_exact(const SmallGraph& g, const std::vector<std::uint8_t>& in_s, const GadgetParams& p) {
  g.validate();
  if (in_s.size() != g.n) throw StructuralError("set indicator must have one entry per vertex");
  const int r = p.r, R = p.R;
  if (2 * r * R > 20) throw CapExceeded("exact SSE enumeration needs 4^(r*R) <= 2^20");
  const auto pi = g.stationary();
  double pi_s = 0.0;
  for (std::size_t v = 0; v < g.n; ++v)
    if (in_s[v]) pi_s += pi[v];
  auto mb = [&](int b) { return b ? p.mu : 1.0 - p.mu; };
  auto bb = [&](int b) { return b ? p.beta : 1.0 - p.beta; };
  // state of copy j: bit 1 = flag, bit 0 = x'
  const std::uint32_t per = 1u << (2 * r);
  std::vector<double> law(per, 0.0);
  for (std::size_t a = 0; a < g.n; ++a) {
    std::size_t hits = 0;
    for (auto u : g.adj[a])
      if (in_s[u]) ++hits;
    double ps = (1.0 - p.eta) * static_cast<double>(hits) / static_cast<double>(g.adj[a].size()) + p.eta * pi_s;
    for (int x = 0; x < 2; ++x)
      for (int z = 0; z < 2; ++z)
        for (int th = 0; th < 2; ++th) {
          double w = pi[a] * mb(x) * bb(z) * (th ? p.rho : 1.0 - p.rho);
          if (w == 0.0) continue;
          // P(z' = 1, xhat = b)
          double top[2];
          for (int b = 0; b < 2; ++b) {
            double fresh = p.beta * mb(b);
            double copy = th ? ((z == 1 && x == b) ? 1.0 : 0.0) : fresh;
            top[b] = (1.0 - p.eta) * copy + p.eta * fresh;
          }
          double bottom = 1.0 - top[0] - top[1];
          double q[4];
          for (int b = 0; b < 2; ++b) {
            q[2 | b] = top[b] * ps;
            q[b] = top[b] * (1.0 - ps) + bottom * mb(b);
          }
          for (std::uint32_t st = 0; st < per; ++st) {
            double pr = w;
            for (int j = 0; j < r; ++j) pr *= q[(st >> (2 * j)) & 3u];
            law[st] += pr;
          }
        }
  }
  const std::uint64_t total = std::uint64_t{1} << (2 * r * R);
  CompensatedSum acc;
  std::vector<std::uint32_t> st(static_cast<std::size_t>(R));
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    double pr = 1.0;
    std::uint64_t rest = idx;
    for (int i = 0; i < R; ++i) {
      st[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(rest % per);
      rest /= per;
      pr *= law[st[static_cast<std::size_t>(i)]];
    }
    if (pr == 0.0) continue;
    double val = 1.0;
    for (int j = 0; j < r && val > 0.0; ++j) {
      int flagged = 0, ones = 0;
      int flagged_bit = 0;
      for (int i = 0; i < R; ++i) {
        std::uint32_t c = (st[static_cast<std::size_t>(i)] >> (2 * j)) & 3u;
        if (c & 2u) {
          ++flagged;
          flagged_bit = static_cast<int>(c & 1u);
        }
        ones += static_cast<int>(c & 1u);
      }
      val *= flagged == 1 ? flagged_bit : static_cast<double>(ones) / R;
    }
    acc.add(pr * val);
  }
  return acc.value();
}

void UgInstance::validate() const {
  for (const auto& a : arcs) {
    if (a.u >= n || a.v >= n || a.u == a.v) throw StructuralError("arc endpoints must be distinct vertices");
    if (a.perm.size() != labels) throw StructuralError("arc permutation must have one entry per label");
    std::vector<std::uint8_t> seen(labels, 0);
    for (auto x : a.perm) {
      if (x >= labels || seen[x]) throw StructuralError("arc map must be a permutation");
      seen[x] = 1;
    }
  }
}

std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> UgInstance::neighbors(std::uint32_t v) const {
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> out;
  for (const auto& a : arcs) {
    if (a.v == v) out.emplace_back(a.u, a.perm);
    if (a.u == v) out.emplace_back(a.v, inverse(a.perm));
  }
  return out;
}

double UgInstance::satisfied_fraction(const std::vector<std::uint32_t>& sigma) const {
  if (arcs.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& a : arcs)
    if (a.perm[sigma[a.u]] == sigma[a.v]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(arcs.size());
}

UgInstance UgInstance::planted_cycle(std::size_t n, std::size_t labels, std::uint64_t seed,
                                     std::vector<std::uint32_t>* planted) {
  if (n < 3 || labels < 1) throw DomainError("planted instance needs n >= 3 and labels >= 1");
  Rng rng(seed);
  std::vector<std::uint32_t> sigma(n);
  for (auto& s : sigma) s = static_cast<std::uint32_t>(rng.below(labels));
  UgInstance inst;
  inst.n = n;
  inst.labels = labels;
  auto add = [&](std::uint32_t u, std::uint32_t v) {
    auto perm = rng.permutation(labels);
    auto pos = static_cast<std::size_t>(std::find(perm.begin(), perm.end(), sigma[v]) - perm.begin());
    std::swap(perm[pos], perm[sigma[u]]);
    inst.arcs.push_back({u, v, perm});
  };
  for (std::size_t v = 0; v < n; ++v) add(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>((v + 1) % n));
  if (n > 3)
    for (std::size_t v = 0; v < n; ++v) add(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>((v + 2) % n));
  if (planted) *planted = sigma;
  inst.validate();
  return inst;
}

std::uint32_t LongCode::operator()(const std::vector<std::uint32_t>& z) const {
  if (z.size() != t) throw StructuralError("long code input has the wrong length");
  std::size_t idx = 0, mul = 1;
  for (std::size_t i = 0; i < t; ++i) {
    idx += z[i] * mul;
    mul *= R;
  }
  return table[idx];
}

LongCode LongCode::folded() const {
  LongCode g = *this;
  std::vector<std::uint32_t> x(t, 0), y(t);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < t; ++i) {
      x[i] = static_cast<std::uint32_t>(rest % R);
      rest /= R;
    }
    std::uint32_t s = x[0];
    for (std::size_t i = 0; i < t; ++i) y[i] = static_cast<std::uint32_t>((x[i] + R - s) % R);
    g.table[idx] = static_cast<std::uint32_t>(((*this)(y) + s) % R);
  }
  return g;
}

bool LongCode::is_folded() const { return folded().table == table; }

std::vector<double> LongCode::label_distribution() const {
  std::vector<double> d(R, 0.0);
  for (auto v : table) d[v] += 1.0;
  for (auto& x : d) x /= static_cast<double>(table.size());
  return d;
}

LongCode LongCode::dictator(std::size_t t, std::size_t R, std::size_t i) {
  if (i >= t) throw DomainError("dictator coordinate out of range");
  if (std::pow(static_cast<double>(R), static_cast<double>(t)) > static_cast<double>(kTableCap))
    throw CapExceeded("long code table exceeds 2^20 entries");
  LongCode f;
  f.t = t;
  f.R = R;
  std::size_t total = 1;
  for (std::size_t k = 0; k < t; ++k) total *= R;
  f.table.resize(total);
  std::size_t stride = 1;
  for (std::size_t k = 0; k < i; ++k) stride *= R;
  for (std::size_t idx = 0; idx < total; ++idx) f.table[idx] = static_cast<std::uint32_t>((idx / stride) % R);
  return f;
}

LongCode LongCode::random(std::size_t t, std::size_t R, Rng& rng) {
  LongCode f = dictator(t, R, 0);
  for (auto& v : f.table) v = static_cast<std::uint32_t>(rng.below(R));
  return f;
}

UgDraw ug_test_sample(const UgInstance& inst, const GadgetParams& p, Rng& rng) {
  if (p.t > 8 || p.label_size > 8) throw CapExceeded("UG test needs t <= 8 and label_size <= 8");
  if (static_cast<std::size_t>(p.t) != inst.labels) throw DomainError("t must equal the UG label count");
  const auto t = static_cast<std::size_t>(p.t);
  const auto R = static_cast<std::uint64_t>(p.label_size);
  const auto k = static_cast<std::size_t>(p.r);
  std::vector<std::uint32_t> usable;
  for (std::uint32_t v = 0; v < inst.n; ++v)
    if (!inst.neighbors(v).empty()) usable.push_back(v);
  if (usable.empty()) throw DomainError("UG instance has no arcs");
  UgDraw d;
  d.v = usable[rng.below(usable.size())];
  auto nb = inst.neighbors(d.v);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& pick = nb[rng.below(nb.size())];
    d.w.push_back(pick.first);
    d.perms.push_back(pick.second);
  }
  d.z.resize(t);
  for (auto& x : d.z) x = static_cast<std::uint32_t>(rng.below(R));
  d.theta = sample_bits(t, p.rho, rng);
  d.zj.assign(k, std::vector<std::uint32_t>(t));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < k; ++j) d.zj[j][i] = d.theta[i] ? d.z[i] : static_cast<std::uint32_t>(rng.below(R));
  d.zprime = d.zj;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < t; ++i)
      if (!rng.bernoulli(1.0 - p.eta)) d.zprime[j][i] = static_cast<std::uint32_t>(rng.below(R));
  d.queries.assign(k, std::vector<std::uint32_t>(t));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t a = 0; a < t; ++a) d.queries[j][a] = d.zprime[j][d.perms[j][a]];
  return d;
}

bool ug_accepts(const UgDraw& d, const std::vector<LongCode>& codes, bool fold) {
  std::optional<std::uint32_t> first;
  for (std::size_t j = 0; j < d.w.size(); ++j) {
    const auto& f = codes.at(d.w[j]);
    const auto& x = d.queries[j];
    std::uint32_t val;
    if (fold) {
      std::vector<std::uint32_t> y(x.size());
      const auto R = static_cast<std::uint32_t>(f.R);
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] + R - x[0]) % R;
      val = (f(y) + x[0]) % R;
    } else {
      val = f(x);
    }
    if (!first)
      first = val;
    else if (*first != val)
      return false;
  }
  return true;
}

double ug_completeness_bound(const GadgetParams& p, double eps_c) {
  return (1.0 - eps_c * p.r) * p.rho * (1.0 - p.eta * p.r);
}

McEstimate mc_acceptance(const std::function<double(Rng&)>& trial, std::uint64_t samples, std::uint64_t seed,
                         int threads) {
  if (samples < 1) throw DomainError("samples must be at least 1");
  const std::uint64_t batches = (samples + kMcBatch - 1) / kMcBatch;
  std::vector<double> s1(batches), s2(batches);
  parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, 0x6d63, b));
    std::uint64_t count = std::min<std::uint64_t>(kMcBatch, samples - b * kMcBatch);
    CompensatedSum a, q;
    for (std::uint64_t k = 0; k < count; ++k) {
      double v = trial(rng);
      a.add(v);
      q.add(v * v);
    }
    s1[b] = a.value();
    s2[b] = q.value();
  });
  CompensatedSum a, q;
  for (std::uint64_t b = 0; b < batches; ++b) {
    a.add(s1[b]);
    q.add(s2[b]);
  }
  McEstimate e;
  e.samples = samples;
  const double n = static_cast<double>(samples);
  e.estimate = a.value() / n;
  double var = samples > 1 ? (q.value() - n * e.estimate * e.estimate) / (n - 1.0) : 0.0;
  e.std_error = std::sqrt(std::max(var, 0.0) / n);
  return e;
}

}  // namespace bcsp
