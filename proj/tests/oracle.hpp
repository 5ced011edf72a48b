#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bcsp/instance.hpp"

namespace oracle {

inline bool edge_ok(const std::vector<std::uint8_t>& s, const bcsp::Edge& e, const bcsp::Predicate* psi,
                    const std::vector<int>* signs) {
  if (!psi) {
    for (auto v : e)
      if (!s[v]) return false;
    return true;
  }
  std::uint32_t pat = 0;
  const int r = static_cast<int>(e.size());
  for (int j = 0; j < r; ++j) {
    int bit = s[e[static_cast<std::size_t>(j)]];
    if (signs && (*signs)[static_cast<std::size_t>(j)] == -1) bit ^= 1;
    if (bit) pat |= 1u << (r - 1 - j);
  }
  return psi->accepts(pat);
}

inline double value(const std::vector<std::uint8_t>& s, const bcsp::Hypergraph& h, const bcsp::Predicate* psi = nullptr,
                    const std::vector<std::vector<int>>* neg = nullptr) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < h.edges.size(); ++k) {
    den += h.edge_weights[k];
    const std::vector<int>* sg = neg && !neg->empty() ? &(*neg)[k] : nullptr;
    if (edge_ok(s, h.edges[k], psi, sg)) num += h.edge_weights[k];
  }
  return den > 0 ? num / den : 0.0;
}

inline double weight(const std::vector<std::uint8_t>& s, const bcsp::Hypergraph& h) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < h.n; ++i) {
    den += h.vertex_weights[i];
    if (s[i]) num += h.vertex_weights[i];
  }
  return num / den;
}

struct Opt {
  double value = -1;
  std::vector<std::uint8_t> labeling;
};

// Exhaustive search; exactly=true requires relative weight within 1e-9 of mu.
inline Opt opt(const bcsp::Hypergraph& h, double mu, bool exactly, const bcsp::Predicate* psi = nullptr,
               const std::vector<std::vector<int>>* neg = nullptr) {
  Opt best;
  std::vector<std::uint8_t> s(h.n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << h.n); ++m) {
    for (std::size_t i = 0; i < h.n; ++i) s[i] = (m >> i) & 1u;
    double w = weight(s, h);
    bool ok = exactly ? std::fabs(w - mu) <= 1e-9 : w <= mu + 1e-9;
    if (!ok) continue;
    double v = value(s, h, psi, neg);
    if (v > best.value) {
      best.value = v;
      best.labeling = s;
    }
  }
  return best;
}

// Absolute induced edge weight of a set.
inline double induced(const std::vector<std::uint8_t>& s, const bcsp::Hypergraph& h) {
  double t = 0;
  for (std::size_t k = 0; k < h.edges.size(); ++k)
    if (edge_ok(s, h.edges[k], nullptr, nullptr)) t += h.edge_weights[k];
  return t;
}

inline std::vector<std::uint32_t> minimal(const std::vector<std::uint8_t>& table) {
  std::vector<std::uint32_t> out;
  const auto size = static_cast<std::uint32_t>(table.size());
  for (std::uint32_t b = 0; b < size; ++b) {
    if (!table[b]) continue;
    bool min = true;
    for (std::uint32_t a = 0; a < size; ++a)
      if (a != b && table[a] && (a | b) == b) min = false;
    if (min) out.push_back(b);
  }
  return out;
}

}  // namespace oracle
