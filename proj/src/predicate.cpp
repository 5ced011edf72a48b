#include "bcsp/predicate.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "bcsp/common.hpp"

namespace bcsp {

namespace {

void check_arity(int arity) {
  if (arity < 1 || arity > kMaxArity)
    throw StructuralError("predicate arity must be in [1, 16], got " + std::to_string(arity));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw StructuralError("bad " + what + " in predicate name: '" + s + "'");
  }
}

}  // namespace

Predicate::Predicate(int arity, std::vector<std::uint8_t> table) : arity_(arity), table_(std::move(table)) {
  check_arity(arity);
  if (table_.size() != (std::size_t{1} << arity))
    throw StructuralError("predicate table must have 2^arity entries");
  for (auto& b : table_) b = b ? 1 : 0;
}

Predicate Predicate::from_accepting(int arity, const std::vector<std::uint32_t>& accepting) {
  check_arity(arity);
  std::vector<std::uint8_t> table(std::size_t{1} << arity, 0);
  for (auto b : accepting) {
    if (b >= table.size()) throw StructuralError("accepting pattern out of range for arity");
    table[b] = 1;
  }
  return Predicate(arity, std::move(table));
}

Predicate Predicate::from_strings(int arity, const std::vector<std::string>& accepting) {
  std::vector<std::uint32_t> pats;
  for (const auto& s : accepting) {
    if (static_cast<int>(s.size()) != arity)
      throw StructuralError("accepting string '" + s + "' does not match arity " + std::to_string(arity));
    pats.push_back(parse_bitstring(s));
  }
  return from_accepting(arity, pats);
}

std::vector<std::uint32_t> Predicate::accepting() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t b = 0; b < size(); ++b)
    if (table_[b]) out.push_back(b);
  return out;
}

bool Predicate::is_zero() const {
  return std::none_of(table_.begin(), table_.end(), [](auto v) { return v != 0; });
}

std::string Predicate::to_string(std::uint32_t pattern) const { return pattern_string(pattern, arity_); }

std::uint32_t Predicate::parse_pattern(const std::string& bits) const {
  if (static_cast<int>(bits.size()) != arity_)
    throw StructuralError("bitstring '" + bits + "' does not match arity " + std::to_string(arity_));
  return parse_bitstring(bits);
}

std::string pattern_string(std::uint32_t pattern, int arity) {
  std::string s(static_cast<std::size_t>(arity), '0');
  for (int j = 0; j < arity; ++j)
    if (pattern >> (arity - 1 - j) & 1u) s[static_cast<std::size_t>(j)] = '1';
  return s;
}

std::uint32_t parse_bitstring(const std::string& bits) {
  if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxArity))
    throw StructuralError("bitstring length must be in [1, 16]: '" + bits + "'");
  std::uint32_t v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw StructuralError("bitstring has non-binary character: '" + bits + "'");
    v = (v << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return v;
}

int hamming_weight(std::uint32_t pattern) { return std::popcount(pattern); }

std::vector<std::uint32_t> minimal_elements(const Predicate& psi) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t b = 0; b < psi.size(); ++b) {
    if (!psi.accepts(b)) continue;
    bool minimal = true;
    // proper submasks of b
    for (std::uint32_t s = (b - 1) & b; s != b; s = (s - 1) & b) {
      if (psi.accepts(s)) {
        minimal = false;
        break;
      }
      if (s == 0) break;
    }
    if (minimal) out.push_back(b);
  }
  return out;
}

PredicateProfile classify_bias_dependence(const Predicate& psi) {
  PredicateProfile p;
  p.minimal_elements = minimal_elements(psi);
  p.bias_independent = true;
  for (auto b : p.minimal_elements) {
    int w = hamming_weight(b);
    if (w > 1) p.bias_independent = false;
    if (!p.curve_exponent || w < *p.curve_exponent) p.curve_exponent = w;
  }
  p.symmetric_weights = symmetric_decomposition(psi);
  return p;
}

std::uint32_t signs_to_mask(const std::vector<int>& signs) {
  int r = static_cast<int>(signs.size());
  std::uint32_t m = 0;
  for (int j = 0; j < r; ++j) {
    if (signs[static_cast<std::size_t>(j)] == -1)
      m |= 1u << (r - 1 - j);
    else if (signs[static_cast<std::size_t>(j)] != 1)
      throw StructuralError("negation signs must be +1 or -1");
  }
  return m;
}

Predicate negation_conjugate(const Predicate& psi, const std::vector<int>& signs) {
  if (static_cast<int>(signs.size()) != psi.arity())
    throw StructuralError("negation pattern length does not match predicate arity");
  std::uint32_t m = signs_to_mask(signs);
  std::vector<std::uint8_t> t(psi.size());
  for (std::uint32_t x = 0; x < psi.size(); ++x) t[x] = psi.accepts(x ^ m) ? 1 : 0;
  return Predicate(psi.arity(), std::move(t));
}

Predicate complement_predicate(const Predicate& psi) {
  return negation_conjugate(psi, std::vector<int>(static_cast<std::size_t>(psi.arity()), -1));
}

Predicate single_string_predicate(std::uint32_t beta, int arity) {
  return Predicate::from_accepting(arity, {beta});
}

Predicate single_string_predicate(const std::string& beta) {
  return single_string_predicate(parse_bitstring(beta), static_cast<int>(beta.size()));
}

std::optional<std::vector<int>> symmetric_decomposition(const Predicate& psi) {
  int r = psi.arity();
  std::vector<int> state(static_cast<std::size_t>(r + 1), -1);
  for (std::uint32_t b = 0; b < psi.size(); ++b) {
    int w = hamming_weight(b);
    int v = psi.accepts(b) ? 1 : 0;
    auto& s = state[static_cast<std::size_t>(w)];
    if (s == -1)
      s = v;
    else if (s != v)
      return std::nullopt;
  }
  std::vector<int> weights;
  for (int w = 0; w <= r; ++w)
    if (state[static_cast<std::size_t>(w)] == 1) weights.push_back(w);
  return weights;
}

std::optional<std::uint32_t> single_accepting_string(const Predicate& psi) {
  auto acc = psi.accepting();
  if (acc.size() != 1) return std::nullopt;
  return acc[0];
}

Predicate and_predicate(int arity) { return single_string_predicate((1u << arity) - 1, arity); }

Predicate or_predicate(int arity) {
  check_arity(arity);
  std::vector<std::uint8_t> t(std::size_t{1} << arity, 1);
  t[0] = 0;
  return Predicate(arity, std::move(t));
}

Predicate neq_predicate() { return Predicate::from_accepting(2, {0b01, 0b10}); }
Predicate eq_predicate() { return Predicate::from_accepting(2, {0b00, 0b11}); }

Predicate exact_weight_predicate(int arity, int weight) { return symmetric_predicate(arity, {weight}); }

Predicate symmetric_predicate(int arity, const std::vector<int>& weights) {
  check_arity(arity);
  std::vector<std::uint8_t> t(std::size_t{1} << arity, 0);
  for (std::uint32_t b = 0; b < t.size(); ++b)
    if (std::find(weights.begin(), weights.end(), hamming_weight(b)) != weights.end()) t[b] = 1;
  return Predicate(arity, std::move(t));
}

Predicate parse_named_predicate(const std::string& name) {
  auto upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  auto with_arity = [&](const std::string& prefix) -> std::optional<int> {
    if (upper.rfind(prefix, 0) != 0) return std::nullopt;
    std::string rest = upper.substr(prefix.size());
    if (rest.empty()) return 2;
    return parse_int(rest, "arity");
  };
  if (upper == "NEQ" || upper == "XOR") return neq_predicate();
  if (upper == "EQ") return eq_predicate();
  if (upper.rfind("BETA:", 0) == 0) return single_string_predicate(name.substr(5));
  if (upper.rfind("ACCEPT:", 0) == 0) {
    auto items = split(name.substr(7), ',');
    if (items.empty()) throw StructuralError("ACCEPT: needs at least one bitstring");
    return Predicate::from_strings(static_cast<int>(items[0].size()), items);
  }
  if (upper.rfind("EXACT", 0) == 0) {
    auto parts = split(upper.substr(5), ':');
    if (parts.size() != 2) throw StructuralError("expected EXACT<i>:<r>, got '" + name + "'");
    return exact_weight_predicate(parse_int(parts[1], "arity"), parse_int(parts[0], "weight"));
  }
  if (upper.rfind("SYM:", 0) == 0) {
    auto parts = split(upper.substr(4), ':');
    if (parts.size() != 2) throw StructuralError("expected SYM:<i,j,..>:<r>, got '" + name + "'");
    std::vector<int> ws;
    for (const auto& s : split(parts[0], ',')) ws.push_back(parse_int(s, "weight"));
    return symmetric_predicate(parse_int(parts[1], "arity"), ws);
  }
  if (auto a = with_arity("AND")) return and_predicate(*a);
  if (auto a = with_arity("OR")) return or_predicate(*a);
  throw StructuralError("unknown predicate name '" + name + "'");
}

}  // namespace bcsp
