#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcsp {

inline constexpr int kMaxArity = 16;

// Truth table of an r-ary predicate. Pattern b has coordinate j at bit (r-1-j),
// so the bitstring "b_0 b_1 ... b_{r-1}" reads MSB first.
class Predicate {
 public:
  Predicate() = default;
  Predicate(int arity, std::vector<std::uint8_t> table);

  static Predicate from_accepting(int arity, const std::vector<std::uint32_t>& accepting);
  static Predicate from_strings(int arity, const std::vector<std::string>& accepting);

  int arity() const { return arity_; }
  std::uint32_t size() const { return 1u << arity_; }
  bool accepts(std::uint32_t pattern) const { return table_[pattern] != 0; }
  const std::vector<std::uint8_t>& table() const { return table_; }
  std::vector<std::uint32_t> accepting() const;
  bool is_zero() const;

  std::string to_string(std::uint32_t pattern) const;
  std::uint32_t parse_pattern(const std::string& bits) const;

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.arity_ == b.arity_ && a.table_ == b.table_;
  }

 private:
  int arity_ = 0;
  std::vector<std::uint8_t> table_;
};

std::string pattern_string(std::uint32_t pattern, int arity);
std::uint32_t parse_bitstring(const std::string& bits);
int hamming_weight(std::uint32_t pattern);

struct PredicateProfile {
  std::vector<std::uint32_t> minimal_elements;
  std::optional<int> curve_exponent;  // empty means infinity
  bool bias_independent = true;
  std::optional<std::vector<int>> symmetric_weights;
};

std::vector<std::uint32_t> minimal_elements(const Predicate& psi);
PredicateProfile classify_bias_dependence(const Predicate& psi);
Predicate negation_conjugate(const Predicate& psi, const std::vector<int>& signs);
Predicate complement_predicate(const Predicate& psi);
Predicate single_string_predicate(std::uint32_t beta, int arity);
Predicate single_string_predicate(const std::string& beta);
std::optional<std::vector<int>> symmetric_decomposition(const Predicate& psi);
std::optional<std::uint32_t> single_accepting_string(const Predicate& psi);

Predicate and_predicate(int arity);
Predicate or_predicate(int arity);
Predicate neq_predicate();
Predicate eq_predicate();
Predicate exact_weight_predicate(int arity, int weight);
Predicate symmetric_predicate(int arity, const std::vector<int>& weights);

// Names: AND, OR (optionally with arity suffix, e.g. AND3), NEQ, EQ,
// EXACT<i>:<r>, SYM:<i,j,..>:<r>, BETA:<bits>, ACCEPT:<bits,bits,..>.
Predicate parse_named_predicate(const std::string& name);

std::uint32_t signs_to_mask(const std::vector<int>& signs);

}  // namespace bcsp
