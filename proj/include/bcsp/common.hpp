#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bcsp {

inline constexpr double kTol = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: wrong lengths, out-of-range indices, bad fields.
struct StructuralError : Error {
  using Error::Error;
};

// Well-formed input on which the requested operation is undefined.
struct DomainError : Error {
  using Error::Error;
};

struct CapExceeded : DomainError {
  using DomainError::DomainError;
};

struct DegenerateError : DomainError {
  using DomainError::DomainError;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t bound);
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }
  std::vector<std::uint32_t> permutation(std::size_t n);
  // Index drawn proportionally to the (unnormalized) weights.
  std::size_t categorical(const std::vector<double>& probs);

 private:
  std::mt19937_64 engine_;
};

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      std::size_t lo = count * w / t;
      std::size_t hi = count * (w + 1) / t;
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double binomial(int n, int k);
bool near_integer(double x, double tol = kTol);

}  // namespace bcsp
