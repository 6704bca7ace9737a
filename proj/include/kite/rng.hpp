#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kite {

// Counter-based SplitMix64 generator. Every sampler in the library draws from
// one of these, so all stochastic outputs are reproducible bit for bit across
// platforms. Nothing in the library uses <random> distributions, whose output
// sequences are implementation-defined.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), using the top 53 bits.
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(uniform() * static_cast<double>(n));
  }

  // Standard normal via Box-Muller; generates in pairs and caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Index drawn from a probability vector (entries >= 0, summing to ~1).
  int categorical(const std::vector<double>& probs) {
    if (probs.empty()) {
      throw std::invalid_argument("categorical: empty probability vector");
    }
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
      acc += probs[a];
      if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kite
