#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace roofbound {

/// Counter-based splittable generator.
///
/// Output i of a stream with key K is mix(K + (i + 1) * gamma), i.e. the
/// SplitMix64 sequence indexed by an explicit counter. `split(n)` derives an
/// independent child key from the parent key and n alone, so a child stream
/// does not depend on how many values were drawn from the parent. Every
/// stochastic operation takes a stream explicitly; restart r of a batch uses
/// `split(r)`, which makes batch results independent of scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)), seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

  Rng split(std::uint64_t stream) const {
    Rng child;
    child.key_ = mix(key_ ^ mix(stream + 0x9e3779b97f4a7c15ULL * 3));
    child.seed_ = seed_;
    return child;
  }

  /// Seed of the master stream this generator descends from.
  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  /// Standard normal via Box-Muller (one output per two uniforms, no cache).
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : (*this)() % n; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::uint64_t seed_ = 0;
};

}  // namespace roofbound
