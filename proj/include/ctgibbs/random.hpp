#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace ctgibbs {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Child seed for work item `index` under `root`. Used for audit candidates,
/// trajectories and multi-start searches alike.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Counter-based generator: the i-th output is mix64(key + i * golden), so a
/// stream is fully determined by (seed, stream) and never shares state.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Inverse-CDF exponential sample.
  double exponential(double rate);
  /// Index drawn with probabilities proportional to `weights`.
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ctgibbs
