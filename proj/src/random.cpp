#include "ctgibbs/random.hpp"

#include <cmath>

#include "ctgibbs/errors.hpp"

namespace ctgibbs {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) ^ mix64(index + kGolden));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive_seed(seed, stream)) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::exponential(double rate) {
  if (!(rate > 0.0)) throw ArgumentError("exponential rate must be > 0");
  return -std::log1p(-uniform()) / rate;
}

std::size_t CounterRng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // u landed on the rounding slack at the top; take the last positive entry.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  throw ArgumentError("categorical: weights must have positive total");
}

}  // namespace ctgibbs
