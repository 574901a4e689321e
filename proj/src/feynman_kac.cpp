#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/semigroup.hpp"

namespace ctgibbs {
namespace {

// Length of the h_m series so that the neglected terms are below 1e-17 of the
// value: tail / value <= e^s P(Poisson(s) > M) for node spread s.
std::size_t series_length(double spread) {
  if (spread <= 0.0) return 0;
  std::size_t m = 2;
  while (std::exp(spread) * poisson_tail_bound(spread, m) > 1e-17) ++m;
  return m;
}

// h_m(S + {b}) = h_m(S) + b h_{m-1}(S + {b}), in place.
void absorb(std::vector<double>& h, double b) {
  for (std::size_t m = 1; m < h.size(); ++m) h[m] += b * h[m - 1];
}

// sum_m h_m n! / (n+m)!
double normalized_series(const std::vector<double>& h, std::size_t n) {
  double coef = 1.0, sum = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) {
    if (m > 0) coef /= static_cast<double>(n + m);
    sum += h[m] * coef;
  }
  return sum;
}

// T^n e^{T r_min} / n!
double series_prefactor(std::size_t n, double r_min, double T) {
  if (T == 0.0) return n == 0 ? std::exp(0.0) : 0.0;
  return std::exp(static_cast<double>(n) * std::log(T) + T * r_min - std::lgamma(static_cast<double>(n) + 1.0));
}

struct PathClass {
  double weight;
  std::vector<double> h;
};

using ClassKey = std::pair<Word, std::vector<std::uint16_t>>;

constexpr std::size_t kMaxPathClasses = 4'000'000;

}  // namespace

double convolved_exponentials(std::span<const double> rates, double T) {
  if (rates.empty()) throw ArgumentError("convolved_exponentials: need at least one rate");
  if (!(T >= 0.0)) throw ArgumentError("convolved_exponentials: T must be >= 0");
  const double r_min = *std::min_element(rates.begin(), rates.end());
  const double r_max = *std::max_element(rates.begin(), rates.end());
  std::vector<double> h(series_length(T * (r_max - r_min)) + 1, 0.0);
  h[0] = 1.0;
  for (double r : rates) absorb(h, T * (r - r_min));
  const std::size_t n = rates.size() - 1;
  return series_prefactor(n, r_min, T) * normalized_series(h, n);
}

int default_series_order(const PotentialField& V, double T, double tol) {
  if (!(T >= 0.0)) throw ArgumentError("default_series_order: T must be >= 0");
  const double scale = std::exp(T * V.max());
  int n = 0;
  while (scale * poisson_tail_bound(T, static_cast<std::size_t>(n)) > tol) ++n;
  return n;
}

SeriesValue feynman_kac_series(const KernelField& kernel, const PotentialField& V, const PotentialField& f,
                               double T, Word x, std::optional<int> n_max_opt) {
  require_same_space(kernel.space(), V.space(), "feynman_kac_series");
  require_same_space(kernel.space(), f.space(), "feynman_kac_series");
  if (!kernel.normalized()) throw ArgumentError("feynman_kac_series: kernel must be normalized");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ArgumentError("feynman_kac_series: T must be >= 0");
  const auto& s = kernel.space();
  if (x >= s.size()) throw ArgumentError("feynman_kac_series: word out of range");
  const int n_max = n_max_opt.value_or(default_series_order(V, T));
  if (n_max < 0) throw ArgumentError("feynman_kac_series: n_max must be >= 0");

  // Distinct V-levels; I_V^T only sees the multiset of visited levels.
  std::vector<double> levels(V.values().begin(), V.values().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> level_of(s.size());
  for (Word w = 0; w < s.size(); ++w)
    level_of[w] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), V[w]) - levels.begin());
  const double r_min = levels.front() - 1.0;
  const std::size_t hlen = series_length(T * (levels.back() - levels.front())) + 1;
  auto offset = [&](Word w) { return T * (V[w] - 1.0 - r_min); };

  const double f_norm = f.sup_norm();
  const double envelope = f_norm * std::exp(T * V.max());

  std::map<ClassKey, PathClass> level;
  {
    std::vector<std::uint16_t> counts(levels.size(), 0);
    counts[level_of[x]] = 1;
    std::vector<double> h(hlen, 0.0);
    h[0] = 1.0;
    absorb(h, offset(x));
    level.emplace(ClassKey{x, std::move(counts)}, PathClass{1.0, std::move(h)});
  }

  SeriesValue out;
  out.n_max = n_max;
  auto contribution = [&](std::size_t n) {
    const double pre = series_prefactor(n, r_min, T);
    double acc = 0.0;
    for (const auto& [key, cls] : level) acc += cls.weight * f[key.first] * normalized_series(cls.h, n);
    out.paths += level.size();
    return pre * acc;
  };

  out.value = contribution(0);
  double pruned_bound = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    std::map<ClassKey, PathClass> next;
    for (const auto& [key, cls] : level) {
      for (int a = 0; a < s.alphabet(); ++a) {
        const Word y = s.prepend(a, key.first);
        ClassKey child{y, key.second};
        if (++child.second[level_of[y]] == 0) throw ArgumentError("feynman_kac_series: path too long");
        const double w = cls.weight * kernel.weight(key.first, a);
        auto it = next.find(child);
        if (it != next.end()) {
          it->second.weight += w;
        } else {
          std::vector<double> h = cls.h;
          absorb(h, offset(y));
          next.emplace(std::move(child), PathClass{w, std::move(h)});
        }
      }
    }
    if (next.size() > kMaxPathClasses)
      throw ArgumentError("feynman_kac_series: path enumeration exceeds the class budget; lower n_max");
    double max_w = 0.0;
    for (const auto& [key, cls] : next) max_w = std::max(max_w, cls.weight);
    const double tail_from_here = envelope * poisson_tail_bound(T, static_cast<std::size_t>(n - 1));
    for (auto it = next.begin(); it != next.end();) {
      if (it->second.weight < 1e-16 * max_w) {
        pruned_bound += it->second.weight * tail_from_here;
        it = next.erase(it);
      } else {
        ++it;
      }
    }
    level.swap(next);
    out.value += contribution(static_cast<std::size_t>(n));
  }
  out.tail_bound = envelope * poisson_tail_bound(T, static_cast<std::size_t>(n_max)) + pruned_bound;
  return out;
}

}  // namespace ctgibbs
