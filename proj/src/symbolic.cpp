#include "ctgibbs/symbolic.hpp"

#include <algorithm>
#include <cmath>

#include "ctgibbs/errors.hpp"

namespace ctgibbs {
namespace {

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

PotentialField ruelle_apply(const KernelField& kernel, const PotentialField& f) {
  require_same_space(kernel.space(), f.space(), "ruelle_apply");
  const auto& s = kernel.space();
  std::vector<double> g(s.size(), 0.0);
  for (Word x = 0; x < s.size(); ++x)
    for (int a = 0; a < s.alphabet(); ++a) g[x] += kernel.weight(x, a) * f[s.prepend(a, x)];
  return PotentialField(s, std::move(g));
}

Matrix transfer_matrix(const KernelField& kernel) {
  const auto& s = kernel.space();
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix t = Matrix::Zero(n, n);
  for (Word x = 0; x < s.size(); ++x)
    for (int a = 0; a < s.alphabet(); ++a)
      t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(s.prepend(a, x))) += kernel.weight(x, a);
  return t;
}

DiscretePerron discrete_perron(const KernelField& raw_weights) {
  const auto& s = raw_weights.space();
  DominantEigenpair ep = dominant_eigenpair(transfer_matrix(raw_weights));
  return DiscretePerron{ep.rho, PotentialField(s, to_std(ep.right)), Measure(s, to_std(ep.left)),
                        std::max(ep.residual_right, ep.residual_left), ep.iterations};
}

DiscretePerron discrete_perron(const PotentialField& raw) { return discrete_perron(KernelField::exp_of(raw)); }

KernelField normalize(const KernelField& raw_weights) {
  const auto& s = raw_weights.space();
  const DiscretePerron p = discrete_perron(raw_weights);
  const auto& h = p.eigenfunction;
  std::vector<double> w(raw_weights.weights().size());
  const std::size_t d = static_cast<std::size_t>(s.alphabet());
  for (Word x = 0; x < s.size(); ++x) {
    double row = 0.0;
    for (int a = 0; a < s.alphabet(); ++a) {
      double v = raw_weights.weight(x, a) * h[s.prepend(a, x)] / (p.eigenvalue * h[x]);
      w[x * d + static_cast<std::size_t>(a)] = v;
      row += v;
    }
    // Remove the last ulps of the eigen-solve so rows sum to 1.
    for (std::size_t a = 0; a < d; ++a) w[x * d + a] /= row;
  }
  return KernelField(s, std::move(w));
}

KernelField normalize(const PotentialField& raw) { return normalize(KernelField::exp_of(raw)); }

double discrete_pressure(const KernelField& raw_weights) {
  return std::log(discrete_perron(raw_weights).eigenvalue);
}

double discrete_pressure(const PotentialField& raw) { return discrete_pressure(KernelField::exp_of(raw)); }

Measure equilibrium_measure(const KernelField& kernel) {
  if (!kernel.normalized()) throw ArgumentError("equilibrium_measure: kernel must be normalized");
  const auto& s = kernel.space();
  DominantEigenpair ep = dominant_eigenpair(transfer_matrix(kernel));
  return Measure(s, to_std(ep.left));
}

Measure dual_step(const KernelField& kernel, const Measure& mu) {
  require_same_space(kernel.space(), mu.space(), "dual_step");
  const auto& s = kernel.space();
  std::vector<double> out(s.size(), 0.0);
  for (Word x = 0; x < s.size(); ++x)
    for (int a = 0; a < s.alphabet(); ++a) out[s.prepend(a, x)] += mu[x] * kernel.weight(x, a);
  return Measure(s, std::move(out));
}

double variation(const PotentialField& f, int j) {
  const auto& s = f.space();
  if (j < 0 || j > s.depth()) throw ArgumentError("variation: j must lie in [0, k]");
  const std::size_t buckets = checked_power(s.alphabet(), j);
  std::vector<double> lo(buckets, INFINITY), hi(buckets, -INFINITY);
  for (Word x = 0; x < s.size(); ++x) {
    const std::size_t p = x % buckets;
    lo[p] = std::min(lo[p], f[x]);
    hi[p] = std::max(hi[p], f[x]);
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < buckets; ++p) worst = std::max(worst, hi[p] - lo[p]);
  return worst;
}

VariationReport variation_profile(const PotentialField& f) {
  const auto& s = f.space();
  VariationReport r;
  r.lipschitz_bound = 0.0;
  for (int j = 0; j <= s.depth(); ++j) {
    r.var.push_back(variation(f, j));
    r.lipschitz_bound = std::max(r.lipschitz_bound, r.var.back() / std::pow(s.theta(), j));
  }
  return r;
}

double kernel_lipschitz_bound(const KernelField& kernel) {
  const auto& s = kernel.space();
  double bound = 0.0;
  for (Word x = 0; x < s.size(); ++x)
    for (int a = 0; a < s.alphabet(); ++a)
      for (Word y = 0; y < s.size(); ++y)
        for (int b = 0; b < s.alphabet(); ++b) {
          if (x == y && a == b) continue;
          const int agree = (a == b) ? 1 + s.agreement(x, y) : 0;
          const double diff = std::abs(kernel.log_weight(x, a) - kernel.log_weight(y, b));
          bound = std::max(bound, diff / std::pow(s.theta(), agree));
        }
  return bound;
}

}  // namespace ctgibbs
