#pragma once

#include <vector>

#include "ctgibbs/fields.hpp"
#include "ctgibbs/linalg.hpp"

namespace ctgibbs {

/// (L f)(x) = sum_a weight(x, a) f(ax).
PotentialField ruelle_apply(const KernelField& kernel, const PotentialField& f);

/// Transfer matrix T[x][ax] += weight(x, a).
Matrix transfer_matrix(const KernelField& kernel);

struct DiscretePerron {
  double eigenvalue;  ///< spectral radius of the transfer operator
  PotentialField eigenfunction;  ///< right vector h > 0, max h = 1
  Measure eigenmeasure;          ///< left eigenprobability
  double residual;
  std::size_t iterations;
};

/// Dominant eigen-triple of the transfer operator with weights e^{raw}.
DiscretePerron discrete_perron(const PotentialField& raw);
/// Same, for weights given per (parent, symbol); need not be normalized.
DiscretePerron discrete_perron(const KernelField& raw_weights);

/// weight(x, a) = e^{raw(ax)} h(ax) / (lambda h(x)).
KernelField normalize(const PotentialField& raw);
KernelField normalize(const KernelField& raw_weights);

/// log of the dominant transfer eigenvalue; 0 for a normalized kernel.
double discrete_pressure(const PotentialField& raw);
double discrete_pressure(const KernelField& raw_weights);

/// Stationary law of the word chain x -> ax with probability weight(x, a).
Measure equilibrium_measure(const KernelField& kernel);

/// One dual step of the word chain: (mu P)(y) = sum_{x,a: ax = y} mu(x) weight(x, a).
Measure dual_step(const KernelField& kernel, const Measure& mu);

/// max |f(x) - f(y)| over words agreeing on the first j symbols.
double variation(const PotentialField& f, int j);

struct VariationReport {
  std::vector<double> var;  ///< var_0 .. var_k
  double lipschitz_bound;   ///< max_j var_j / theta^j
};

VariationReport variation_profile(const PotentialField& f);

/// Lipschitz bound of the log-weights seen as a depth-(k+1) function of ax.
double kernel_lipschitz_bound(const KernelField& kernel);

}  // namespace ctgibbs
