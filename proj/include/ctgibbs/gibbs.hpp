#pragma once

#include <cstdint>
#include <vector>

#include "ctgibbs/fields.hpp"
#include "ctgibbs/semigroup.hpp"

namespace ctgibbs {

/// Any chain gamma~ (L_{A~} - I) with gamma~ > 0 and A~ normalized, together
/// with its stationary law mu ∝ mu_{A~} / gamma~.
struct AdmissibleCandidate {
  PotentialField gamma;
  KernelField kernel;
  Measure stationary;

  /// Derives the stationary law; throws ArgumentError on invalid inputs.
  static AdmissibleCandidate make(PotentialField gamma, KernelField kernel);
  /// gamma ≡ 1, the a-priori kernel itself.
  static AdmissibleCandidate base(const KernelField& kernel);

  GeneratorMatrix generator() const { return GeneratorMatrix(gamma, kernel); }
};

/// Continuous-time Gibbs chain for V relative to the a-priori kernel A.
struct GibbsChain {
  KernelField base;
  PotentialField V;
  PerronSolution solution;
  PotentialField gamma;  ///< 1 - V + lambda_V
  KernelField kernel;    ///< A(x,a) F(ax) / (gamma(x) F(x))
  Measure stationary;    ///< ∝ mu_{B_V} / gamma_V

  double lambda() const { return solution.lambda; }
  AdmissibleCandidate candidate() const { return {gamma, kernel, stationary}; }
};

/// Perron solve followed by the Doob-type normalization. Throws
/// PropertyFailure if gamma_V is not strictly positive or rows do not sum to 1.
GibbsChain build_gibbs(const KernelField& base, const PotentialField& V);

/// The stationary law of the chain, recomputed from mu_{B_V} and validated
/// against the null left vector of the generator (1e-10).
Measure stationary_measure(const GibbsChain& chain);

struct EigenprobabilityCheck {
  double residual;        ///< ||nu~ (L+V) - lambda nu~||_inf
  double distance_to_nu;  ///< max |nu~ - sol.nu|
};

/// nu~ ∝ mu_{B_V,gamma_V} / F is an eigenprobability of (L+V)*.
EigenprobabilityCheck eigenprobability_relation(const GibbsChain& chain);

/// Long-run relative entropy of the candidate against the a-priori chain:
///   int (gamma~ - 1) dmu~ + int gamma~ sum_a A~(x,a) [log A(x,a) - log A~(x,a) - log gamma~(x)] dmu~.
double relative_entropy(const AdmissibleCandidate& cand, const KernelField& base);

/// gamma~ = exp(U[-1,1]) per word, A~ = normalize(U[-1,1] raw), from one seed.
AdmissibleCandidate random_candidate(const CylinderSpace& space, std::uint64_t seed);

struct AuditEntry {
  std::uint64_t seed;
  double entropy;
  double integral_V;
  double gap;  ///< lambda_V - (entropy + integral_V), >= 0
};

struct PressureReport {
  double lambda;
  double gibbs_entropy;
  double gibbs_value;  ///< H(P^V|P) + int V dmu_{B_V,gamma_V}
  double audit_max;    ///< -inf when no audits ran
  std::vector<AuditEntry> audits;
};

/// Variational principle audit. Candidate i uses seed derive_seed(root, i).
/// Throws PropertyFailure when the Gibbs value misses lambda_V by 1e-9, an
/// entropy is positive, or any audit exceeds lambda_V + 1e-6.
PressureReport pressure(const KernelField& base, const PotentialField& V, std::size_t audit_count,
                        std::uint64_t seed);

}  // namespace ctgibbs
