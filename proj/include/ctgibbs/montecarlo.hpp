#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctgibbs/fields.hpp"
#include "ctgibbs/gibbs.hpp"
#include "ctgibbs/random.hpp"

namespace ctgibbs {

/// Skeleton-chain sample path on [0, horizon]. states[0] = x0 and states[n]
/// is the word after the n-th clock ring at jump_times[n-1].
struct Trajectory {
  CylinderSpace space{1, 1};
  Word x0 = 0;
  std::vector<double> jump_times;
  std::vector<Word> states;
  double horizon = 0.0;

  std::size_t jumps() const { return jump_times.size(); }
};

/// Gillespie sampling: hold at x for Exp(gamma(x)), then prepend a symbol drawn
/// from kernel(x, .). A ring that reproduces the same word is still a jump.
Trajectory simulate(const PotentialField& gamma, const KernelField& kernel, Word x0, double T, std::uint64_t seed);
Trajectory simulate(const PotentialField& gamma, const KernelField& kernel, Word x0, double T, CounterRng& rng);

/// Occupation fractions; throws ArgumentError when the horizon is 0.
Measure empirical_measure(const Trajectory& traj);

/// Exact integral of f along the path. Uses the summation-by-parts form
/// f(last) T - sum_n T_n (f(xi_n) - f(xi_{n-1})), which is exact for constant f.
double time_integral(const Trajectory& traj, const PotentialField& f);

/// log dP~/dP on [0, T] for the candidate chain against the unit-rate chain
/// with kernel `base`:
///   int (1 - gamma~) ds + sum_jumps [log A~(x,a) - log A(x,a) + log gamma~(x)]
/// with x the parent word.
double log_rn(const Trajectory& traj, const KernelField& base, const AdmissibleCandidate& cand);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_traj = 0;
};

enum class ScgfSampler {
  base,              ///< plain average of exp(int V) under the a-priori chain
  gibbs_importance,  ///< paths from the Gibbs chain for V, reweighted by exp(int V - log dP~/dP)
};

/// (1/T) log E_{mu_A} exp(int_0^T V) with a delta-method standard error of the
/// log-mean. Trajectory i uses stream i of `seed`; x0 pins the start.
McEstimate mc_scgf(const KernelField& base, const PotentialField& V, double T, std::size_t n_traj,
                   std::uint64_t seed, ScgfSampler sampler = ScgfSampler::base,
                   std::optional<Word> x0 = std::nullopt);

/// The quantity mc_scgf estimates, computed exactly by uniformization:
/// (1/T) log <mu_A, e^{T(L+V)} 1>.
double finite_horizon_scgf(const KernelField& base, const PotentialField& V, double T);

/// -(1/T) E~[log dP~/dP] with paths from the candidate started at its
/// stationary law.
McEstimate mc_entropy(const KernelField& base, const AdmissibleCandidate& cand, double T, std::size_t n_traj,
                      std::uint64_t seed, std::optional<Word> x0 = std::nullopt);

struct MartingaleReport {
  McEstimate jump_sum;     ///< sum over jumps of G(word after the jump)
  McEstimate compensator;  ///< int gamma~ G ds
  double difference = 0.0;
  double combined_se = 0.0;  ///< sqrt(se_jump^2 + se_comp^2)
  bool within_3se = true;
};

/// Both sides of E~ sum_jumps G = E~ int gamma~ G under a stationary start.
/// Throws PropertyFailure beyond 5 combined standard errors.
MartingaleReport martingale_check(const AdmissibleCandidate& cand, const PotentialField& G, double T,
                                  std::size_t n_traj, std::uint64_t seed);

struct AnnealStage {
  double beta = 0.0;
  double analytic_mass = 0.0;  ///< Gibbs stationary mass of the argmax set
  McEstimate empirical_mass;   ///< mean occupation fraction of the argmax set
  double lambda = 0.0;
  double gap = 0.0;  ///< lambda - beta max V
};

struct AnnealReport {
  std::vector<Word> argmax;
  bool degenerate = false;  ///< argmax is not a single word
  std::vector<AnnealStage> stages;
};

/// Gibbs chains for beta V along an increasing ladder. Throws ArgumentError on
/// a non-increasing ladder and PropertyFailure if the analytic mass decreases.
AnnealReport anneal(const KernelField& base, const PotentialField& V, const std::vector<double>& betas,
                    double T_per_stage, std::size_t n_traj, std::uint64_t seed);

}  // namespace ctgibbs
