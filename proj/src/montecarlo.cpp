#include "ctgibbs/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/linalg.hpp"
#include "ctgibbs/semigroup.hpp"
#include "ctgibbs/symbolic.hpp"

namespace ctgibbs {
namespace {

void require_chain(const PotentialField& gamma, const KernelField& kernel, const char* where) {
  require_same_space(gamma.space(), kernel.space(), where);
  if (!(gamma.min() > 0.0)) throw ArgumentError(std::string(where) + ": gamma must be strictly positive");
  if (!kernel.normalized()) throw ArgumentError(std::string(where) + ": kernel must be normalized");
}

void require_horizon(double T, std::size_t n_traj, std::size_t min_traj, const char* where) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ArgumentError(std::string(where) + ": T must be positive");
  if (n_traj < min_traj) {
    throw ArgumentError(std::string(where) + ": n_traj must be >= " + std::to_string(min_traj));
  }
}

Word draw_start(const Measure& law, std::optional<Word> x0, CounterRng& rng) {
  if (x0) {
    if (*x0 >= law.size()) throw ArgumentError("x0 is not a word of the space");
    return *x0;
  }
  return rng.categorical(law.mass());
}

// Time average of f, exact when f is constant along the path.
double time_average(const Trajectory& traj, const PotentialField& f) {
  double acc = 0.0;
  for (std::size_t n = 0; n < traj.jumps(); ++n)
    acc += (traj.jump_times[n] / traj.horizon) * (f[traj.states[n + 1]] - f[traj.states[n]]);
  return f[traj.states.back()] - acc;
}

McEstimate mean_and_se(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = values.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), values.size()};
}

// (1/T) log mean exp(T a_i) from per-path time averages a_i, with the
// delta-method SE sd(w) / (mean(w) sqrt(n) T), w_i = exp(T (a_i - max a)).
McEstimate log_mean_exp(const std::vector<double>& averages, double T) {
  const double top = *std::max_element(averages.begin(), averages.end());
  std::vector<double> w(averages.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(T * (averages[i] - top));
  const McEstimate m = mean_and_se(w);
  return {top + std::log(m.estimate) / T, m.std_error / (m.estimate * T), averages.size()};
}

}  // namespace

Trajectory simulate(const PotentialField& gamma, const KernelField& kernel, Word x0, double T, CounterRng& rng) {
  require_chain(gamma, kernel, "simulate");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ArgumentError("simulate: T must be >= 0");
  const auto& s = kernel.space();
  if (x0 >= s.size()) throw ArgumentError("simulate: x0 is not a word of the space");
  Trajectory traj{s, x0, {}, {x0}, T};
  Word x = x0;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(gamma[x]);
    if (!(t <= T)) break;
    x = s.prepend(static_cast<int>(rng.categorical(kernel.row(x))), x);
    traj.jump_times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory simulate(const PotentialField& gamma, const KernelField& kernel, Word x0, double T, std::uint64_t seed) {
  CounterRng rng(seed);
  return simulate(gamma, kernel, x0, T, rng);
}

Measure empirical_measure(const Trajectory& traj) {
  if (!(traj.horizon > 0.0)) throw ArgumentError("empirical_measure: horizon must be positive");
  if (traj.states.size() != traj.jumps() + 1) throw ArgumentError("empirical_measure: malformed trajectory");
  std::vector<double> occupation(traj.space.size(), 0.0);
  double prev = 0.0;
  for (std::size_t n = 0; n < traj.jumps(); ++n) {
    occupation[traj.states[n]] += traj.jump_times[n] - prev;
    prev = traj.jump_times[n];
  }
  occupation[traj.states.back()] += traj.horizon - prev;
  for (auto& o : occupation) o /= traj.horizon;
  return {traj.space, std::move(occupation)};
}

double time_integral(const Trajectory& traj, const PotentialField& f) {
  double acc = 0.0;
  for (std::size_t n = 0; n < traj.jumps(); ++n)
    acc += traj.jump_times[n] * (f[traj.states[n + 1]] - f[traj.states[n]]);
  return f[traj.states.back()] * traj.horizon - acc;
}

double log_rn(const Trajectory& traj, const KernelField& base, const AdmissibleCandidate& cand) {
  const auto& s = base.space();
  require_same_space(s, cand.kernel.space(), "log_rn");
  double jumps = 0.0;
  for (std::size_t n = 0; n < traj.jumps(); ++n) {
    const Word parent = traj.states[n];
    const int a = s.first_symbol(traj.states[n + 1]);
    jumps += cand.kernel.log_weight(parent, a) - base.log_weight(parent, a) + std::log(cand.gamma[parent]);
  }
  const PotentialField drift = (cand.gamma * -1.0) + 1.0;
  return time_integral(traj, drift) + jumps;
}

McEstimate mc_scgf(const KernelField& base, const PotentialField& V, double T, std::size_t n_traj,
                   std::uint64_t seed, ScgfSampler sampler, std::optional<Word> x0) {
  require_same_space(base.space(), V.space(), "mc_scgf");
  require_horizon(T, n_traj, 2, "mc_scgf");
  const auto& s = base.space();
  const Measure mu_a = equilibrium_measure(base);
  const PotentialField unit = PotentialField::constant(s, 1.0);
  std::vector<double> averages(n_traj);
  if (sampler == ScgfSampler::base) {
    for (std::size_t i = 0; i < n_traj; ++i) {
      CounterRng rng(seed, i);
      const Word start = draw_start(mu_a, x0, rng);
      averages[i] = time_average(simulate(unit, base, start, T, rng), V);
    }
    return log_mean_exp(averages, T);
  }
  const GibbsChain chain = build_gibbs(base, V);
  const AdmissibleCandidate cand = chain.candidate();
  for (std::size_t i = 0; i < n_traj; ++i) {
    CounterRng rng(seed, i);
    const Word start = draw_start(chain.stationary, x0, rng);
    const Trajectory traj = simulate(chain.gamma, chain.kernel, start, T, rng);
    double log_w = time_integral(traj, V) - log_rn(traj, base, cand);
    if (!x0) log_w += std::log(mu_a[start]) - std::log(chain.stationary[start]);
    averages[i] = log_w / T;
  }
  return log_mean_exp(averages, T);
}

double finite_horizon_scgf(const KernelField& base, const PotentialField& V, double T) {
  require_same_space(base.space(), V.space(), "finite_horizon_scgf");
  if (!(T > 0.0)) throw ArgumentError("finite_horizon_scgf: T must be positive");
  const auto& s = base.space();
  const GeneratorMatrix gen = GeneratorMatrix::unit_rate(base);
  // e^{T(L+V)} 1 grows like e^{T lambda}; factor it out with the shift V - lambda.
  const double shift = perron_solve(base, V).lambda;
  const PotentialField u = uniformization_apply(gen, V + (-shift), PotentialField::constant(s, 1.0), T, 1e-13);
  return shift + std::log(equilibrium_measure(base).integrate(u)) / T;
}

McEstimate mc_entropy(const KernelField& base, const AdmissibleCandidate& cand, double T, std::size_t n_traj,
                      std::uint64_t seed, std::optional<Word> x0) {
  require_same_space(base.space(), cand.kernel.space(), "mc_entropy");
  require_horizon(T, n_traj, 2, "mc_entropy");
  std::vector<double> values(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i) {
    CounterRng rng(seed, i);
    const Word start = draw_start(cand.stationary, x0, rng);
    values[i] = -log_rn(simulate(cand.gamma, cand.kernel, start, T, rng), base, cand) / T;
  }
  return mean_and_se(values);
}

MartingaleReport martingale_check(const AdmissibleCandidate& cand, const PotentialField& G, double T,
                                  std::size_t n_traj, std::uint64_t seed) {
  require_same_space(cand.kernel.space(), G.space(), "martingale_check");
  require_horizon(T, n_traj, 2, "martingale_check");
  std::vector<double> jump_sums(n_traj), compensators(n_traj);
  const PotentialField rate_g = PotentialField::from_function(G.space(), [&](Word x) { return cand.gamma[x] * G[x]; });
  for (std::size_t i = 0; i < n_traj; ++i) {
    CounterRng rng(seed, i);
    const Word start = draw_start(cand.stationary, std::nullopt, rng);
    const Trajectory traj = simulate(cand.gamma, cand.kernel, start, T, rng);
    std::vector<double> terms(traj.jumps());
    for (std::size_t n = 0; n < traj.jumps(); ++n) terms[n] = G[traj.states[n + 1]];
    jump_sums[i] = terms.empty() ? 0.0 : pairwise_sum(terms);
    compensators[i] = time_integral(traj, rate_g);
  }
  MartingaleReport r;
  r.jump_sum = mean_and_se(jump_sums);
  r.compensator = mean_and_se(compensators);
  r.difference = r.jump_sum.estimate - r.compensator.estimate;
  r.combined_se = std::hypot(r.jump_sum.std_error, r.compensator.std_error);
  r.within_3se = std::abs(r.difference) <= 3.0 * r.combined_se;
  if (std::abs(r.difference) > 5.0 * r.combined_se) {
    std::ostringstream msg;
    msg << "martingale_check: sides differ by " << r.difference << " with combined SE " << r.combined_se;
    throw PropertyFailure(msg.str());
  }
  return r;
}

AnnealReport anneal(const KernelField& base, const PotentialField& V, const std::vector<double>& betas,
                    double T_per_stage, std::size_t n_traj, std::uint64_t seed) {
  require_same_space(base.space(), V.space(), "anneal");
  require_horizon(T_per_stage, n_traj, 2, "anneal");
  if (betas.empty()) throw ArgumentError("anneal: betas must be non-empty");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!std::isfinite(betas[i]) || betas[i] < 0.0) throw ArgumentError("anneal: betas must be finite and >= 0");
    if (i > 0 && !(betas[i] > betas[i - 1])) throw ArgumentError("anneal: betas must be strictly increasing");
  }
  const auto& s = base.space();
  AnnealReport report;
  const double top = V.max();
  for (Word x = 0; x < s.size(); ++x)
    if (V[x] == top) report.argmax.push_back(x);
  report.degenerate = report.argmax.size() > 1;
  PotentialField in_argmax = PotentialField::constant(s, 0.0);
  for (Word x : report.argmax) in_argmax = in_argmax + PotentialField::indicator(s, x);

  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double beta = betas[b];
    const GibbsChain chain = build_gibbs(base, V * beta);
    AnnealStage stage;
    stage.beta = beta;
    stage.analytic_mass = chain.stationary.integrate(in_argmax);
    stage.lambda = chain.lambda();
    stage.gap = stage.lambda - beta * top;
    const std::uint64_t stage_seed = derive_seed(seed, b);
    std::vector<double> fractions(n_traj);
    for (std::size_t i = 0; i < n_traj; ++i) {
      CounterRng rng(stage_seed, i);
      const Word start = draw_start(chain.stationary, std::nullopt, rng);
      fractions[i] = time_average(simulate(chain.gamma, chain.kernel, start, T_per_stage, rng), in_argmax);
    }
    stage.empirical_mass = mean_and_se(fractions);
    if (!report.stages.empty() && stage.analytic_mass < report.stages.back().analytic_mass - 1e-12) {
      std::ostringstream msg;
      msg << "anneal: argmax mass decreased from " << report.stages.back().analytic_mass << " to "
          << stage.analytic_mass << " at beta " << beta;
      throw PropertyFailure(msg.str());
    }
    report.stages.push_back(stage);
  }
  return report;
}

}  // namespace ctgibbs
