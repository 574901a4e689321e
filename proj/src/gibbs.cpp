#include "ctgibbs/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/random.hpp"
#include "ctgibbs/symbolic.hpp"

namespace ctgibbs {
namespace {

Measure reweighted_stationary(const KernelField& kernel, const PotentialField& gamma) {
  const Measure mu = equilibrium_measure(kernel);
  std::vector<double> w(mu.size());
  for (Word x = 0; x < mu.size(); ++x) w[x] = mu[x] / gamma[x];
  return Measure::normalized(kernel.space(), std::move(w));
}

}  // namespace

AdmissibleCandidate AdmissibleCandidate::make(PotentialField gamma, KernelField kernel) {
  require_same_space(gamma.space(), kernel.space(), "AdmissibleCandidate");
  if (!(gamma.min() > 0.0)) throw ArgumentError("candidate gamma must be strictly positive");
  if (!kernel.normalized()) throw ArgumentError("candidate kernel must be normalized");
  Measure stationary = reweighted_stationary(kernel, gamma);
  return AdmissibleCandidate{std::move(gamma), std::move(kernel), std::move(stationary)};
}

AdmissibleCandidate AdmissibleCandidate::base(const KernelField& kernel) {
  return make(PotentialField::constant(kernel.space(), 1.0), kernel);
}

GibbsChain build_gibbs(const KernelField& base, const PotentialField& V) {
  require_same_space(base.space(), V.space(), "build_gibbs");
  if (!base.normalized()) throw ArgumentError("build_gibbs: a-priori kernel must be normalized");
  const auto& s = base.space();
  PerronSolution sol = perron_solve(base, V);
  PotentialField gamma = (V * -1.0) + (1.0 + sol.lambda);
  if (!(gamma.min() > 0.0)) throw PropertyFailure("build_gibbs: gamma_V is not strictly positive; the solve failed");

  const std::size_t d = static_cast<std::size_t>(s.alphabet());
  std::vector<double> w(s.size() * d);
  double worst = 0.0;
  for (Word x = 0; x < s.size(); ++x) {
    double row = 0.0;
    for (int a = 0; a < s.alphabet(); ++a) {
      const double v = base.weight(x, a) * sol.F[s.prepend(a, x)] / (gamma[x] * sol.F[x]);
      w[x * d + static_cast<std::size_t>(a)] = v;
      row += v;
    }
    worst = std::max(worst, std::abs(row - 1.0));
    for (std::size_t a = 0; a < d; ++a) w[x * d + a] /= row;
  }
  if (worst > 1e-9 / sol.min_max_ratio) {
    std::ostringstream msg;
    msg << "build_gibbs: L_A F / (gamma F) deviates from 1 by " << worst;
    throw PropertyFailure(msg.str());
  }
  KernelField kernel(s, std::move(w));
  Measure stationary = reweighted_stationary(kernel, gamma);
  GibbsChain chain{base, V, std::move(sol), std::move(gamma), std::move(kernel), std::move(stationary)};
  chain.stationary = stationary_measure(chain);
  return chain;
}

Measure stationary_measure(const GibbsChain& chain) {
  Measure mu = reweighted_stationary(chain.kernel, chain.gamma);
  const GeneratorMatrix gen(chain.gamma, chain.kernel);
  const double defect = stationarity_defect(gen.dense(), mu);
  if (defect > 1e-10 * std::max(1.0, chain.gamma.max())) {
    std::ostringstream msg;
    msg << "stationary_measure: generator null-vector defect " << defect;
    throw NumericError(msg.str(), {defect});
  }
  return mu;
}

EigenprobabilityCheck eigenprobability_relation(const GibbsChain& chain) {
  const auto& s = chain.base.space();
  std::vector<double> w(s.size());
  for (Word x = 0; x < s.size(); ++x) w[x] = chain.stationary[x] / chain.solution.F[x];
  const Measure nu_tilde = Measure::normalized(s, std::move(w));

  Matrix a = GeneratorMatrix::unit_rate(chain.base).dense();
  for (Word x = 0; x < s.size(); ++x) a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += chain.V[x];
  const Vector nu = Eigen::Map<const Vector>(nu_tilde.mass().data(), static_cast<Eigen::Index>(s.size()));
  const double residual = (a.transpose() * nu - chain.lambda() * nu).cwiseAbs().maxCoeff();
  return {residual, nu_tilde.max_abs_difference(chain.solution.nu)};
}

double relative_entropy(const AdmissibleCandidate& cand, const KernelField& base) {
  require_same_space(cand.kernel.space(), base.space(), "relative_entropy");
  if (!(cand.gamma.min() > 0.0) || !cand.kernel.normalized() || !base.normalized() ||
      !cand.stationary.is_probability(1e-10))
    throw ArgumentError("relative_entropy: invalid candidate");
  const GeneratorMatrix gen(cand.gamma, cand.kernel);
  if (stationarity_defect(gen.dense(), cand.stationary) > 1e-10 * std::max(1.0, cand.gamma.max()))
    throw ArgumentError("relative_entropy: candidate stationary law does not annihilate its generator");
  const auto& s = base.space();
  double h = 0.0;
  for (Word x = 0; x < s.size(); ++x) {
    const double g = cand.gamma[x];
    double jump = 0.0;
    for (int a = 0; a < s.alphabet(); ++a)
      jump += cand.kernel.weight(x, a) * (base.log_weight(x, a) - cand.kernel.log_weight(x, a) - std::log(g));
    h += cand.stationary[x] * ((g - 1.0) + g * jump);
  }
  return h;
}

AdmissibleCandidate random_candidate(const CylinderSpace& space, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> gamma(space.size()), raw(space.size());
  for (auto& g : gamma) g = std::exp(rng.uniform(-1.0, 1.0));
  for (auto& r : raw) r = rng.uniform(-1.0, 1.0);
  return AdmissibleCandidate::make(PotentialField(space, std::move(gamma)),
                                   normalize(PotentialField(space, std::move(raw))));
}

PressureReport pressure(const KernelField& base, const PotentialField& V, std::size_t audit_count,
                        std::uint64_t seed) {
  const GibbsChain chain = build_gibbs(base, V);
  PressureReport report;
  report.lambda = chain.lambda();
  report.gibbs_entropy = relative_entropy(chain.candidate(), base);
  report.gibbs_value = report.gibbs_entropy + chain.stationary.integrate(V);
  report.audit_max = -std::numeric_limits<double>::infinity();
  if (std::abs(report.gibbs_value - report.lambda) > 1e-9)
    throw PropertyFailure("pressure: Gibbs candidate misses lambda_V by more than 1e-9");
  for (std::size_t i = 0; i < audit_count; ++i) {
    const std::uint64_t cand_seed = derive_seed(seed, i);
    const AdmissibleCandidate cand = random_candidate(base.space(), cand_seed);
    AuditEntry e{cand_seed, relative_entropy(cand, base), cand.stationary.integrate(V), 0.0};
    e.gap = report.lambda - (e.entropy + e.integral_V);
    if (e.entropy > 1e-12) throw PropertyFailure("pressure: positive relative entropy in audit");
    if (e.gap < -1e-6) throw PropertyFailure("pressure: audit candidate exceeds lambda_V (variational principle)");
    report.audit_max = std::max(report.audit_max, e.entropy + e.integral_V);
    report.audits.push_back(e);
  }
  return report;
}

}  // namespace ctgibbs
