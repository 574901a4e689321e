#include "ctgibbs/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/gibbs.hpp"
#include "ctgibbs/linalg.hpp"
#include "ctgibbs/random.hpp"
#include "ctgibbs/semigroup.hpp"

namespace ctgibbs {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

PotentialField random_potential(const CylinderSpace& s, CounterRng& rng) {
  std::vector<double> v(s.size());
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return PotentialField(s, std::move(v));
}

// Solves (H + delta I) p = rhs for symmetric PSD H, raising delta until the
// factorization succeeds and p is an ascent direction for rhs.
Vector regularized_solve(const Matrix& h, const Vector& rhs) {
  const double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
  const auto n = h.rows();
  for (double delta = 1e-12 * scale; delta < 1e12 * scale; delta *= 10.0) {
    Eigen::LDLT<Matrix> ldlt(h + delta * Matrix::Identity(n, n));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
    Vector p = ldlt.solve(rhs);
    if (p.allFinite() && p.dot(rhs) > 0.0) return p;
  }
  return rhs;
}

// -------- primal: J(g) = sum_x nu(x) [sum_a A(x,a) e^{g(ax) - g(x)} - 1], g(0) = 0

struct PrimalEval {
  double value;
  double magnitude;  // sum of |terms|, for rounding-aware comparisons
  Vector grad;       // reduced (words 1..n-1)
  Matrix hess;
};

class PrimalObjective {
 public:
  PrimalObjective(const KernelField& k, const Measure& nu) : k_(k), nu_(nu), n_(k.space().size()) {}

  std::vector<double> full(const Vector& z) const {
    std::vector<double> g(n_, 0.0);
    for (std::size_t i = 1; i < n_; ++i) g[i] = z[static_cast<Eigen::Index>(i - 1)];
    return g;
  }

  double value(const Vector& z) const { return eval(z, false).value; }

  PrimalEval eval(const Vector& z, bool derivatives = true) const {
    const auto& s = k_.space();
    const std::vector<double> g = full(z);
    Vector grad = Vector::Zero(static_cast<Eigen::Index>(n_));
    Matrix hess = derivatives ? Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_)) : Matrix();
    double value = 0.0, magnitude = 0.0;
    for (Word x = 0; x < n_; ++x) {
      if (nu_[x] == 0.0) continue;
      double row = 0.0;
      for (int a = 0; a < s.alphabet(); ++a) {
        const Word y = s.prepend(a, x);
        const double t = nu_[x] * k_.weight(x, a) * std::exp(g[y] - g[x]);
        row += t;
        if (!derivatives || y == x) continue;
        const auto ix = static_cast<Eigen::Index>(x), iy = static_cast<Eigen::Index>(y);
        grad[iy] += t;
        grad[ix] -= t;
        hess(iy, iy) += t;
        hess(ix, ix) += t;
        hess(ix, iy) -= t;
        hess(iy, ix) -= t;
      }
      value += row - nu_[x];
      magnitude += row + nu_[x];
    }
    const auto m = static_cast<Eigen::Index>(n_ - 1);
    return {value, magnitude, derivatives ? Vector(grad.tail(m)) : Vector(),
            derivatives ? Matrix(hess.bottomRightCorner(m, m)) : Matrix()};
  }

 private:
  const KernelField& k_;
  const Measure& nu_;
  std::size_t n_;
};

void check_primal_gradient(const PrimalObjective& obj, const Vector& z, const Vector& grad) {
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vector zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    const double fd = (obj.value(zp) - obj.value(zm)) / (2.0 * h);
    if (std::abs(fd - grad[i]) > 1e-6 * std::max(1.0, std::abs(grad[i]))) {
      std::ostringstream msg;
      msg << "rate_primal: analytic gradient " << grad[i] << " disagrees with finite difference " << fd;
      throw PropertyFailure(msg.str());
    }
  }
}

// -------- dual: Phi(V) = int V dnu - lambda_V, V(0) = 0

struct DualEval {
  double value;
  Vector grad;  // reduced
  std::vector<double> measure;
};

class DualObjective {
 public:
  DualObjective(const KernelField& k, const Measure& nu) : k_(k), nu_(nu), n_(k.space().size()) {}

  PotentialField full(const Vector& z) const {
    std::vector<double> v(n_, 0.0);
    for (std::size_t i = 1; i < n_; ++i) v[i] = z[static_cast<Eigen::Index>(i - 1)];
    return PotentialField(k_.space(), std::move(v));
  }

  DualEval eval(const Vector& z) const {
    const PotentialField V = full(z);
    const GibbsChain chain = build_gibbs(k_, V);
    DualEval out{nu_.integrate(V) - chain.lambda(), Vector(static_cast<Eigen::Index>(n_ - 1)),
                 std::vector<double>(chain.stationary.mass().begin(), chain.stationary.mass().end())};
    for (std::size_t i = 1; i < n_; ++i) out.grad[static_cast<Eigen::Index>(i - 1)] = nu_[i] - out.measure[i];
    return out;
  }

  // d mu / dV by central differences of the exact gradient; PSD Hessian of lambda_V.
  Matrix lambda_hessian(const Vector& z) const {
    const double h = 1e-5;
    const auto m = z.size();
    Matrix hess(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      Vector zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const DualEval ep = eval(zp), em = eval(zm);
      for (Eigen::Index i = 0; i < m; ++i)
        hess(i, j) = (ep.measure[static_cast<std::size_t>(i + 1)] - em.measure[static_cast<std::size_t>(i + 1)]) / (2.0 * h);
    }
    return 0.5 * (hess + hess.transpose());
  }

 private:
  const KernelField& k_;
  const Measure& nu_;
  std::size_t n_;
};

void require_probability(const KernelField& base, const Measure& nu, const char* where) {
  require_same_space(base.space(), nu.space(), where);
  if (!base.normalized()) throw ArgumentError(std::string(where) + ": a-priori kernel must be normalized");
  if (!nu.is_probability(1e-10)) throw ArgumentError(std::string(where) + ": nu must be a probability");
}

}  // namespace

double scgf(const KernelField& base, const PotentialField& V) { return perron_solve(base, V).lambda; }

ScgfPropertyReport scgf_properties_check(const KernelField& base, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("scgf_properties_check: trials must be >= 1");
  const auto& s = base.space();
  ScgfPropertyReport r;
  r.trials = trials;
  r.max_lipschitz_excess = -std::numeric_limits<double>::infinity();
  r.max_convexity_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t);
    const PotentialField V = random_potential(s, rng);
    const PotentialField U = random_potential(s, rng);
    const double alpha = rng.uniform();
    const double qv = scgf(base, V), qu = scgf(base, U);
    const double lip = std::abs(qv - qu) - (V - U).sup_norm();
    const double cvx = scgf(base, V * alpha + U * (1.0 - alpha)) - (alpha * qv + (1.0 - alpha) * qu);
    r.max_lipschitz_excess = std::max(r.max_lipschitz_excess, lip);
    r.max_convexity_excess = std::max(r.max_convexity_excess, cvx);
    if (lip > 1e-12) ++r.lipschitz_violations;
    if (cvx > 1e-10) ++r.convexity_violations;
  }
  if (r.lipschitz_violations + r.convexity_violations > 0) {
    std::ostringstream msg;
    msg << "scgf_properties_check: " << r.lipschitz_violations << " Lipschitz and " << r.convexity_violations
        << " convexity violations";
    throw PropertyFailure(msg.str());
  }
  return r;
}

RateFunctionResult rate_primal(const KernelField& base, const Measure& nu, const RateOptions& options) {
  require_probability(base, nu, "rate_primal");
  const std::size_t n = base.space().size();
  RateFunctionResult out;
  out.route = RateRoute::primal;
  if (n == 1) {
    out.potential = {0.0};
    return out;
  }
  const PrimalObjective obj(base, nu);
  Vector z = Vector::Zero(static_cast<Eigen::Index>(n - 1));
  PrimalEval cur = obj.eval(z);
  check_primal_gradient(obj, z, cur.grad);

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    if (cur.grad.cwiseAbs().maxCoeff() <= options.gradient_tol) break;
    const Vector p = regularized_solve(cur.hess, -cur.grad);
    const double slope = cur.grad.dot(p);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Vector trial = z + t * p;
      const double v = obj.value(trial);
      if (std::isfinite(v) && v <= cur.value + 1e-4 * t * slope + 8.0 * kEps * cur.magnitude) {
        z = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    cur = obj.eval(z);
  }
  out.iterations = it;
  out.gradient_norm = cur.grad.cwiseAbs().maxCoeff();
  if (out.gradient_norm > 1e-8) {
    std::ostringstream msg;
    msg << "rate_primal: stopped with gradient norm " << out.gradient_norm << " after " << it << " iterations";
    throw NumericError(msg.str(), {out.gradient_norm});
  }
  out.value = -cur.value;
  out.potential = obj.full(z);
  return out;
}

RateFunctionResult rate_dual(const KernelField& base, const Measure& nu, const RateOptions& options,
                             std::optional<PotentialField> start) {
  require_probability(base, nu, "rate_dual");
  const auto& s = base.space();
  const std::size_t n = s.size();
  RateFunctionResult out;
  out.route = RateRoute::dual;
  out.attained = nu.strictly_positive();
  const DualObjective obj(base, nu);
  Vector z = Vector::Zero(static_cast<Eigen::Index>(n - 1));
  if (start) {
    require_same_space(s, start->space(), "rate_dual start");
    for (std::size_t i = 1; i < n; ++i) z[static_cast<Eigen::Index>(i - 1)] = (*start)[i] - (*start)[0];
  }
  DualEval cur = obj.eval(z);
  const std::size_t cap = out.attained ? options.max_iterations : options.unattained_iterations;
  std::size_t it = 0;
  for (; n > 1 && it < cap; ++it) {
    if (cur.grad.cwiseAbs().maxCoeff() <= options.gradient_tol) break;
    Vector p = regularized_solve(obj.lambda_hessian(z), cur.grad);
    if (!out.attained) {
      // Keep V inside the cap; the supremum lies at infinity.
      const double room = options.unattained_potential_cap;
      double scale = 1.0;
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double target = z[i] + p[i];
        if (std::abs(target) > room && p[i] != 0.0)
          scale = std::min(scale, std::max(0.0, (std::copysign(room, p[i]) - z[i]) / p[i]));
      }
      p *= scale;
      if (p.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    const double slope = cur.grad.dot(p);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      DualEval trial;
      try {
        trial = obj.eval(z + t * p);
      } catch (const NumericError&) {
        continue;
      }
      if (trial.value >= cur.value + 1e-4 * t * slope - 8.0 * kEps * std::max(1.0, std::abs(cur.value))) {
        z += t * p;
        cur = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  out.iterations = it;
  out.gradient_norm = n > 1 ? cur.grad.cwiseAbs().maxCoeff() : 0.0;
  out.value = cur.value;
  const PotentialField V = obj.full(z);
  out.potential.assign(V.values().begin(), V.values().end());
  out.optimal_measure = cur.measure;
  out.tv_to_target = Measure(s, cur.measure).total_variation(nu);
  if (out.attained && out.gradient_norm > 1e-8) {
    std::ostringstream msg;
    msg << "rate_dual: stopped with gradient norm " << out.gradient_norm << " after " << it << " iterations";
    throw NumericError(msg.str(), {out.gradient_norm});
  }
  return out;
}

EquilibriumIdentityReport equilibrium_identity_check(const KernelField& base, const PotentialField& V,
                                                     std::uint64_t seed) {
  const GibbsChain chain = build_gibbs(base, V);
  const Measure& mu = chain.stationary;
  EquilibriumIdentityReport r;
  r.lambda = chain.lambda();
  r.integral_V = mu.integrate(V);
  r.rate = rate_primal(base, mu).value;
  r.identity_gap = std::abs(r.lambda - (r.integral_V - r.rate));
  r.starts = 5;
  r.max_start_spread = 0.0;
  std::vector<Measure> optima;
  for (std::size_t i = 0; i < r.starts; ++i) {
    CounterRng rng(seed, i);
    const RateFunctionResult d = rate_dual(base, mu, {}, random_potential(base.space(), rng));
    optima.emplace_back(base.space(), d.optimal_measure);
  }
  for (const auto& a : optima)
    for (const auto& b : optima) r.max_start_spread = std::max(r.max_start_spread, a.total_variation(b));
  if (r.identity_gap > 1e-7) throw PropertyFailure("equilibrium_identity_check: lambda_V != int V dmu - I(mu)");
  if (r.max_start_spread > 1e-7) throw PropertyFailure("equilibrium_identity_check: dual maximizers disagree");
  return r;
}

}  // namespace ctgibbs
