#include "ctgibbs/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/symbolic.hpp"

namespace ctgibbs {
namespace {

Vector to_eigen(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Matrix perturbed(const GeneratorMatrix& gen, const PotentialField& V) {
  Matrix a = gen.dense();
  for (Word x = 0; x < V.size(); ++x) a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += V[x];
  return a;
}

// v <- e^{T A} v for A = c (M - I), M >= 0.
Vector uniformized_exp(const Matrix& m, double c, Vector v, double T, double tol) {
  if (T == 0.0) return v;
  const double row_bound = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double growth_rate = c * std::max(0.0, row_bound - 1.0);
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(c * T / 16.0)));
  const double dt = T / static_cast<double>(steps);
  const double mean = c * dt;
  for (std::size_t j = 0; j < steps; ++j) {
    const double remaining = T - static_cast<double>(j + 1) * dt;
    const double step_tol = tol / (static_cast<double>(steps) * std::exp(growth_rate * remaining));
    const double norm = v.cwiseAbs().maxCoeff();
    double pmf = std::exp(-mean);
    Vector term = v;
    Vector sum = pmf * term;
    for (std::size_t n = 0;; ++n) {
      const double tail = norm * std::exp(mean * (row_bound - 1.0)) * poisson_tail_bound(mean * row_bound, n);
      if (tail <= step_tol || norm == 0.0) break;
      if (n > 100000) throw NumericError("uniformization series did not reach tolerance");
      term = m * term;
      pmf *= mean / static_cast<double>(n + 1);
      sum += pmf * term;
    }
    v = sum;
  }
  return v;
}

void check_time(double T, double tol) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw ArgumentError("time T must be finite and >= 0");
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be > 0");
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(PotentialField rate, KernelField kernel)
    : rate_(std::move(rate)), kernel_(std::move(kernel)) {
  require_same_space(rate_.space(), kernel_.space(), "GeneratorMatrix");
  if (!(rate_.min() > 0.0)) throw ArgumentError("generator rates must be strictly positive");
  if (!kernel_.normalized()) throw ArgumentError("generator kernel must be normalized");
}

GeneratorMatrix GeneratorMatrix::unit_rate(const KernelField& kernel) {
  return GeneratorMatrix(PotentialField::constant(kernel.space(), 1.0), kernel);
}

Matrix GeneratorMatrix::dense() const {
  const auto& s = space();
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix q = Matrix::Zero(n, n);
  for (Word x = 0; x < s.size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    for (int a = 0; a < s.alphabet(); ++a)
      q(i, static_cast<Eigen::Index>(s.prepend(a, x))) += rate_[x] * kernel_.weight(x, a);
    q(i, i) -= rate_[x];
  }
  return q;
}

PotentialField generator_apply(const GeneratorMatrix& gen, const PotentialField& f) {
  require_same_space(gen.space(), f.space(), "generator_apply");
  const auto& s = gen.space();
  std::vector<double> g(s.size(), 0.0);
  for (Word x = 0; x < s.size(); ++x) {
    double acc = 0.0;
    for (int a = 0; a < s.alphabet(); ++a) acc += gen.kernel().weight(x, a) * (f[s.prepend(a, x)] - f[x]);
    g[x] = gen.rate()[x] * acc;
  }
  return PotentialField(s, std::move(g));
}

double uniformization_constant(const GeneratorMatrix& gen, const PotentialField& V) {
  return gen.rate().max() + std::max(0.0, -V.min()) + 1.0;
}

PotentialField uniformization_apply(const GeneratorMatrix& gen, const PotentialField& V, const PotentialField& f,
                                    double T, double tol) {
  require_same_space(gen.space(), V.space(), "uniformization_apply");
  require_same_space(gen.space(), f.space(), "uniformization_apply");
  check_time(T, tol);
  const double c = uniformization_constant(gen, V);
  const Matrix m = perturbed(gen, V) / c + Matrix::Identity(V.size(), V.size());
  return PotentialField(gen.space(), to_std(uniformized_exp(m, c, to_eigen(f.values()), T, tol)));
}

std::vector<double> uniformization_apply_left(const GeneratorMatrix& gen, const PotentialField& V,
                                              std::span<const double> nu, double T, double tol) {
  require_same_space(gen.space(), V.space(), "uniformization_apply_left");
  if (nu.size() != gen.space().size()) throw ArgumentError("uniformization_apply_left: vector size mismatch");
  check_time(T, tol);
  const double c = uniformization_constant(gen, V);
  const Matrix m = (perturbed(gen, V) / c + Matrix::Identity(V.size(), V.size())).transpose();
  return to_std(uniformized_exp(m, c, to_eigen(nu), T, tol));
}

PerronSolution perron_solve(const KernelField& kernel, const PotentialField& rate, const PotentialField& V) {
  require_same_space(kernel.space(), V.space(), "perron_solve");
  const GeneratorMatrix gen(rate, kernel);
  const auto& s = kernel.space();
  const double c = uniformization_constant(gen, V);
  const Matrix a = perturbed(gen, V);
  const auto n = static_cast<Eigen::Index>(s.size());
  const DominantEigenpair ep = dominant_eigenpair(a + c * Matrix::Identity(n, n));

  PerronSolution sol{ep.rho - c, PotentialField(s, to_std(ep.right)), Measure(s, to_std(ep.left))};
  sol.iterations = ep.iterations;
  sol.residual_right = (a * ep.right - sol.lambda * ep.right).cwiseAbs().maxCoeff() / ep.right.cwiseAbs().maxCoeff();
  const Vector left_image = a.transpose() * ep.left;
  sol.residual_left = (left_image - sol.lambda * ep.left).cwiseAbs().maxCoeff() / ep.left.cwiseAbs().maxCoeff();
  sol.min_max_ratio = sol.F.min() / sol.F.max();

  const double scale = std::max(1.0, c);
  std::ostringstream why;
  why.precision(3);
  if (sol.residual_right > 1e-10 * scale || sol.residual_left > 1e-10 * scale)
    why << "perron_solve: residuals " << sol.residual_right << " / " << sol.residual_left << " exceed 1e-10";
  else if (!(sol.F.min() > 0.0))
    why << "perron_solve: eigenfunction not strictly positive";
  else if (std::abs(sol.lambda - sol.nu.integrate(V)) > 1e-10 * scale)
    why << "perron_solve: lambda differs from int V dnu by " << std::abs(sol.lambda - sol.nu.integrate(V));
  if (!why.str().empty()) throw NumericError(why.str(), {sol.residual_right, sol.residual_left});

  // L_A F / F = 1 + (lambda - V) / rate.
  double worst = 0.0;
  const PotentialField lf = ruelle_apply(kernel, sol.F);
  for (Word x = 0; x < s.size(); ++x)
    worst = std::max(worst, std::abs(lf[x] / sol.F[x] - (1.0 + (sol.lambda - V[x]) / rate[x])));
  if (worst > 1e-9 * scale / sol.min_max_ratio) {
    std::ostringstream msg;
    msg << "perron_solve: eigen-equation residual " << worst;
    throw NumericError(msg.str(), {sol.residual_right, sol.residual_left, worst});
  }
  return sol;
}

PerronSolution perron_solve(const KernelField& kernel, const PotentialField& V) {
  return perron_solve(kernel, PotentialField::constant(kernel.space(), 1.0), V);
}

double eigen_equation_check(const PerronSolution& sol, const KernelField& kernel, const PotentialField& V) {
  require_same_space(kernel.space(), V.space(), "eigen_equation_check");
  require_same_space(kernel.space(), sol.F.space(), "eigen_equation_check");
  const PotentialField lf = ruelle_apply(kernel, sol.F);
  double worst = 0.0;
  for (Word x = 0; x < V.size(); ++x) worst = std::max(worst, std::abs(lf[x] / sol.F[x] - (1.0 - V[x] + sol.lambda)));
  return worst;
}

DirichletForm dirichlet_form(const KernelField& kernel, const Measure& mu, const PotentialField& f) {
  require_same_space(kernel.space(), mu.space(), "dirichlet_form");
  require_same_space(kernel.space(), f.space(), "dirichlet_form");
  if (!kernel.normalized()) throw ArgumentError("dirichlet_form: kernel must be normalized");
  if (!mu.is_probability(1e-10) || dual_step(kernel, mu).max_abs_difference(mu) > 1e-10)
    throw ArgumentError("dirichlet_form: measure is not the equilibrium measure of the kernel");
  const auto& s = kernel.space();
  const PotentialField lf = ruelle_apply(kernel, f);
  DirichletForm out{0.0, 0.0};
  for (Word x = 0; x < s.size(); ++x) {
    out.quadratic += mu[x] * (f[x] - lf[x]) * f[x];
    double row = 0.0;
    for (int a = 0; a < s.alphabet(); ++a) {
      const double diff = f[x] - f[s.prepend(a, x)];
      row += kernel.weight(x, a) * diff * diff;
    }
    out.energy += 0.5 * mu[x] * row;
  }
  const double scale = std::max({1.0, out.energy, f.sup_norm() * f.sup_norm()});
  if (std::abs(out.quadratic - out.energy) > 1e-12 * scale)
    throw PropertyFailure("dirichlet_form: the two evaluations disagree");
  if (out.energy < 0.0) throw PropertyFailure("dirichlet_form: negative energy");
  return out;
}

double stationarity_defect(const Matrix& generator, const Measure& mu) {
  const Vector m = to_eigen(mu.mass());
  return (generator.transpose() * m).cwiseAbs().maxCoeff();
}

AdjointPair adjoint_and_symmetrize(const GeneratorMatrix& gen, const Measure& mu) {
  require_same_space(gen.space(), mu.space(), "adjoint_and_symmetrize");
  const Matrix q = gen.dense();
  const double scale = std::max(1.0, gen.rate().max());
  if (!mu.strictly_positive()) throw ArgumentError("adjoint_and_symmetrize: measure must be strictly positive");
  if (stationarity_defect(q, mu) > 1e-10 * scale)
    throw ArgumentError("adjoint_and_symmetrize: measure is not stationary for the generator");
  const auto n = q.rows();
  Matrix adj(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      adj(x, y) = mu[static_cast<Word>(y)] * q(y, x) / mu[static_cast<Word>(x)];
  AdjointPair out{adj, 0.5 * (q + adj)};
  if (out.adjoint.rowwise().sum().cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw PropertyFailure("adjoint_and_symmetrize: adjoint rows do not sum to zero");
  if (stationarity_defect(out.symmetric, mu) > 1e-10 * scale)
    throw PropertyFailure("adjoint_and_symmetrize: measure not stationary for the symmetrized generator");
  return out;
}

}  // namespace ctgibbs
