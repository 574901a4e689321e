#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctgibbs/fields.hpp"
#include "ctgibbs/linalg.hpp"

namespace ctgibbs {

/// (G f)(x) = rate(x) * sum_a kernel(x, a) [f(ax) - f(x)].
class GeneratorMatrix {
 public:
  GeneratorMatrix(PotentialField rate, KernelField kernel);
  /// The a-priori generator L_A - I.
  static GeneratorMatrix unit_rate(const KernelField& kernel);

  const CylinderSpace& space() const { return kernel_.space(); }
  const PotentialField& rate() const { return rate_; }
  const KernelField& kernel() const { return kernel_; }
  /// Q(x, y) with Q 1 = 0; self-jumps at constant words cancel on the diagonal.
  Matrix dense() const;

 private:
  PotentialField rate_;
  KernelField kernel_;
};

PotentialField generator_apply(const GeneratorMatrix& gen, const PotentialField& f);

/// c = max(rate) + max(0, -min V) + 1; makes L + V + cI nonnegative.
double uniformization_constant(const GeneratorMatrix& gen, const PotentialField& V);

/// e^{T(L+V)} f by the Poisson-weighted series in M = (L+V)/c + I, with
/// steps of c*dt <= 16 and a truncation rule keeping the sup-norm error <= tol.
PotentialField uniformization_apply(const GeneratorMatrix& gen, const PotentialField& V, const PotentialField& f,
                                    double T, double tol = 1e-12);
/// Row-vector action nu e^{T(L+V)} (the dual semigroup on measures).
std::vector<double> uniformization_apply_left(const GeneratorMatrix& gen, const PotentialField& V,
                                              std::span<const double> nu, double T, double tol = 1e-12);

/// Density at T of the convolution of t -> e^{r_i t}, i = 0..n, i.e.
///   int over {t_0 + .. + t_{n-1} <= T} of exp(sum_i r_i t_i) with t_n = T - sum.
/// Evaluated as T^n e^{T r_min} sum_m h_m(T(r - r_min)) / (n + m)!, a series of
/// nonnegative terms that covers the confluent case without special-casing.
double convolved_exponentials(std::span<const double> rates, double T);

struct SeriesValue {
  double value = 0.0;
  /// Bound on |exact - value| from truncation at n_max plus pruned paths.
  double tail_bound = 0.0;
  int n_max = 0;
  std::size_t paths = 0;  ///< merged path classes evaluated
};

/// Smallest n with e^{T max(V)} P(Poisson(T) > n) <= tol.
int default_series_order(const PotentialField& V, double T, double tol = 1e-10);

/// P_T^V f(x) for the unit-rate chain by summing over preimage paths:
/// e^{T V(x)} f(x) e^{-T} plus, for n = 1..n_max, the weight product along
/// x -> a_1 x -> ... times f(end) times the path integral I_V^T, which is
/// convolved_exponentials at rates V(step) - 1. Paths sharing an endpoint and
/// a multiset of visited V-values share I_V^T and are merged.
SeriesValue feynman_kac_series(const KernelField& kernel, const PotentialField& V, const PotentialField& f,
                               double T, Word x, std::optional<int> n_max = std::nullopt);

struct PerronSolution {
  double lambda = 0.0;  ///< principal eigenvalue of L + V (1/time)
  PotentialField F;     ///< eigenfunction, max F = 1
  Measure nu;           ///< eigenprobability
  double residual_right = 0.0;  ///< ||(L+V)F - lambda F||_inf / ||F||_inf
  double residual_left = 0.0;   ///< ||nu (L+V) - lambda nu||_inf / ||nu||_inf
  double min_max_ratio = 0.0;   ///< min F / max F
  std::size_t iterations = 0;
};

/// Principal eigen-triple of rate (L_A - I) + V by power iteration on L + V + cI.
/// Throws NumericError when a residual or the identity lambda = int V dnu fails.
PerronSolution perron_solve(const KernelField& kernel, const PotentialField& rate, const PotentialField& V);
PerronSolution perron_solve(const KernelField& kernel, const PotentialField& V);

/// max_x | sum_a kernel(x,a) F(ax) / F(x) - (1 - V(x) + lambda) |  (unit rate).
double eigen_equation_check(const PerronSolution& sol, const KernelField& kernel, const PotentialField& V);

struct DirichletForm {
  double quadratic;  ///< <(I - L_A) f, f>_mu
  double energy;     ///< (1/2) int sum_a kernel(x,a) [f(x) - f(ax)]^2 dmu
};

/// Evaluates both expressions; throws PropertyFailure if they differ by more
/// than 1e-12 (relative to max(1, energy)) or if the value is negative.
DirichletForm dirichlet_form(const KernelField& kernel, const Measure& mu, const PotentialField& f);

struct AdjointPair {
  Matrix adjoint;    ///< L* in L^2(mu): L*(x,y) = mu(y) L(y,x) / mu(x)
  Matrix symmetric;  ///< (L + L*) / 2
};

/// Throws ArgumentError unless mu is strictly positive and stationary (1e-10).
AdjointPair adjoint_and_symmetrize(const GeneratorMatrix& gen, const Measure& mu);

/// ||mu G||_inf for the dense generator matrix G.
double stationarity_defect(const Matrix& generator, const Measure& mu);

}  // namespace ctgibbs
