#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ctgibbs/fields.hpp"
#include "ctgibbs/random.hpp"
#include "ctgibbs/semigroup.hpp"
#include "ctgibbs/symbolic.hpp"

namespace testing {

using namespace ctgibbs;

// The 2-state chain with jump probabilities p1 out of "1" and p2 out of "2".
inline KernelField two_state(double p1, double p2) {
  return KernelField(CylinderSpace(2, 1), {1.0 - p1, p1, p2, 1.0 - p2});
}

inline PotentialField uniform_field(const CylinderSpace& s, CounterRng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(s.size());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return PotentialField(s, std::move(v));
}

inline KernelField random_kernel(const CylinderSpace& s, CounterRng& rng) { return normalize(uniform_field(s, rng)); }

inline Measure random_probability(const CylinderSpace& s, CounterRng& rng) {
  std::vector<double> v(s.size());
  for (auto& x : v) x = rng.uniform(0.05, 1.0);
  return Measure::normalized(s, std::move(v));
}

inline Eigen::MatrixXd with_potential(const GeneratorMatrix& gen, const PotentialField& V) {
  Eigen::MatrixXd m = gen.dense();
  for (Word x = 0; x < V.size(); ++x) m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += V[x];
  return m;
}

inline Eigen::VectorXd as_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// e^{T(L+V)} f through Eigen's Pade-based matrix exponential.
inline Eigen::VectorXd expm_apply(const GeneratorMatrix& gen, const PotentialField& V, const PotentialField& f,
                                  double T) {
  const Eigen::MatrixXd m = (T * with_potential(gen, V)).exp();
  return m * as_vector(f.values());
}

// Largest real part among the eigenvalues of a dense matrix.
inline double principal_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double best = -INFINITY;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

inline double sup_diff(const Eigen::VectorXd& a, std::span<const double> b) {
  return (a - as_vector(b)).cwiseAbs().maxCoeff();
}

// The (d, k) shapes used by the property runs.
inline const std::vector<std::pair<int, int>>& shapes() {
  static const std::vector<std::pair<int, int>> s = {{2, 1}, {2, 2}, {2, 3}, {3, 2}};
  return s;
}

}  // namespace testing
