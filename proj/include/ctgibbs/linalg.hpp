#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace ctgibbs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct PowerIterationOptions {
  /// Relative change of successive eigenvalue estimates.
  double eigenvalue_tol = 1e-14;
  /// ||M r - rho r||_inf / (rho ||r||_inf), same for the left vector.
  double residual_tol = 1e-12;
  /// |rho_right - rho_left| / max(1, rho).
  double consistency_tol = 1e-11;
  std::size_t max_iterations = 1'000'000;
};

/// Dominant eigen-triple of a nonnegative primitive matrix.
struct DominantEigenpair {
  double rho = 0.0;
  Vector right;  ///< max-normalized, strictly positive
  Vector left;   ///< sum-normalized, strictly positive
  double residual_right = 0.0;
  double residual_left = 0.0;
  std::size_t iterations = 0;
};

/// Power iteration with normalization each step, run on M (right vector)
/// and on M^T (left vector). Throws NumericError with the residual history
/// when either side fails to converge.
DominantEigenpair dominant_eigenpair(const Matrix& m, const PowerIterationOptions& options = {});

/// P(N > n) for N ~ Poisson(mean); an upper bound once n + 2 > mean, 1 before.
double poisson_tail_bound(double mean, std::size_t n);

/// Sum in balanced pairwise order; independent of how the range was produced.
double pairwise_sum(const std::vector<double>& values);

}  // namespace ctgibbs
