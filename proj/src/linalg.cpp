#include "ctgibbs/linalg.hpp"

#include <cmath>
#include <sstream>

#include "ctgibbs/errors.hpp"

namespace ctgibbs {
namespace {

struct SideResult {
  double rho;
  Vector v;
  double residual;
  std::size_t iterations;
};

// Iterates v <- A v / scale(A v). `sum_normalized` selects the l1 scale (left
// vectors) instead of the sup scale (right vectors).
SideResult iterate(const Matrix& a, bool sum_normalized, const PowerIterationOptions& opt) {
  const Eigen::Index n = a.rows();
  Vector v = Vector::Constant(n, sum_normalized ? 1.0 / static_cast<double>(n) : 1.0);
  double rho_prev = 0.0;
  std::vector<double> history;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    Vector y = a * v;
    const double rho = sum_normalized ? y.sum() : y.maxCoeff();
    if (!(rho > 0.0) || !std::isfinite(rho)) throw NumericError("power iteration: non-positive or non-finite estimate");
    const double scale_v = sum_normalized ? v.maxCoeff() : 1.0;
    const double residual = (y - rho * v).cwiseAbs().maxCoeff() / (rho * scale_v);
    const bool settled = std::abs(rho - rho_prev) <= opt.eigenvalue_tol * rho;
    if (it % 1000 == 0) history.push_back(residual);
    if (settled && residual <= opt.residual_tol) return {rho, y / rho, residual, it};
    v = y / rho;
    rho_prev = rho;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << opt.max_iterations << " iterations";
  if (!history.empty()) msg << " (last residual " << history.back() << ")";
  throw NumericError(msg.str(), std::move(history));
}

}  // namespace

DominantEigenpair dominant_eigenpair(const Matrix& m, const PowerIterationOptions& options) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ArgumentError("dominant_eigenpair: matrix must be square");
  if ((m.array() < 0.0).any()) throw ArgumentError("dominant_eigenpair: matrix must be nonnegative");
  const Matrix mt = m.transpose();
  SideResult right = iterate(m, false, options);
  SideResult left = iterate(mt, true, options);
  if (std::abs(right.rho - left.rho) > options.consistency_tol * std::max(1.0, right.rho)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "left/right eigenvalue mismatch: " << right.rho << " vs " << left.rho;
    throw NumericError(msg.str(), {right.residual, left.residual});
  }
  DominantEigenpair out;
  out.rho = right.rho;
  out.right = right.v / right.v.maxCoeff();
  out.left = left.v / left.v.sum();
  out.residual_right = right.residual;
  out.residual_left = left.residual;
  out.iterations = std::max(right.iterations, left.iterations);
  return out;
}

double poisson_tail_bound(double mean, std::size_t n) {
  if (mean <= 0.0) return 0.0;
  const double next = static_cast<double>(n) + 1.0;
  if (next + 1.0 <= mean) return 1.0;
  // pmf(n+1) * sum_j (mean/(n+2))^j bounds the tail.
  const double log_pmf = -mean + next * std::log(mean) - std::lgamma(next + 1.0);
  return std::min(1.0, std::exp(log_pmf) / (1.0 - mean / (next + 1.0)));
}

double pairwise_sum(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> level(values);
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = level[2 * i] + (2 * i + 1 < level.size() ? level[2 * i + 1] : 0.0);
    level.swap(next);
  }
  return level.front();
}

}  // namespace ctgibbs
