#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ctgibbs {

/// Bad input: mismatched spaces, negative times, invalid measures.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solve did not reach its tolerance. Carries the residual trail.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::vector<double> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// A checked identity or inequality failed. Always signals a bug.
class PropertyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctgibbs
