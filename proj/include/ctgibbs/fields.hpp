#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ctgibbs/cylinder_space.hpp"

namespace ctgibbs {

/// A real function on depth-k words: potentials, observables, eigenfunctions.
class PotentialField {
 public:
  PotentialField(CylinderSpace space, std::vector<double> values);

  static PotentialField constant(const CylinderSpace& space, double value);
  static PotentialField from_function(const CylinderSpace& space, const std::function<double(Word)>& fn);
  /// Value depends on the first m symbols only; table has d^m entries.
  static PotentialField first_symbols(const CylinderSpace& space, std::span<const double> table);
  /// 1 on word w, 0 elsewhere.
  static PotentialField indicator(const CylinderSpace& space, Word w);

  const CylinderSpace& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  double operator[](Word x) const { return values_[x]; }
  std::span<const double> values() const { return values_; }

  double max() const;
  double min() const;
  double sup_norm() const;

  PotentialField operator+(const PotentialField& other) const;
  PotentialField operator-(const PotentialField& other) const;
  PotentialField operator+(double c) const;
  PotentialField operator*(double c) const;
  PotentialField mapped(const std::function<double(double)>& fn) const;

 private:
  CylinderSpace space_;
  std::vector<double> values_;
};

/// Jump weights e^{B(ax)} indexed by parent word x and prepended symbol a.
///
/// Stored row-major: weight(x, a) at x * d + a. The normalized flag is
/// computed at construction: every row sums to 1 within 1e-12.
class KernelField {
 public:
  KernelField(CylinderSpace space, std::vector<double> weights);

  /// Weights e^{raw(ax)} for a depth-k raw potential.
  static KernelField exp_of(const PotentialField& raw);
  /// Weights e^{raw(x, a)} from log-weights in the same layout.
  static KernelField exp_of_log_weights(const CylinderSpace& space, std::span<const double> log_weights);
  static KernelField uniform(const CylinderSpace& space);

  const CylinderSpace& space() const { return space_; }
  double weight(Word x, int symbol) const { return weights_[x * static_cast<std::size_t>(space_.alphabet()) + static_cast<std::size_t>(symbol)]; }
  double log_weight(Word x, int symbol) const;
  std::span<const double> row(Word x) const;
  std::span<const double> weights() const { return weights_; }
  bool normalized() const { return normalized_; }
  double row_sum(Word x) const;
  /// Max over rows of |row sum - 1|.
  double normalization_defect() const;

 private:
  CylinderSpace space_;
  std::vector<double> weights_;
  bool normalized_;
};

/// Nonnegative mass on depth-k words.
class Measure {
 public:
  Measure(CylinderSpace space, std::vector<double> mass);

  static Measure uniform(const CylinderSpace& space);
  static Measure dirac(const CylinderSpace& space, Word w);
  /// Rescales nonnegative weights to total mass 1.
  static Measure normalized(const CylinderSpace& space, std::vector<double> weights);

  const CylinderSpace& space() const { return space_; }
  std::size_t size() const { return mass_.size(); }
  double operator[](Word x) const { return mass_[x]; }
  std::span<const double> mass() const { return mass_; }

  double total() const;
  bool is_probability(double tol = 1e-12) const;
  bool strictly_positive() const;
  double integrate(const PotentialField& f) const;
  double total_variation(const Measure& other) const;
  double max_abs_difference(const Measure& other) const;
  /// Mass summed over the first symbol versus over the last symbol; the
  /// sup-distance between the two depth-(k-1) marginals.
  double shift_consistency_defect() const;

 private:
  CylinderSpace space_;
  std::vector<double> mass_;
};

void require_same_space(const CylinderSpace& a, const CylinderSpace& b, const char* where);

}  // namespace ctgibbs
