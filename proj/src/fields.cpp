#include "ctgibbs/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctgibbs/errors.hpp"

namespace ctgibbs {

void require_same_space(const CylinderSpace& a, const CylinderSpace& b, const char* where) {
  if (a.alphabet() != b.alphabet() || a.depth() != b.depth())
    throw ArgumentError(std::string(where) + ": space mismatch");
}

// PotentialField

PotentialField::PotentialField(CylinderSpace space, std::vector<double> values)
    : space_(space), values_(std::move(values)) {
  if (values_.size() != space_.size())
    throw ArgumentError("potential needs d^k = " + std::to_string(space_.size()) + " values, got " +
                        std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw ArgumentError("potential values must be finite");
}

PotentialField PotentialField::constant(const CylinderSpace& space, double value) {
  return PotentialField(space, std::vector<double>(space.size(), value));
}

PotentialField PotentialField::from_function(const CylinderSpace& space, const std::function<double(Word)>& fn) {
  std::vector<double> v(space.size());
  for (Word x = 0; x < space.size(); ++x) v[x] = fn(x);
  return PotentialField(space, std::move(v));
}

PotentialField PotentialField::first_symbols(const CylinderSpace& space, std::span<const double> table) {
  int m = -1;
  for (int j = 0; j <= space.depth(); ++j)
    if (checked_power(space.alphabet(), j) == table.size()) m = j;
  if (m < 0 || (space.alphabet() == 1 && table.size() != 1))
    throw ArgumentError("first_m_symbols table must have d^m entries with m <= k");
  const std::size_t modulus = checked_power(space.alphabet(), m);
  return from_function(space, [&](Word x) { return table[x % modulus]; });
}

PotentialField PotentialField::indicator(const CylinderSpace& space, Word w) {
  if (w >= space.size()) throw ArgumentError("indicator word out of range");
  return from_function(space, [w](Word x) { return x == w ? 1.0 : 0.0; });
}

double PotentialField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double PotentialField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PotentialField::sup_norm() const { return std::max(std::abs(max()), std::abs(min())); }

PotentialField PotentialField::operator+(const PotentialField& other) const {
  require_same_space(space_, other.space_, "PotentialField +");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return PotentialField(space_, std::move(v));
}

PotentialField PotentialField::operator-(const PotentialField& other) const { return *this + other * -1.0; }

PotentialField PotentialField::operator+(double c) const {
  return mapped([c](double v) { return v + c; });
}

PotentialField PotentialField::operator*(double c) const {
  return mapped([c](double v) { return v * c; });
}

PotentialField PotentialField::mapped(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), fn);
  return PotentialField(space_, std::move(v));
}

// KernelField

KernelField::KernelField(CylinderSpace space, std::vector<double> weights)
    : space_(space), weights_(std::move(weights)) {
  const std::size_t d = static_cast<std::size_t>(space_.alphabet());
  if (weights_.size() != space_.size() * d)
    throw ArgumentError("kernel needs d^k rows of d weights");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("kernel weights must be finite and strictly positive");
  normalized_ = normalization_defect() <= 1e-12;
}

KernelField KernelField::exp_of(const PotentialField& raw) {
  const auto& s = raw.space();
  std::vector<double> w(s.size() * static_cast<std::size_t>(s.alphabet()));
  for (Word x = 0; x < s.size(); ++x)
    for (int a = 0; a < s.alphabet(); ++a)
      w[x * static_cast<std::size_t>(s.alphabet()) + static_cast<std::size_t>(a)] = std::exp(raw[s.prepend(a, x)]);
  return KernelField(s, std::move(w));
}

KernelField KernelField::exp_of_log_weights(const CylinderSpace& space, std::span<const double> log_weights) {
  std::vector<double> w(log_weights.size());
  std::transform(log_weights.begin(), log_weights.end(), w.begin(), [](double v) { return std::exp(v); });
  return KernelField(space, std::move(w));
}

KernelField KernelField::uniform(const CylinderSpace& space) {
  return KernelField(space, std::vector<double>(space.size() * static_cast<std::size_t>(space.alphabet()),
                                                1.0 / space.alphabet()));
}

double KernelField::log_weight(Word x, int symbol) const { return std::log(weight(x, symbol)); }

std::span<const double> KernelField::row(Word x) const {
  const std::size_t d = static_cast<std::size_t>(space_.alphabet());
  return std::span<const double>(weights_).subspan(x * d, d);
}

double KernelField::row_sum(Word x) const {
  auto r = row(x);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double KernelField::normalization_defect() const {
  double worst = 0.0;
  for (Word x = 0; x < space_.size(); ++x) worst = std::max(worst, std::abs(row_sum(x) - 1.0));
  return worst;
}

// Measure

Measure::Measure(CylinderSpace space, std::vector<double> mass) : space_(space), mass_(std::move(mass)) {
  if (mass_.size() != space_.size()) throw ArgumentError("measure needs d^k masses");
  for (double m : mass_)
    if (!(m >= 0.0) || !std::isfinite(m)) throw ArgumentError("measure masses must be finite and nonnegative");
}

Measure Measure::uniform(const CylinderSpace& space) {
  return Measure(space, std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())));
}

Measure Measure::dirac(const CylinderSpace& space, Word w) {
  if (w >= space.size()) throw ArgumentError("dirac word out of range");
  std::vector<double> m(space.size(), 0.0);
  m[w] = 1.0;
  return Measure(space, std::move(m));
}

Measure Measure::normalized(const CylinderSpace& space, std::vector<double> weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) throw ArgumentError("cannot normalize a measure with zero total mass");
  for (auto& w : weights) w /= total;
  return Measure(space, std::move(weights));
}

double Measure::total() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

bool Measure::is_probability(double tol) const { return std::abs(total() - 1.0) <= tol; }

bool Measure::strictly_positive() const {
  return std::all_of(mass_.begin(), mass_.end(), [](double m) { return m > 0.0; });
}

double Measure::integrate(const PotentialField& f) const {
  require_same_space(space_, f.space(), "Measure::integrate");
  double s = 0.0;
  for (Word x = 0; x < mass_.size(); ++x) s += mass_[x] * f[x];
  return s;
}

double Measure::total_variation(const Measure& other) const {
  require_same_space(space_, other.space_, "Measure::total_variation");
  double s = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) s += std::abs(mass_[i] - other.mass_[i]);
  return 0.5 * s;
}

double Measure::max_abs_difference(const Measure& other) const {
  require_same_space(space_, other.space_, "Measure::max_abs_difference");
  double s = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) s = std::max(s, std::abs(mass_[i] - other.mass_[i]));
  return s;
}

double Measure::shift_consistency_defect() const {
  const std::size_t d = static_cast<std::size_t>(space_.alphabet());
  const std::size_t tail = space_.size() / d;
  // Word index x = x_1 + d * (x_2..x_k): dropping x_1 gives x / d, dropping x_k gives x % tail.
  std::vector<double> drop_first(tail, 0.0), drop_last(tail, 0.0);
  for (Word x = 0; x < space_.size(); ++x) {
    drop_first[x / d] += mass_[x];
    drop_last[x % tail] += mass_[x];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < tail; ++i) worst = std::max(worst, std::abs(drop_first[i] - drop_last[i]));
  return worst;
}

}  // namespace ctgibbs
