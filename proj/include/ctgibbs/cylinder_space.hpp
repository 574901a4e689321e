#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ctgibbs {

/// Index of a depth-k word.
using Word = std::size_t;

/// The depth-k cylinder truncation of the full shift on d symbols.
///
/// Symbols are 0-based in the API (0..d-1) and printed 1-based in labels.
/// Word indexing is little-endian: the first symbol of the word is the
/// lowest base-d digit, so index(x) = sum_i x_i d^(i-1). Prepending a symbol
/// a to x = (x_1..x_k) yields the truncated preimage (a, x_1..x_{k-1}).
class CylinderSpace {
 public:
  CylinderSpace(int alphabet, int depth, double theta = 0.5);

  int alphabet() const { return alphabet_; }
  int depth() const { return depth_; }
  /// Metric parameter; only feeds Lipschitz reports.
  double theta() const { return theta_; }
  std::size_t size() const { return size_; }

  /// (a, x_1..x_{k-1}) as a depth-k word.
  Word prepend(int symbol, Word x) const {
    return static_cast<Word>(symbol) + static_cast<Word>(alphabet_) * (x % tail_);
  }
  int first_symbol(Word x) const { return static_cast<int>(x % alphabet_); }
  /// 0-based position.
  int symbol(Word x, int position) const;
  /// Index of the first j symbols among the d^j words of depth j.
  std::size_t prefix(Word x, int j) const;
  /// Number of leading symbols on which x and y agree (k when x == y).
  int agreement(Word x, Word y) const;
  /// theta^agreement, or 0 for identical words.
  double distance(Word x, Word y) const;

  std::vector<int> decode(Word x) const;
  Word encode(std::span<const int> symbols) const;
  /// 1-based symbols, first symbol leftmost: "12" is x_1 = 1, x_2 = 2.
  std::string label(Word x) const;

  bool operator==(const CylinderSpace& other) const {
    return alphabet_ == other.alphabet_ && depth_ == other.depth_ && theta_ == other.theta_;
  }

 private:
  int alphabet_;
  int depth_;
  double theta_;
  std::size_t size_;
  std::size_t tail_;  // d^(k-1)
};

/// d^j with overflow check.
std::size_t checked_power(int base, int exponent);

}  // namespace ctgibbs
