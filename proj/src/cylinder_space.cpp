#include "ctgibbs/cylinder_space.hpp"

#include <cmath>
#include <limits>

#include "ctgibbs/errors.hpp"

namespace ctgibbs {

std::size_t checked_power(int base, int exponent) {
  if (base < 1 || exponent < 0) throw ArgumentError("checked_power: invalid arguments");
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(base))
      throw ArgumentError("cylinder space too large");
    result *= static_cast<std::size_t>(base);
  }
  return result;
}

CylinderSpace::CylinderSpace(int alphabet, int depth, double theta)
    : alphabet_(alphabet), depth_(depth), theta_(theta) {
  if (alphabet < 1) throw ArgumentError("alphabet size d must be >= 1");
  if (depth < 1) throw ArgumentError("cylinder depth k must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw ArgumentError("theta must lie in (0, 1)");
  size_ = checked_power(alphabet, depth);
  if (size_ > (std::size_t{1} << 24)) throw ArgumentError("cylinder space too large (d^k > 2^24)");
  tail_ = size_ / static_cast<std::size_t>(alphabet);
}

int CylinderSpace::symbol(Word x, int position) const {
  if (position < 0 || position >= depth_) throw ArgumentError("symbol position out of range");
  for (int i = 0; i < position; ++i) x /= static_cast<Word>(alphabet_);
  return static_cast<int>(x % alphabet_);
}

std::size_t CylinderSpace::prefix(Word x, int j) const {
  if (j < 0 || j > depth_) throw ArgumentError("prefix length out of range");
  return x % checked_power(alphabet_, j);
}

int CylinderSpace::agreement(Word x, Word y) const {
  int n = 0;
  for (; n < depth_; ++n) {
    if (x % alphabet_ != y % alphabet_) break;
    x /= static_cast<Word>(alphabet_);
    y /= static_cast<Word>(alphabet_);
  }
  return n;
}

double CylinderSpace::distance(Word x, Word y) const {
  if (x == y) return 0.0;
  return std::pow(theta_, agreement(x, y));
}

std::vector<int> CylinderSpace::decode(Word x) const {
  if (x >= size_) throw ArgumentError("word index out of range");
  std::vector<int> out(static_cast<std::size_t>(depth_));
  for (auto& s : out) {
    s = static_cast<int>(x % alphabet_);
    x /= static_cast<Word>(alphabet_);
  }
  return out;
}

Word CylinderSpace::encode(std::span<const int> symbols) const {
  if (symbols.size() != static_cast<std::size_t>(depth_)) throw ArgumentError("word length must equal k");
  Word x = 0;
  for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) {
    if (*it < 0 || *it >= alphabet_) throw ArgumentError("symbol out of range");
    x = x * static_cast<Word>(alphabet_) + static_cast<Word>(*it);
  }
  return x;
}

std::string CylinderSpace::label(Word x) const {
  std::string out;
  for (int s : decode(x)) {
    if (alphabet_ <= 9) {
      out.push_back(static_cast<char>('1' + s));
    } else {
      if (!out.empty()) out.push_back('.');
      out += std::to_string(s + 1);
    }
  }
  return out;
}

}  // namespace ctgibbs
