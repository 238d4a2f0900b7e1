#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mdl {

// Positive rational kept in lowest terms. Arithmetic is checked; overflow
// throws std::overflow_error rather than wrapping.
class Ratio {
 public:
  Ratio() = default;
  Ratio(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    if (num == 0 || den == 0) throw std::invalid_argument("ratio terms must be positive");
    reduce();
  }

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }

  friend Ratio operator*(const Ratio& a, const Ratio& b) {
    // cross-reduce first to keep intermediates small
    std::uint64_t g1 = std::gcd(a.num_, b.den_), g2 = std::gcd(b.num_, a.den_);
    return Ratio(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
  }

  friend Ratio operator/(const Ratio& a, const Ratio& b) { return a * Ratio(b.den_, b.num_); }

  friend bool operator==(const Ratio&, const Ratio&) = default;

  static std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("ratio arithmetic overflow");
    return r;
  }

 private:
  void reduce() {
    std::uint64_t g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  std::uint64_t num_ = 1;
  std::uint64_t den_ = 1;
};

inline std::string to_string(const Ratio& r) { return std::to_string(r.num()) + ":" + std::to_string(r.den()); }

}  // namespace mdl
