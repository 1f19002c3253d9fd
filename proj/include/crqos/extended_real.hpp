#pragma once

#include <compare>
#include <limits>
#include <ostream>

namespace crqos {

/// A nonnegative-cost value that may be +infinity (e.g. distortion at 100%
/// packet loss). Infinity propagates through addition and orders above every
/// finite value.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : v_(v) {}

  static constexpr ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }

  constexpr bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
  constexpr bool is_infinite() const { return !is_finite(); }
  constexpr double value() const { return v_; }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtendedReal(a.v_ + b.v_);
  }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) = default;
  friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }

  friend std::ostream& operator<<(std::ostream& os, ExtendedReal x) {
    if (x.is_infinite()) return os << "inf";
    return os << x.v_;
  }

 private:
  double v_ = 0.0;
};

}  // namespace crqos
