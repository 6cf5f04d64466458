#pragma once

#include <compare>
#include <optional>
#include <string>

#include "reebidx/errors.hpp"
#include "reebidx/rational.hpp"

namespace reebidx {

/// A rational number optionally displaced by a positive infinitesimal.
/// side == -1 means "just below value", +1 means "just above", 0 means exact.
/// Total order is lexicographic on (value, side).
struct Tilted {
  Rational value{0};
  int side = 0;

  Tilted() = default;
  Tilted(Rational v, int s = 0) : value(std::move(v)), side(s) {}

  bool exact() const { return side == 0; }

  friend bool operator==(const Tilted& a, const Tilted& b) {
    return a.value == b.value && a.side == b.side;
  }
  friend bool operator<(const Tilted& a, const Tilted& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.side < b.side;
  }
  friend bool operator<=(const Tilted& a, const Tilted& b) { return a == b || a < b; }
  friend bool operator>(const Tilted& a, const Tilted& b) { return b < a; }
  friend bool operator>=(const Tilted& a, const Tilted& b) { return b <= a; }

  friend Tilted operator-(const Tilted& a) { return {-a.value, -a.side}; }
  friend Tilted operator+(const Tilted& a, const Rational& r) { return {a.value + r, a.side}; }
  friend Tilted operator-(const Tilted& a, const Rational& r) { return {a.value - r, a.side}; }

  /// Scaling by a nonzero rational; the infinitesimal keeps its magnitude class.
  friend Tilted operator*(const Tilted& a, const Rational& c) {
    if (c == 0) return {0, 0};
    return {a.value * c, c > 0 ? a.side : -a.side};
  }

  Integer floor() const {
    if (side >= 0) return rat_floor(value);
    if (is_integer(value)) return numerator(value) - 1;
    return rat_floor(value);
  }

  Integer ceil() const { return -((-*this).floor()); }

  bool is_exact_integer() const { return side == 0 && is_integer(value); }

  /// Representative in [0, 1) with the infinitesimal carried along; the
  /// value 1 with side -1 stands for "just below a whole number".
  Tilted frac() const {
    Tilted out{value - Rational(floor()), side};
    return out;
  }

  std::string str() const {
    std::string s = format_rational(value);
    if (side > 0) s += "+";
    if (side < 0) s += "-";
    return s;
  }
};

inline double to_double(const Tilted& t) { return to_double(t.value); }

/// Three-way comparison against an exact rational, or nothing when the
/// comparison cannot be decided.
inline std::optional<int> tilted_cmp(const Tilted& a, const Rational& x) {
  if (a.value < x) return -1;
  if (a.value > x) return 1;
  if (a.side < 0) return -1;
  if (a.side > 0) return 1;
  return 0;
}

/// An angle expressed as a multiple of pi, known either exactly (possibly
/// tilted off a rational by an infinitesimal) or only up to an enclosure.
/// Both bounds coincide in the exact case; an enclosure (u, v) is stored as
/// the tilted pair (u just-above, v just-below).
class Angle {
public:
  Angle() = default;

  static Angle exact(Tilted t) { return Angle(t, t); }
  static Angle exact(Rational r) { return Angle(Tilted{r}, Tilted{r}); }

  static Angle enclosure(const Rational& lo, const Rational& hi) {
    require(lo < hi, ErrorKind::structural, "empty angle enclosure");
    return Angle(Tilted{lo, +1}, Tilted{hi, -1});
  }

  static Angle from_bounds(Tilted lo, Tilted hi) {
    require(!(hi < lo), ErrorKind::structural, "inverted angle bounds");
    return Angle(std::move(lo), std::move(hi));
  }

  const Tilted& lo() const { return lo_; }
  const Tilted& hi() const { return hi_; }
  bool is_enclosure() const { return !(lo_ == hi_); }

  /// The exact rational value when one exists.
  std::optional<Rational> exact_rational() const {
    if (!is_enclosure() && lo_.exact()) return lo_.value;
    return std::nullopt;
  }

  /// floor(c * angle); raises a precision error when the enclosure straddles
  /// an integer of the scaled value.
  Integer scaled_floor(const Rational& c, const std::string& what) const {
    Integer f1 = (lo_ * c).floor();
    Integer f2 = (hi_ * c).floor();
    if (c < 0) std::swap(f1, f2);
    require(f1 == f2, ErrorKind::precision,
            "angle enclosure cannot decide " + what);
    return f1;
  }

  /// Whether c * angle is an exact integer. Enclosures that provably avoid
  /// integers answer false; straddling enclosures raise a precision error.
  bool scaled_is_integer(const Rational& c, const std::string& what) const {
    if (!is_enclosure()) {
      Tilted s = lo_ * c;
      return s.is_exact_integer();
    }
    scaled_floor(c, what);
    return false;
  }

  /// Three-way comparison with an exact rational; precision error when the
  /// enclosure contains it.
  int compare(const Rational& x, const std::string& what) const {
    auto c1 = tilted_cmp(lo_, x);
    auto c2 = tilted_cmp(hi_, x);
    require(c1.has_value() && c2.has_value() && *c1 == *c2,
            ErrorKind::precision, "angle enclosure cannot decide " + what);
    return *c1;
  }

  std::string str() const {
    if (!is_enclosure()) return lo_.str();
    return "(" + format_rational(lo_.value) + "," + format_rational(hi_.value) + ")";
  }

  friend bool operator==(const Angle& a, const Angle& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }
  friend bool operator<(const Angle& a, const Angle& b) {
    if (a.lo_ == b.lo_) return a.hi_ < b.hi_;
    return a.lo_ < b.lo_;
  }

  /// Strictly-less with no overlap; distinct jump angles must satisfy this.
  bool entirely_below(const Angle& other) const { return hi_ < other.lo_; }

private:
  Angle(Tilted lo, Tilted hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

  Tilted lo_{};
  Tilted hi_{};
};

/// Closed rational interval used for quantities that inherit uncertainty
/// from angle enclosures, such as mean indices.
struct RatInterval {
  Rational lo{0};
  Rational hi{0};

  RatInterval() = default;
  RatInterval(Rational v) : lo(v), hi(v) {}
  RatInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    require(lo <= hi, ErrorKind::structural, "inverted interval");
  }

  bool exact() const { return lo == hi; }

  Rational as_exact(const std::string& what) const {
    require(exact(), ErrorKind::precision, what + " is only known up to an enclosure");
    return lo;
  }

  friend RatInterval operator+(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  friend RatInterval operator*(const RatInterval& a, const Rational& c) {
    if (c >= 0) return {a.lo * c, a.hi * c};
    return {a.hi * c, a.lo * c};
  }

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }

  std::string str() const {
    if (exact()) return format_rational(lo);
    return "[" + format_rational(lo) + "," + format_rational(hi) + "]";
  }
};

} // namespace reebidx
