#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace curvident {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in 64 bits are stored inline;
/// anything larger is promoted to a shared, immutable GMP rational. The
/// representation is canonical: a value that fits inline is never stored as
/// a GMP rational, so equality can compare representations directly.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(const mpq_class& value);

  /// Parses `[+-]digits[/digits]`; the denominator must be positive.
  static Rational parse(std::string_view text);

  bool is_zero() const noexcept { return !big_ && num_ == 0; }
  bool is_one() const noexcept { return !big_ && num_ == 1 && den_ == 1; }
  bool is_small() const noexcept { return !big_; }
  int sign() const noexcept;

  mpq_class to_mpq() const;
  std::string str() const;

  Rational operator-() const;
  Rational reciprocal() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }

  /// this += a * b, with an allocation-free path for small integers.
  void add_product(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b);
  friend int compare(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

/// Element a + b*sqrt(3) of the field Q(sqrt 3).
///
/// Text form (used in JSON and CLI output):
///   rational [ ('+'|'-') rational '*sqrt(3)' ]
/// with rational = [sign] digits [ '/' digits ]. Formatting always emits
/// the canonical form; parsing accepts any text matching the grammar.
class Scalar {
 public:
  Scalar() = default;
  Scalar(std::int64_t value) : rat_(value) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational rat) : rat_(std::move(rat)) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational rat, Rational irr) : rat_(std::move(rat)), irr_(std::move(irr)) {}

  static Scalar parse(std::string_view text);
  static Scalar sqrt3() { return {Rational(0), Rational(1)}; }

  const Rational& rat_part() const noexcept { return rat_; }
  const Rational& irr_part() const noexcept { return irr_; }

  bool is_zero() const noexcept { return rat_.is_zero() && irr_.is_zero(); }
  bool is_rational() const noexcept { return irr_.is_zero(); }
  /// Sign of the real number a + b*sqrt(3).
  int sign() const;
  Scalar abs() const { return sign() < 0 ? -*this : *this; }
  /// The conjugate a - b*sqrt(3).
  Scalar conjugate() const { return {rat_, -irr_}; }
  /// a^2 - 3 b^2, the field norm.
  Rational norm() const;

  std::string str() const;

  Scalar operator-() const { return {-rat_, -irr_}; }
  friend Scalar operator+(const Scalar& x, const Scalar& y);
  friend Scalar operator-(const Scalar& x, const Scalar& y);
  friend Scalar operator*(const Scalar& x, const Scalar& y);
  friend Scalar operator/(const Scalar& x, const Scalar& y);
  Scalar& operator+=(const Scalar& y);
  Scalar& operator-=(const Scalar& y);
  Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
  Scalar& operator/=(const Scalar& y) { return *this = *this / y; }

  /// this += x * y.
  void add_product(const Scalar& x, const Scalar& y);

  friend bool operator==(const Scalar& x, const Scalar& y) {
    return x.rat_ == y.rat_ && x.irr_ == y.irr_;
  }

 private:
  Rational rat_;
  Rational irr_;
};

enum class ArithOp { add, sub, mul, div, neg };

/// Dispatches one of the field operations; `b` is ignored for neg.
Scalar scalar_arith(const Scalar& a, const Scalar& b, ArithOp op);

/// Compares |x| and |y| as real numbers; returns -1, 0 or 1.
int compare_abs(const Scalar& x, const Scalar& y);

std::ostream& operator<<(std::ostream& os, const Rational& r);
std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace curvident
