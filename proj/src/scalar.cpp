#include "curvident/scalar.hpp"

#include <limits>
#include <ostream>

#include "curvident/error.hpp"

namespace curvident {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr i128 kMin64 = std::numeric_limits<std::int64_t>::min();
constexpr i128 kMax64 = std::numeric_limits<std::int64_t>::max();

u128 abs128(i128 v) { return v < 0 ? u128(0) - u128(v) : u128(v); }

u128 gcd128(u128 a, u128 b) {
  if (a == 0) return b;
  if (b == 0) return a;
  // Both operands fit in 64 bits almost always; use the cheaper path then.
  if ((a >> 64) == 0 && (b >> 64) == 0) {
    std::uint64_t x = static_cast<std::uint64_t>(a), y = static_cast<std::uint64_t>(b);
    const int shift = __builtin_ctzll(x | y);
    x >>= __builtin_ctzll(x);
    do {
      y >>= __builtin_ctzll(y);
      if (x > y) std::swap(x, y);
      y -= x;
    } while (y != 0);
    return u128(x) << shift;
  }
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class mpz_from(i128 v) {
  const bool neg = v < 0;
  u128 mag = abs128(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(mag >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(mag)));
  mpz_class out = (hi << 64) + lo;
  return neg ? mpz_class(-out) : out;
}

bool fits64(i128 v) { return v >= kMin64 && v <= kMax64; }

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ArithmeticError("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational::Rational(const mpq_class& value) {
  mpq_class v(value);
  v.canonicalize();
  if (mpz_fits_slong_p(v.get_num_mpz_t()) && mpz_fits_slong_p(v.get_den_mpz_t())) {
    num_ = v.get_num().get_si();
    den_ = v.get_den().get_si();
  } else {
    big_ = std::make_shared<const mpq_class>(std::move(v));
  }
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0) return Rational();
  const u128 g = gcd128(abs128(num), abs128(den));
  if (g > 1) {
    num /= static_cast<i128>(g);
    den /= static_cast<i128>(g);
  }
  if (fits64(num) && fits64(den)) {
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }
  Rational r;
  mpq_class q(mpz_from(num), mpz_from(den));
  r.big_ = std::make_shared<const mpq_class>(std::move(q));
  return r;
}

Rational Rational::parse(std::string_view text) {
  std::string_view body = text;
  bool neg = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  std::string_view num_text = body.substr(0, slash);
  std::string_view den_text = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!is_digits(num_text) || !is_digits(den_text)) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  mpz_class num(std::string(num_text), 10);
  mpz_class den(std::string(den_text), 10);
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  if (neg) num = -num;
  return Rational(mpq_class(num, den));
}

int Rational::sign() const noexcept {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

std::string Rational::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const {
  if (!big_ && num_ != std::numeric_limits<std::int64_t>::min()) {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  return Rational(mpq_class(-to_mpq()));
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw ArithmeticError("division by zero");
  if (!big_) return from_wide(den_, num_);
  return Rational(mpq_class(1 / *big_));
}

Rational operator+(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t s;
      if (!__builtin_add_overflow(a.num_, b.num_, &s)) return Rational(s);
    }
    return Rational::from_wide(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t p;
      if (!__builtin_mul_overflow(a.num_, b.num_, &p)) return Rational(p);
    }
    return Rational::from_wide(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
}

Rational operator/(const Rational& a, const Rational& b) { return a * b.reciprocal(); }

void Rational::add_product(const Rational& a, const Rational& b) {
  if (!big_ && !a.big_ && !b.big_ && den_ == 1 && a.den_ == 1 && b.den_ == 1) {
    const i128 s = i128(num_) + i128(a.num_) * b.num_;
    if (fits64(s)) {
      num_ = static_cast<std::int64_t>(s);
      return;
    }
  }
  *this = *this + a * b;
}

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;
}

int compare(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    const i128 l = i128(a.num_) * b.den_;
    const i128 r = i128(b.num_) * a.den_;
    return (l > r) - (l < r);
  }
  return cmp(a.to_mpq(), b.to_mpq());
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

// ---------------------------------------------------------------------------

Scalar Scalar::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty scalar text");

  // The second summand starts at the first '+'/'-' after position 0.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] == '+' || s[i] == '-') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) {
    if (s.find("sqrt") != std::string_view::npos) {
      throw ParseError("missing rational part before '" + std::string(s) + "'");
    }
    return Scalar(Rational::parse(s));
  }
  Rational rat = Rational::parse(s.substr(0, split));
  const bool neg = s[split] == '-';
  std::string_view tail = s.substr(split + 1);
  constexpr std::string_view kSuffix = "*sqrt(3)";
  if (tail.size() <= kSuffix.size() || tail.substr(tail.size() - kSuffix.size()) != kSuffix) {
    throw ParseError("expected '<rational>*sqrt(3)' but found '" + std::string(tail) + "'");
  }
  Rational irr = Rational::parse(tail.substr(0, tail.size() - kSuffix.size()));
  return {std::move(rat), neg ? -irr : irr};
}

int Scalar::sign() const {
  const int a = rat_.sign();
  const int b = irr_.sign();
  if (b == 0) return a;
  if (a == 0 || a == b) return b;
  // Opposite signs: the larger of a^2 and 3 b^2 wins. They cannot be equal.
  const int c = compare(rat_ * rat_, Rational(3) * irr_ * irr_);
  return c > 0 ? a : b;
}

Rational Scalar::norm() const { return rat_ * rat_ - Rational(3) * irr_ * irr_; }

std::string Scalar::str() const {
  if (irr_.is_zero()) return rat_.str();
  std::string out = rat_.str();
  if (irr_.sign() > 0) {
    out += '+';
    out += irr_.str();
  } else {
    out += '-';
    out += (-irr_).str();
  }
  out += "*sqrt(3)";
  return out;
}

Scalar operator+(const Scalar& x, const Scalar& y) {
  if (x.irr_.is_zero() && y.irr_.is_zero()) return Scalar(x.rat_ + y.rat_);
  return {x.rat_ + y.rat_, x.irr_ + y.irr_};
}

Scalar operator-(const Scalar& x, const Scalar& y) {
  if (x.irr_.is_zero() && y.irr_.is_zero()) return Scalar(x.rat_ - y.rat_);
  return {x.rat_ - y.rat_, x.irr_ - y.irr_};
}

Scalar operator*(const Scalar& x, const Scalar& y) {
  if (x.irr_.is_zero() && y.irr_.is_zero()) return Scalar(x.rat_ * y.rat_);
  Rational rat = x.rat_ * y.rat_;
  rat.add_product(Rational(3) * x.irr_, y.irr_);
  Rational irr = x.rat_ * y.irr_;
  irr.add_product(x.irr_, y.rat_);
  return {std::move(rat), std::move(irr)};
}

Scalar operator/(const Scalar& x, const Scalar& y) {
  if (y.is_zero()) throw ArithmeticError("division by zero");
  // 1/(a + b sqrt3) = (a - b sqrt3) / (a^2 - 3 b^2); the norm of a nonzero
  // element never vanishes because 3 is not a rational square.
  const Rational inv = y.norm().reciprocal();
  const Scalar num = x * y.conjugate();
  return {num.rat_ * inv, num.irr_ * inv};
}

Scalar& Scalar::operator+=(const Scalar& y) {
  rat_ += y.rat_;
  if (!y.irr_.is_zero()) irr_ += y.irr_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& y) {
  rat_ -= y.rat_;
  if (!y.irr_.is_zero()) irr_ -= y.irr_;
  return *this;
}

void Scalar::add_product(const Scalar& x, const Scalar& y) {
  if (x.irr_.is_zero() && y.irr_.is_zero()) {
    rat_.add_product(x.rat_, y.rat_);
    return;
  }
  rat_.add_product(x.rat_, y.rat_);
  rat_.add_product(Rational(3) * x.irr_, y.irr_);
  irr_.add_product(x.rat_, y.irr_);
  irr_.add_product(x.irr_, y.rat_);
}

Scalar scalar_arith(const Scalar& a, const Scalar& b, ArithOp op) {
  switch (op) {
    case ArithOp::add:
      return a + b;
    case ArithOp::sub:
      return a - b;
    case ArithOp::mul:
      return a * b;
    case ArithOp::div:
      return a / b;
    case ArithOp::neg:
      return -a;
  }
  throw ArithmeticError("unknown arithmetic operation");
}

int compare_abs(const Scalar& x, const Scalar& y) { return (x.abs() - y.abs()).sign(); }

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace curvident
