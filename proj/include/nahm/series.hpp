#pragma once

// Truncated formal power series in q^(1/D) with exact rational coefficients.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nahm {

using Rational = mpq_class;
using Integer = mpz_class;

inline constexpr int kDefaultDenom = 4;

/// Raised when an exponent leaves the lattice (1/D)Z or two operands use different D.
class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a coefficient is requested beyond the validity order of a series.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exponent on the lattice (1/D)Z, stored as an integer count of 1/D steps.
class QExponent {
 public:
  QExponent() = default;
  QExponent(std::int64_t units, int denom);

  static QExponent from_rational(const Rational& value, int denom);
  static QExponent whole(std::int64_t value, int denom = kDefaultDenom) {
    return {value * denom, denom};
  }

  std::int64_t units() const noexcept { return units_; }
  int denom() const noexcept { return denom_; }
  Rational value() const {
    Rational v(units_, denom_);
    v.canonicalize();
    return v;
  }
  /// "<num>/<D>", the exponent form used by the dump format.
  std::string str() const;

  std::strong_ordering operator<=>(const QExponent& other) const;
  bool operator==(const QExponent& other) const;

  QExponent operator+(const QExponent& other) const;
  QExponent operator-(const QExponent& other) const;
  QExponent operator-() const { return {-units_, denom_}; }
  QExponent operator*(std::int64_t k) const { return {units_ * k, denom_}; }

 private:
  void check_same(const QExponent& other) const;

  std::int64_t units_ = 0;
  int denom_ = kDefaultDenom;
};

/// c * q^e with c != 0.
struct Monomial {
  Rational coeff;
  QExponent exp;

  Monomial(Rational c, QExponent e);

  static Monomial q_power(const Rational& e, int denom) {
    return {Rational(1), QExponent::from_rational(e, denom)};
  }

  Monomial operator*(const Monomial& other) const;
  Monomial operator/(const Monomial& other) const;
  Monomial pow(std::int64_t n) const;
  std::string str() const;
};

class QSeries {
 public:
  using Terms = std::map<std::int64_t, Rational>;

  /// The zero series, valid through exponent order_units / denom.
  QSeries(int denom, std::int64_t order_units);

  /// Builds a series from raw terms, dropping zeros and anything beyond the order.
  static QSeries from_terms(int denom, std::int64_t order_units, Terms terms);
  static QSeries one(const QExponent& order);
  static QSeries constant(const Rational& c, const QExponent& order);

  int denom() const noexcept { return denom_; }
  std::int64_t order_units() const noexcept { return order_; }
  QExponent order() const { return {order_, denom_}; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Lowest stored exponent in units; order + 1 for the zero series.
  std::int64_t valuation_units() const noexcept;

  Rational coefficient(const QExponent& e) const;
  Rational coefficient_units(std::int64_t units) const;

  QSeries truncated(std::int64_t order_units) const;
  /// Multiplies by q^(units/D); the validity order moves with the terms.
  QSeries shifted(std::int64_t units) const;
  QSeries scaled(const Rational& c) const;
  QSeries operator-() const;

  bool all_integer() const;

  /// Adds c * q^(units/D) in place; ignored beyond the order.
  void accumulate(std::int64_t units, const Rational& c);

  bool operator==(const QSeries& other) const = default;

 private:
  int denom_;
  std::int64_t order_;
  Terms terms_;
};

struct Mismatch {
  QExponent exponent;
  Rational lhs;
  Rational rhs;
};

struct EqualityReport {
  bool equal = true;
  std::optional<Mismatch> first_mismatch;
  explicit operator bool() const { return equal; }
};

QSeries monomial_series(const Monomial& m, const QExponent& order);

QSeries add(const QSeries& a, const QSeries& b);
QSeries sub(const QSeries& a, const QSeries& b);
QSeries mul(const QSeries& a, const QSeries& b);
/// Multiplies and truncates in one pass; skips work above the cap.
QSeries mul_truncated(const QSeries& a, const QSeries& b, std::int64_t cap_units);

/// Inverse of a series whose lowest term c q^e is nonzero; Laurent shifts allowed.
QSeries invert_unit(const QSeries& a, const QExponent& order);

/// a * (1 + c q^(shift/D)), shift >= 0; the order is unchanged.
QSeries times_binomial(const QSeries& a, const Rational& c, std::int64_t shift);
/// a / (1 + c q^(shift/D)) for shift > 0, by the two-term recurrence.
QSeries divide_binomial(const QSeries& a, const Rational& c, std::int64_t shift);

/// Replaces q by q^k.
QSeries substitute_power(const QSeries& a, const Rational& k);

EqualityReport equal_up_to(const QSeries& a, const QSeries& b, const QExponent& order);

Rational coefficient(const QSeries& a, const QExponent& e);

inline QSeries operator+(const QSeries& a, const QSeries& b) { return add(a, b); }
inline QSeries operator-(const QSeries& a, const QSeries& b) { return sub(a, b); }
inline QSeries operator*(const QSeries& a, const QSeries& b) { return mul(a, b); }

/// Text dump: header "order <num>/<D>", then "<num>/<D> <coeff>" per term.
std::string dump(const QSeries& s);
QSeries parse_dump(std::string_view text);

/// Stable 64-bit digest of the dump text, rendered as 16 hex digits.
std::string digest(const QSeries& s);

}  // namespace nahm
