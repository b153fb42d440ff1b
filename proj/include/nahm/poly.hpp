#pragma once

// Multivariate rational polynomials in summation indices, and the small
// expression language used by the catalog.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nahm/series.hpp"

namespace nahm {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Poly {
 public:
  /// variable name -> power; the empty map is the constant monomial.
  using Mono = std::map<std::string, int>;

  Poly() = default;
  Poly(Rational c);  // NOLINT(google-explicit-constructor)
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Poly var(const std::string& name);

  const std::map<Mono, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  int degree() const;
  std::set<std::string> variables() const;

  /// Coefficient of a given monomial (0 if absent).
  Rational coeff(const Mono& m) const;
  Rational linear_coeff(const std::string& v) const;
  Rational quadratic_coeff(const std::string& a, const std::string& b) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly pow(int n) const;

  Rational eval(const std::map<std::string, Rational>& values) const;
  Poly substitute(const std::map<std::string, Poly>& defs) const;

  bool operator==(const Poly& o) const = default;

  /// Canonical text: monomials sorted by degree then name, e.g. "2*i^2 + i*k - 1/2*j + 3".
  std::string str() const;

 private:
  void add_term(const Mono& m, const Rational& c);
  std::map<Mono, Rational> terms_;
};

/// Named polynomial definitions substituted while parsing (e.g. n1 = n11 + 2*n12).
using Definitions = std::map<std::string, Poly>;

/// Grammar (see docs/catalog-grammar.md): + - * / ^, parentheses, juxtaposition,
/// rational literals, identifiers = one letter plus optional digits/underscores,
/// and binom(expr, k).
Poly parse_poly(std::string_view text, const Definitions& defs = {});

/// coeff * q^exponent where the exponent may depend on indices.
struct QTerm {
  Rational coeff;
  Poly exponent;
};

/// A finite sum of QTerms, e.g. "1+q^(2i+2j+4k+2)" or "-q^(1/2)".
std::vector<QTerm> parse_qpoly(std::string_view text, const Definitions& defs = {});
std::string qpoly_str(const std::vector<QTerm>& terms);

/// Converts a constant-exponent QTerm to a Monomial on the given lattice.
Monomial to_monomial(const QTerm& t, int denom);

/// Splits a comma list at top level (outside parentheses and brackets).
std::vector<std::string> split_top_level(std::string_view text, char sep);
std::string trim(std::string_view s);

/// Parses an integer or p/q literal.
Rational parse_rational(std::string_view text);

}  // namespace nahm
