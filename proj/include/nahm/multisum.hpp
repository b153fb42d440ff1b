#pragma once

// Generic k-fold sums with a quadratic exponent:
//
//   sum_{n >= 0} P(n) q^{E(n)} * prod_j 1/(q^{b_j}; q^{b_j})_{n_j} * prod extras
//
// where E has degree <= 2, P is a finite sum of c q^{affine(n)}, and each extra
// is (a; q^m)_{L(n)}^{+-1} with L affine.

#include <cstdint>
#include <string>
#include <vector>

#include "nahm/poly.hpp"
#include "nahm/series.hpp"

namespace nahm {

struct ExtraFactor {
  Monomial arg;
  QExponent base;
  Poly length;  // affine in the summation variables
  bool in_denominator = false;

  std::string str() const;
};

struct MultiSumSpec {
  std::vector<std::string> vars;
  Poly exponent;
  /// One base per variable; a zero base means no Pochhammer denominator.
  std::vector<QExponent> denom_bases;
  std::vector<ExtraFactor> extras;
  /// Empty means the constant 1.
  std::vector<QTerm> prefactor;
  int denom = kDefaultDenom;
};

/// E(n) = 1/2 n^T M n + l^T n + c over the spec's variables.
struct QuadraticForm {
  std::vector<std::vector<Rational>> M;
  std::vector<Rational> l;
  Rational c;

  std::size_t rank() const { return l.size(); }
  Rational eval(const std::vector<std::int64_t>& n) const;
};

QuadraticForm quadratic_form(const Poly& exponent, const std::vector<std::string>& vars);
/// Affine polynomial as (coefficients, constant).
std::pair<std::vector<Rational>, Rational> affine_form(const Poly& p,
                                                       const std::vector<std::string>& vars);

/// Exact test via leading principal minors.
bool positive_definite(const std::vector<std::vector<Rational>>& M);
/// Positive diagonal and no negative entries: the form grows on the orthant
/// even when it is only semidefinite.
bool orthant_bounded(const std::vector<std::vector<Rational>>& M);
std::vector<std::vector<Rational>> inverse(const std::vector<std::vector<Rational>>& M);

/// Checks the spec is well formed: degree, variable names, and a form that is
/// positive definite or orthant_bounded.
void validate(const MultiSumSpec& spec);

/// Box [0, M_1] x ... x [0, M_r] holding every point whose summand can reach
/// exponents <= order. An entry of -1 means no point qualifies.
std::vector<std::int64_t> lattice_bound(const MultiSumSpec& spec, const QExponent& order);
std::vector<std::int64_t> lattice_bound(const QuadraticForm& form, const QExponent& order);

struct MultiSumStats {
  std::vector<std::int64_t> box;
  std::uint64_t points = 0;  // lattice points that contributed
};

QSeries multi_sum(const MultiSumSpec& spec, const QExponent& order,
                  MultiSumStats* stats = nullptr);

/// Direct evaluation over an explicit box, without pruning. Used to check
/// that enlarging the box changes nothing.
QSeries multi_sum_box(const MultiSumSpec& spec, const QExponent& order,
                      const std::vector<std::int64_t>& box);

std::string describe(const MultiSumSpec& spec);

}  // namespace nahm
