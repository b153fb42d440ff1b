#pragma once

// Pochhammer symbols, theta triples and products of them.

#include <string>
#include <vector>

#include "nahm/series.hpp"

namespace nahm {

/// (a; q^base)_n. Negative n means 1 / (a q^(base n); q^base)_{-n}.
QSeries poch_finite(const Monomial& a, const QExponent& base, std::int64_t n,
                    const QExponent& order);

/// 1 / (a; q^base)_n for n >= 0, using one division per factor.
QSeries poch_finite_inverse(const Monomial& a, const QExponent& base, std::int64_t n,
                            const QExponent& order);

/// (a; q^base)_inf truncated at order.
QSeries poch_infinite(const Monomial& a, const QExponent& base, const QExponent& order);

/// Sum over all integers n of (-1)^n q^(base * n(n-1)/2) z^n.
QSeries triple_product_oracle(const Monomial& z, const QExponent& base, const QExponent& order);

/// (q^a, q^(m-a), q^m; q^m)_inf.
QSeries theta_triple(const QExponent& a, const QExponent& m, const QExponent& order);

/// One factor (arg; q^base)_inf^power.
struct PochFactor {
  Monomial arg;
  QExponent base;
  int power = 1;
};

/// prefactor * prod of factors. An empty prefactor means 1.
struct ProductExpr {
  std::vector<Monomial> prefactor;
  std::vector<PochFactor> factors;

  ProductExpr& times(const ProductExpr& other);
  ProductExpr inverse() const;  // requires a monomial (or empty) prefactor
  std::string str() const;
};

/// A sum of product expressions.
using ProductSum = std::vector<ProductExpr>;

/// Lattice tag for the J helpers, so that J(a, m) never binds to J(m, denom).
struct OnLattice {
  int denom = kDefaultDenom;
};

/// J_m = (q^m; q^m)_inf.
ProductExpr J(std::int64_t m, OnLattice lat = {});
/// J_{a,m} = (q^a, q^(m-a), q^m; q^m)_inf.
ProductExpr J(std::int64_t a, std::int64_t m, OnLattice lat = {});
/// Theta triple with lattice exponents, as a product expression.
ProductExpr theta_expr(const QExponent& a, const QExponent& m);

QSeries eval_product(const ProductExpr& expr, const QExponent& order);
QSeries eval_product(const ProductSum& sum, const QExponent& order);

}  // namespace nahm
