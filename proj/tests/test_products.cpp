#include <gtest/gtest.h>

#include "nahm/catalog.hpp"
#include "nahm/products.hpp"
#include "oracle.hpp"
#include "print.hpp"

using namespace nahm;

namespace {

QExponent W(std::int64_t v) { return QExponent::whole(v); }
QExponent H(std::int64_t halves) { return QExponent(2 * halves, kDefaultDenom); }
Monomial qp(std::int64_t e) { return Monomial(1, W(e)); }

QSeries S(std::initializer_list<std::pair<Rational, Rational>> terms, std::int64_t order) {
  QSeries::Terms t;
  for (const auto& [e, c] : terms) t[QExponent::from_rational(e, kDefaultDenom).units()] += c;
  return QSeries::from_terms(kDefaultDenom, order * kDefaultDenom, t);
}

}  // namespace

TEST(PochFinite, Examples) {
  EXPECT_EQ(poch_finite(qp(1), W(1), 0, W(20)), QSeries::one(W(20)));
  EXPECT_EQ(poch_finite(qp(1), W(1), 3, W(20)),
            S({{0, 1}, {1, -1}, {2, -1}, {4, 1}, {5, 1}, {6, -1}}, 20));
  const QSeries neg = poch_finite(qp(3), W(1), -2, W(20));
  const QSeries back = mul(neg, poch_finite(qp(1), W(1), 2, W(20)));
  EXPECT_TRUE(equal_up_to(back, QSeries::one(W(20)), W(20)).equal);
  // (q^2; q)_{-2} = 1 / ((1) (1 - q)) has a vanishing factor (1 - q^0).
  EXPECT_THROW(poch_finite(qp(2), W(1), -2, W(10)), std::domain_error);
}

TEST(PochFinite, InverseMatchesInvert) {
  const Monomial a(-1, H(1));
  for (int n = 0; n <= 6; ++n) {
    EXPECT_EQ(poch_finite_inverse(a, W(1), n, W(15)),
              invert_unit(poch_finite(a, W(1), n, W(15)), W(15)));
  }
}

TEST(PochInfinite, Examples) {
  EXPECT_EQ(poch_infinite(qp(1), W(1), W(12)),
            S({{0, 1}, {1, -1}, {2, -1}, {5, 1}, {7, 1}, {12, -1}}, 12));
  EXPECT_EQ(poch_infinite(qp(5), W(1), W(4)), QSeries::one(W(4)));

  // (1 + q^{1/2})(1 + q^{3/2}) is everything that reaches q^2.
  oracle::Vec ref = oracle::one(8);
  oracle::times_binomial(ref, 1, 2);
  oracle::times_binomial(ref, 1, 6);
  const QSeries p = poch_infinite(Monomial(-1, H(1)), W(1), W(2));
  for (int u = 0; u <= 8; ++u) EXPECT_EQ(p.coefficient_units(u), ref[u]) << u;
  EXPECT_EQ(p.coefficient(W(2)), 1);  // q^{1/2} q^{3/2}
  // (1; q)_inf has the factor 1 - 1.
  EXPECT_TRUE(poch_infinite(qp(0), W(1), W(4)).is_zero());
}

TEST(TripleProduct, OracleAgreesWithProducts) {
  // z = q: (q, 1, q; q) vanishes and so does the bilateral sum.
  EXPECT_TRUE(triple_product_oracle(qp(1), W(1), W(30)).is_zero());

  EXPECT_EQ(triple_product_oracle(qp(5), W(11), W(40)), theta_triple(W(5), W(11), W(40)));

  // z = q^{1/2}, base 3/2: (q^{1/2}, q, q^{3/2}; q^{3/2}).
  const QExponent base = H(3);
  QSeries prod = poch_infinite(Monomial(1, H(1)), base, W(30));
  prod = mul(prod, poch_infinite(qp(1), base, W(30)));
  prod = mul(prod, poch_infinite(Monomial(1, base), base, W(30)));
  EXPECT_TRUE(equal_up_to(triple_product_oracle(Monomial(1, H(1)), base, W(30)), prod, W(30)).equal);
}

TEST(ThetaTriple, Examples) {
  EXPECT_EQ(theta_triple(W(1), W(5), W(10)), triple_product_oracle(qp(1), W(5), W(10)));
  EXPECT_EQ(theta_triple(W(3), W(8), W(30)), theta_triple(W(5), W(8), W(30)));
  EXPECT_EQ(theta_triple(W(2), W(4), W(30)), triple_product_oracle(qp(2), W(4), W(30)));
  // Numerator of table2.13.1.
  const Catalog cat = Catalog::builtin();
  const ProductExpr num = parse_product_term("TP(5,6,11;11)");
  EXPECT_EQ(eval_product(num, W(30)), theta_triple(W(5), W(11), W(30)));
  EXPECT_NE(cat.find("table2.13.1")->rhs_text.find("TP(5,6,11;11)"), std::string::npos);
  EXPECT_THROW(theta_triple(W(0), W(5), W(10)), std::domain_error);
  EXPECT_THROW(theta_triple(W(5), W(5), W(10)), std::domain_error);
}

TEST(JHelpers, Definitions) {
  EXPECT_EQ(eval_product(J(2, 28), W(60)), theta_triple(W(2), W(28), W(60)));
  EXPECT_EQ(eval_product(J(14), W(60)), poch_infinite(qp(14), W(14), W(60)));
  EXPECT_THROW(J(0, 28), std::domain_error);
  EXPECT_THROW(J(28, 28), std::domain_error);
}

TEST(EvalProduct, Examples) {
  EXPECT_EQ(eval_product(ProductExpr{}, W(10)), QSeries::one(W(10)));

  const QSeries rr1 = eval_product(parse_product("1 / P(1,4;5)"), W(10));
  for (int m = 0; m <= 10; ++m) EXPECT_EQ(rr1.coefficient(W(m)), oracle::gap2_partitions(m, 1)) << m;

  const QSeries two = eval_product(parse_product("2 * TP(3,5,8;8) / P(1;1)"), W(20));
  const QSeries ref =
      mul(theta_triple(W(3), W(8), W(20)), invert_unit(poch_infinite(qp(1), W(1), W(20)), W(20)));
  EXPECT_EQ(two, ref.scaled(2));
}

TEST(EvalProduct, SumOfProducts) {
  const ProductSum s = parse_product("P(1;1) + P(1;1)");
  EXPECT_EQ(eval_product(s, W(10)), poch_infinite(qp(1), W(1), W(10)).scaled(2));
}
