#include <gtest/gtest.h>

#include "nahm/bailey.hpp"
#include "nahm/catalog.hpp"
#include "print.hpp"

using namespace nahm;

namespace {

QExponent W(std::int64_t v) { return QExponent::whole(v); }
QExponent U(std::int64_t units) { return QExponent(units, kDefaultDenom); }
Monomial qp(std::int64_t e) { return Monomial(1, W(e)); }
Monomial qhalf(std::int64_t halves, int sign = 1) { return Monomial(sign, U(2 * halves)); }

QSeries inv_poch(const Monomial& a, std::int64_t base, std::int64_t n, const QExponent& order) {
  return poch_finite_inverse(a, W(base), n, order);
}

bool pairs_equal(const BaileyPair& x, const BaileyPair& y, std::int64_t n_max, const QExponent& order) {
  for (std::int64_t n = 0; n <= n_max; ++n) {
    if (x.alpha_at(n, order) != y.alpha_at(n, order)) return false;
    if (x.beta_at(n, order) != y.beta_at(n, order)) return false;
  }
  return true;
}

}  // namespace

TEST(BuiltinPairs, PassTheDefiningRelation) {
  for (const char* name : {"G1", "G2", "G3", "G1star"}) {
    const PairReport r = verify_pair(builtin_pair(name), 12, W(30));
    EXPECT_TRUE(r.ok) << name;
    EXPECT_EQ(r.checks.size(), 13u);
  }
  EXPECT_THROW(builtin_pair("G4"), std::invalid_argument);
  EXPECT_NO_THROW(builtin_pair("G1*"));
}

TEST(BuiltinPairs, DisplayedFormulas) {
  const QExponent order = W(25);
  const BaileyPair g2 = builtin_pair("G2");
  EXPECT_EQ(g2.a.exp, W(1));
  const BaileyPair g3 = builtin_pair("G3");
  EXPECT_EQ(g3.a.exp, W(0));
  for (std::int64_t n = 0; n <= 6; ++n) {
    const QSeries b2 = mul(inv_poch(qp(2), 2, n, order), inv_poch(qhalf(3, -1), 1, n, order));
    EXPECT_EQ(g2.beta_at(n, order), b2) << n;
    const QSeries b3 = mul(monomial_series(qp(n), order),
                           mul(inv_poch(qp(2), 2, n, order), inv_poch(qhalf(1, -1), 1, n, order)));
    EXPECT_EQ(g3.beta_at(n, order), b3) << n;
  }
  // alpha_n of G1star: (-1)^n q^{(3/2) C(n+1,2)} (q^{-n} - q^{n+1}) / (1 - q).
  const BaileyPair g1s = builtin_pair("G1star");
  EXPECT_EQ(g1s.alpha_at(0, order), QSeries::one(order));
  for (std::int64_t n = 1; n <= 5; ++n) {
    const std::int64_t e = 3 * n * (n + 1);  // units of 1/4 for (3/2) C(n+1,2)
    QSeries num(kDefaultDenom, order.units());
    num = add(monomial_series(Monomial(n % 2 ? -1 : 1, U(e - 4 * n)), order),
              monomial_series(Monomial(n % 2 ? 1 : -1, U(e + 4 * (n + 1))), order));
    const QSeries want = mul(num, inv_poch(qp(1), 1, 1, order));
    EXPECT_EQ(g1s.alpha_at(n, order), want) << n;
  }
}

TEST(UnitPair, SingleTermRelation) {
  const BaileyPair u = unit_pair(qp(1));
  EXPECT_TRUE(verify_pair(u, 10, W(30)).ok);
  const QSeries b3 = mul(inv_poch(qp(1), 1, 3, W(30)), inv_poch(qp(2), 1, 3, W(30)));
  EXPECT_EQ(u.beta_at(3, W(30)), b3);
}

TEST(Transforms, DjkLimitTurnsG1starIntoG3) {
  const BaileyPair p = build_chain("G1star |> DJKLIM(q^(3/2))");
  EXPECT_TRUE(pairs_equal(p, builtin_pair("G3"), 8, W(30)));
  EXPECT_THROW(build_chain("G1 |> DJKLIM(q^(3/2))"), std::invalid_argument);
}

TEST(Transforms, S1TwiceOnTheUnitPair) {
  const BaileyPair u = unit_pair(qp(1));
  const TransformStep s1{TransformStep::Kind::S1, {}};
  const BaileyPair p = chain(u, {s1, s1});
  EXPECT_TRUE(verify_pair(p, 15, W(30)).ok);
  EXPECT_EQ(p.alpha_at(0, W(30)), QSeries::one(W(30)));
  EXPECT_TRUE(p.alpha_at(3, W(30)).is_zero());
}

TEST(Transforms, S3OnG1MatchesTheExampleTwelveProof) {
  // beta'_n = 1/(-q^{1/2};q)_n sum_k q^{k^2/2} / ((q;q)_{n-k} (q^2;q^2)_k)
  const QExponent order = W(20);
  const BaileyPair p = build_chain("G1 |> S3");
  for (std::int64_t n = 0; n <= 5; ++n) {
    QSeries s(kDefaultDenom, order.units());
    for (std::int64_t k = 0; k <= n; ++k) {
      s = add(s, mul(monomial_series(Monomial(1, U(2 * k * k)), order),
                     mul(inv_poch(qp(1), 1, n - k, order), inv_poch(qp(2), 2, k, order))));
    }
    EXPECT_EQ(p.beta_at(n, order), mul(s, inv_poch(qhalf(1, -1), 1, n, order))) << n;
  }
  // The limit identity, in q^2, collapses to (q^4,q^5,q^9;q^9)/(q^2;q^2).
  const Sides sides = limit_identity(p, W(20));
  EXPECT_TRUE(sides.report.equal);
  const QSeries rhs2 = substitute_power(sides.rhs, 2);
  EXPECT_TRUE(equal_up_to(rhs2, eval_product(parse_product("TP(4,5,9;9) / P(2;2)"), W(40)), W(40)).equal);
}

TEST(Transforms, S5NeedsASquareRoot) {
  const BaileyPair odd = unit_pair(Monomial(1, U(1)));
  EXPECT_THROW(apply_transform(odd, TransformStep{TransformStep::Kind::S5, {}}), std::invalid_argument);
}

TEST(Chain, EmptyAndAlphaExponents) {
  const BaileyPair g = builtin_pair("G1star");
  EXPECT_TRUE(pairs_equal(chain(g, {}), g, 6, W(20)));
  // S3 then S5 relative to a = q multiplies alpha_n by q^{2 C(n+1,2)}.
  const BaileyPair p = build_chain("G1star |> S3 |> S5");
  for (std::int64_t n = 0; n <= 10; ++n) {
    const QSeries want = g.alpha_at(n, W(80)).shifted(4 * n * (n + 1)).truncated(W(80).units());
    EXPECT_EQ(p.alpha_at(n, W(80)), want) << n;
  }
}

TEST(Chain, TheoremOneOneInstance) {
  const Identity t = instantiate_family("thm1.1", 2, 2);
  ASSERT_TRUE(t.bailey);
  EXPECT_EQ(t.bailey->chain, "G1star |> DJKLIM(q^(3/2)) |> S1");
  const CrossCheckReport r = cross_check_reduction(t, W(25));
  EXPECT_TRUE(r.ok()) << r.route;
}

TEST(ParseChain, Grammar) {
  const ChainExpr e = parse_chain("G1star |> S3 |> S1^2 |> DJKLIM(q^(3/2)) |> GENERAL(q^2, q^3)");
  EXPECT_EQ(e.seed, "G1star");
  ASSERT_EQ(e.steps.size(), 5u);
  EXPECT_EQ(e.steps[1].kind, TransformStep::Kind::S1);
  EXPECT_EQ(e.steps[2].kind, TransformStep::Kind::S1);
  EXPECT_EQ(e.steps[3].str(), "DJKLIM(q^(3/2))");
  EXPECT_EQ(e.steps[4].str(), "GENERAL(q^2, q^3)");
  EXPECT_THROW(parse_chain("G1 |>"), ParseError);
  EXPECT_THROW(parse_chain("G1 |> S7"), ParseError);
  EXPECT_THROW(parse_chain("G1^2"), ParseError);
  EXPECT_THROW(build_chain("NOPE"), std::invalid_argument);
}

TEST(GeneralBailey, Examples) {
  const BaileyPair u = unit_pair(qp(1));
  EXPECT_TRUE(general_bailey_check(u, qp(1), qp(1), 3, W(30)).report.equal);
  EXPECT_TRUE(general_bailey_check(builtin_pair("G1"), qp(2), qp(3), 5, W(40)).report.equal);
  const Sides zero = general_bailey_check(builtin_pair("G2"), qp(2), qp(3), 0, W(20));
  EXPECT_TRUE(zero.report.equal);
  EXPECT_EQ(zero.lhs, builtin_pair("G2").beta_at(0, W(20)));
}

TEST(LimitIdentity, Examples) {
  const Sides u = limit_identity(unit_pair(qp(1)), W(40));
  EXPECT_TRUE(u.report.equal);
  const Sides z = limit_identity(builtin_pair("G2"), W(0));
  EXPECT_EQ(z.lhs, QSeries::one(W(0)));
  EXPECT_EQ(z.rhs, QSeries::one(W(0)));
}

TEST(TerminatingPairSum, SmallK) {
  for (std::int64_t k = 0; k <= 12; ++k) EXPECT_TRUE(lemma23_check(k, W(30)).report.equal) << k;
}

TEST(GeneralBailey, LargeRhoApproachesS1) {
  // rho = q^{-N} differs from rho -> infinity only from q^{N+1} on.
  const BaileyPair s1 = apply_transform(builtin_pair("G1"), TransformStep{TransformStep::Kind::S1, {}});
  for (std::int64_t N : {4, 9}) {
    const Monomial rho(1, W(-N));
    const BaileyPair g =
        apply_transform(builtin_pair("G1"), TransformStep{TransformStep::Kind::General, {rho, rho}});
    for (std::int64_t n = 0; n <= 5; ++n) {
      EXPECT_TRUE(equal_up_to(g.beta_at(n, W(N)), s1.beta_at(n, W(N)), W(N)).equal) << N << " " << n;
      EXPECT_TRUE(equal_up_to(g.alpha_at(n, W(N)), s1.alpha_at(n, W(N)), W(N)).equal) << N << " " << n;
    }
    EXPECT_TRUE(verify_pair(g, 6, W(20)).ok);
    EXPECT_TRUE(general_bailey_check(builtin_pair("G1"), rho, rho, 4, W(20)).report.equal);
  }
}
