#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "nahm/bailey.hpp"
#include "nahm/catalog.hpp"
#include "random_chain.hpp"
#include "print.hpp"

using namespace nahm;

namespace {

QExponent W(std::int64_t v) { return QExponent::whole(v); }
QExponent U(std::int64_t units) { return QExponent(units, kDefaultDenom); }
Monomial qp(std::int64_t e) { return Monomial(1, W(e)); }

QSeries random_series(std::mt19937& rng, std::int64_t order, bool unit = false, int unit_step = 1) {
  std::uniform_int_distribution<int> count(0, 8);
  std::uniform_int_distribution<std::int64_t> expo(0, order * kDefaultDenom / unit_step);
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 3);
  QSeries::Terms t;
  for (int i = count(rng); i > 0; --i) t[expo(rng) * unit_step] += Rational(num(rng), den(rng));
  if (unit) {
    int c = 0;
    while (c == 0) c = num(rng);
    t[0] = Rational(c, den(rng));
  }
  return QSeries::from_terms(kDefaultDenom, order * kDefaultDenom, t);
}

// Terms c z^n q^{shift(n)} / (q;q)_n until they pass the order.
QSeries euler_sum(const Monomial& z, bool with_binomial, const QExponent& order) {
  QSeries s(kDefaultDenom, order.units());
  for (std::int64_t n = 0;; ++n) {
    Monomial m = z.pow(n);
    if (with_binomial) m = m * qp(n * (n - 1) / 2);
    if (m.exp > order) break;
    s = add(s, mul(monomial_series(m, order), poch_finite_inverse(qp(1), W(1), n, order)));
  }
  return s;
}

}  // namespace

TEST(SeriesRing, Axioms) {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const QSeries a = random_series(rng, 10);
    const QSeries b = random_series(rng, 10);
    const QSeries c = random_series(rng, 10);
    EXPECT_EQ(add(a, b), add(b, a));
    EXPECT_EQ(mul(a, b), mul(b, a));
    EXPECT_EQ(add(add(a, b), c), add(a, add(b, c)));
    EXPECT_EQ(mul(mul(a, b), c), mul(a, mul(b, c)));
    EXPECT_EQ(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
    EXPECT_EQ(mul(a, QSeries::one(W(10))), a);
    EXPECT_TRUE(add(a, -a).is_zero());
  }
}

TEST(SeriesRing, InvertRoundTrip) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const QSeries a = random_series(rng, 10, true);
    const QSeries inv = invert_unit(a, W(10));
    EXPECT_TRUE(equal_up_to(mul(a, inv), QSeries::one(W(10)), W(10)).equal) << dump(a);
  }
}

TEST(SeriesRing, SubstitutePowerIsMultiplicative) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const QSeries a = random_series(rng, 8, false, 2);
    const QSeries b = random_series(rng, 8, false, 2);
    for (const Rational k : {Rational(2), Rational(3), Rational(1, 2)}) {
      // The two sides may carry different truncation orders; compare where both are valid.
      const QSeries lhs = substitute_power(mul(a, b), k);
      const QSeries rhs = mul(substitute_power(a, k), substitute_power(b, k));
      EXPECT_TRUE(equal_up_to(lhs, rhs, std::min(lhs.order(), rhs.order())).equal) << dump(a) << dump(b);
    }
  }
}

TEST(Euler, BothIdentities) {
  const QExponent order = W(40);
  for (const Monomial& z : {qp(1), qp(2), Monomial(1, U(2))}) {
    EXPECT_EQ(euler_sum(z, false, order), invert_unit(poch_infinite(z, W(1), order), order)) << z.str();
    EXPECT_EQ(euler_sum(z, true, order), poch_infinite(z * Monomial(-1, W(0)), W(1), order)) << z.str();
  }
}

TEST(Jacobi, TripleProductOnRandomParameters) {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<std::int64_t> m_units(2, 60);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t m = m_units(rng);
    const std::int64_t a = std::uniform_int_distribution<std::int64_t>(1, m - 1)(rng);
    EXPECT_EQ(theta_triple(U(a), U(m), W(40)), triple_product_oracle(Monomial(1, U(a)), U(m), W(40)))
        << a << "/4 mod " << m << "/4";
  }
}

TEST(Lemmas, FirstConsequence) {
  // sum_{i+2j=n} q^{C(i,2)} / ((q;q)_i (q^2;q^2)_j) = 1/(q;q)_n
  const QExponent order = W(50);
  for (std::int64_t n = 0; n <= 50; ++n) {
    QSeries s(kDefaultDenom, order.units());
    for (std::int64_t j = 0; 2 * j <= n; ++j) {
      const std::int64_t i = n - 2 * j;
      if (i * (i - 1) / 2 > 50) continue;
      s = add(s, mul(monomial_series(qp(i * (i - 1) / 2), order),
                     mul(poch_finite_inverse(qp(1), W(1), i, order),
                         poch_finite_inverse(qp(2), W(2), j, order))));
    }
    EXPECT_EQ(s, poch_finite_inverse(qp(1), W(1), n, order)) << n;
  }
}

TEST(Lemmas, SecondConsequence) {
  // sum_{i+j=n} q^{i^2+j^2-i} / ((q^2;q^2)_i (q^2;q^2)_j) = q^{C(n,2)} / (q;q)_n
  const QExponent order = W(50);
  for (std::int64_t n = 0; n <= 50; ++n) {
    QSeries s(kDefaultDenom, order.units());
    for (std::int64_t i = 0; i <= n; ++i) {
      const std::int64_t j = n - i;
      const std::int64_t e = i * i + j * j - i;
      if (e > 50) continue;
      s = add(s, mul(monomial_series(qp(e), order),
                     mul(poch_finite_inverse(qp(2), W(2), i, order),
                         poch_finite_inverse(qp(2), W(2), j, order))));
    }
    const std::int64_t e = n * (n - 1) / 2;
    const QSeries want = e > 50 ? QSeries(kDefaultDenom, order.units())
                                : mul(monomial_series(qp(e), order),
                                      poch_finite_inverse(qp(1), W(1), n, order));
    EXPECT_EQ(s, want) << n;
  }
}

TEST(Pochhammer, ShiftAndNegativeIndex) {
  const QExponent order = W(20);
  for (const Monomial& a : {Monomial(-1, U(2)), Monomial(3, U(1))}) {
    for (std::int64_t n = -10; n <= 10; ++n) {
      const QSeries lhs = poch_finite(a, W(1), n + 1, order);
      const QSeries factor = sub(QSeries::one(order), monomial_series(a * qp(n), order));
      const QSeries rhs = mul(poch_finite(a, W(1), n, order), factor);
      // Negative exponents in a q^n cost validity on the inverted side.
      EXPECT_TRUE(equal_up_to(lhs, rhs, std::min(lhs.order(), rhs.order())).equal) << a.str() << " " << n;
    }
    for (std::int64_t m = 1; m <= 10; ++m) {
      const QSeries prod = mul(poch_finite(a, W(1), -m, order), poch_finite(a * qp(-m), W(1), m, order));
      EXPECT_TRUE(equal_up_to(prod, QSeries::one(order), std::min(prod.order(), order)).equal)
          << a.str() << " " << m;
    }
  }
}

TEST(Symmetry, SwappingJAndK) {
  const Catalog cat = Catalog::builtin();
  const QExponent order = W(30);
  EXPECT_EQ(eval_lhs(*cat.find("table2.15.1"), order), eval_lhs(*cat.find("table2.15.2"), order));
  EXPECT_EQ(eval_lhs(*cat.find("table2.15.3"), order), eval_lhs(*cat.find("table2.15.4"), order));
}

TEST(BaileyTransforms, RandomChainsStayBaileyPairs) {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 50; ++trial) {
    const chains::Drawn d = chains::draw_chain(rng, 3);
    const PairReport r = verify_pair(d.pair, 15, W(40));
    EXPECT_TRUE(r.ok) << d.text;
  }
}
