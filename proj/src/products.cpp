#include "nahm/products.hpp"

#include <algorithm>
#include <stdexcept>

namespace nahm {

namespace {

void check_base(const QExponent& base) {
  if (base.units() <= 0) throw std::domain_error("Pochhammer base must be positive");
}

Monomial shift_arg(const Monomial& a, const QExponent& base, std::int64_t k) {
  return {a.coeff, a.exp + base * k};
}

// Multiplies s by (1 - c q^e) where e may be negative; the order moves with the shift.
QSeries times_factor(const QSeries& s, const Monomial& m) {
  const std::int64_t e = m.exp.units();
  if (e >= 0) return times_binomial(s, -m.coeff, e);
  // (1 - c q^e) = -c q^e (1 - c^{-1} q^{-e})
  QSeries t = times_binomial(s, -(Rational(1) / m.coeff), -e);
  return t.shifted(e).scaled(-m.coeff);
}

QSeries divide_factor(const QSeries& s, const Monomial& m) {
  const std::int64_t e = m.exp.units();
  if (e > 0) return divide_binomial(s, -m.coeff, e);
  if (e == 0) {
    if (m.coeff == 1) throw std::domain_error("Pochhammer factor vanishes identically");
    return s.scaled(Rational(1) / (Rational(1) - m.coeff));
  }
  // 1/(1 - c q^e) = -c^{-1} q^{-e} / (1 - c^{-1} q^{-e})
  QSeries t = divide_binomial(s, -(Rational(1) / m.coeff), -e);
  return t.shifted(-e).scaled(-(Rational(1) / m.coeff));
}

}  // namespace

QSeries poch_finite_inverse(const Monomial& a, const QExponent& base, std::int64_t n,
                            const QExponent& order) {
  check_base(base);
  if (n < 0) throw std::domain_error("poch_finite_inverse expects n >= 0");
  // Negative exponents raise the denominator's valuation; work higher to compensate.
  std::int64_t slack = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    slack += std::max<std::int64_t>(0, -(a.exp.units() + base.units() * k));
  }
  QSeries s = QSeries::one(QExponent(order.units() + 2 * slack, order.denom()));
  for (std::int64_t k = 0; k < n; ++k) s = divide_factor(s, shift_arg(a, base, k));
  return s.truncated(order.units());
}

QSeries poch_finite(const Monomial& a, const QExponent& base, std::int64_t n,
                    const QExponent& order) {
  check_base(base);
  if (n >= 0) {
    std::int64_t slack = 0;
    for (std::int64_t k = 0; k < n; ++k) {
      slack += std::max<std::int64_t>(0, -(a.exp.units() + base.units() * k));
    }
    QSeries s = QSeries::one(QExponent(order.units() + slack, order.denom()));
    for (std::int64_t k = 0; k < n; ++k) s = times_factor(s, shift_arg(a, base, k));
    return s.truncated(order.units());
  }
  const Monomial start = shift_arg(a, base, n);
  for (std::int64_t k = 0; k < -n; ++k) {
    const Monomial f = shift_arg(start, base, k);
    if (f.exp.units() == 0 && f.coeff == 1) {
      throw std::domain_error("vanishing factor in negative-index Pochhammer symbol");
    }
  }
  return poch_finite_inverse(start, base, -n, order);
}

QSeries poch_infinite(const Monomial& a, const QExponent& base, const QExponent& order) {
  check_base(base);
  // Factors with negative exponent push lower terms down; raise the working order by their sum.
  std::int64_t slack = 0;
  for (std::int64_t k = 0; a.exp.units() + base.units() * k < 0; ++k) {
    slack -= a.exp.units() + base.units() * k;
  }
  const std::int64_t work = order.units() + slack;
  QSeries s = QSeries::one(QExponent(work, order.denom()));
  for (std::int64_t k = 0; a.exp.units() + base.units() * k <= work; ++k) {
    s = times_factor(s, shift_arg(a, base, k));
    if (s.is_zero()) break;
  }
  return s.truncated(order.units());
}

QSeries triple_product_oracle(const Monomial& z, const QExponent& base, const QExponent& order) {
  check_base(base);
  const int denom = order.denom();
  // exponent(n) = base*n(n-1)/2 + z.exp*n, in units; convex in n.
  auto expo = [&](std::int64_t n) {
    const std::int64_t twice = base.units() * n * (n - 1) + 2 * z.exp.units() * n;
    if (twice % 2 != 0) throw LatticeError("triple product exponent off the lattice");
    return twice / 2;
  };
  QSeries s(denom, order.units());
  auto add_term = [&](std::int64_t n) {
    const Monomial zn = z.pow(n);
    s.accumulate(expo(n), (n % 2 == 0 ? Rational(1) : Rational(-1)) * zn.coeff);
  };
  for (std::int64_t n = 0;; ++n) {
    const std::int64_t e = expo(n);
    if (e > order.units() && expo(n + 1) > e) break;
    add_term(n);
  }
  for (std::int64_t n = -1;; --n) {
    const std::int64_t e = expo(n);
    if (e > order.units() && expo(n - 1) > e) break;
    add_term(n);
  }
  return s;
}

QSeries theta_triple(const QExponent& a, const QExponent& m, const QExponent& order) {
  if (a.units() <= 0 || a >= m) throw std::domain_error("theta_triple needs 0 < a < m");
  return eval_product(theta_expr(a, m), order);
}

ProductExpr& ProductExpr::times(const ProductExpr& other) {
  if (other.prefactor.empty()) {
    // keep ours
  } else if (prefactor.empty()) {
    prefactor = other.prefactor;
  } else {
    std::vector<Monomial> out;
    for (const auto& x : prefactor) {
      for (const auto& y : other.prefactor) out.push_back(x * y);
    }
    prefactor = std::move(out);
  }
  factors.insert(factors.end(), other.factors.begin(), other.factors.end());
  return *this;
}

ProductExpr ProductExpr::inverse() const {
  ProductExpr out;
  if (prefactor.size() > 1) {
    throw std::domain_error("cannot invert a product with a polynomial prefactor");
  }
  if (prefactor.size() == 1) {
    const Monomial& m = prefactor.front();
    out.prefactor.push_back(Monomial(Rational(1), QExponent(0, m.exp.denom())) / m);
  }
  for (auto f : factors) {
    f.power = -f.power;
    out.factors.push_back(f);
  }
  return out;
}

std::string ProductExpr::str() const {
  std::string out;
  const bool unit = prefactor.size() == 1 && prefactor[0].coeff == 1 && prefactor[0].exp.units() == 0;
  if (!prefactor.empty() && !unit) {
    out += "(";
    for (std::size_t i = 0; i < prefactor.size(); ++i) {
      if (i) out += " + ";
      out += prefactor[i].str();
    }
    out += ")";
  }
  for (const auto& f : factors) {
    if (!out.empty()) out += " * ";
    out += "(" + f.arg.str() + "; " + Monomial(1, f.base).str() + ")_inf";
    if (f.power != 1) out += "^" + std::to_string(f.power);
  }
  return out.empty() ? "1" : out;
}

ProductExpr J(std::int64_t m, OnLattice lat) {
  if (m <= 0) throw std::domain_error("J_m needs m > 0");
  const QExponent qm = QExponent::whole(m, lat.denom);
  return ProductExpr{{}, {PochFactor{Monomial(Rational(1), qm), qm, 1}}};
}

ProductExpr J(std::int64_t a, std::int64_t m, OnLattice lat) {
  if (a <= 0 || a >= m) throw std::domain_error("J_{a,m} needs 0 < a < m");
  return theta_expr(QExponent::whole(a, lat.denom), QExponent::whole(m, lat.denom));
}

ProductExpr theta_expr(const QExponent& a, const QExponent& m) {
  if (a.units() <= 0 || a >= m) throw std::domain_error("theta triple needs 0 < a < m");
  ProductExpr e;
  for (const QExponent& x : {a, m - a, m}) e.factors.push_back({Monomial(Rational(1), x), m, 1});
  return e;
}

QSeries eval_product(const ProductExpr& expr, const QExponent& order) {
  const int denom = order.denom();
  for (const auto& f : expr.factors) {
    check_base(f.base);
    if (f.arg.exp.units() < 0) {
      throw std::domain_error("product factor with negative argument exponent");
    }
    if (f.power < 0 && f.arg.exp.units() == 0 && f.arg.coeff == 1) {
      throw std::domain_error("denominator factor vanishes");
    }
  }
  std::int64_t pre_val = 0;
  for (const auto& m : expr.prefactor) pre_val = std::min(pre_val, m.exp.units());
  const std::int64_t work = order.units() - pre_val;

  QSeries s = QSeries::one(QExponent(work, denom));
  for (const auto& f : expr.factors) {
    if (f.power > 0) {
      for (int p = 0; p < f.power; ++p) {
        for (std::int64_t k = 0; f.arg.exp.units() + f.base.units() * k <= work; ++k) {
          s = times_factor(s, shift_arg(f.arg, f.base, k));
        }
      }
    }
  }
  for (const auto& f : expr.factors) {
    if (f.power < 0) {
      for (int p = 0; p < -f.power; ++p) {
        for (std::int64_t k = 0; f.arg.exp.units() + f.base.units() * k <= work; ++k) {
          s = divide_factor(s, shift_arg(f.arg, f.base, k));
        }
      }
    }
  }
  if (!expr.prefactor.empty()) {
    QSeries pre(denom, work);
    for (const auto& m : expr.prefactor) pre.accumulate(m.exp.units(), m.coeff);
    s = mul(pre, s);
  }
  return s.truncated(order.units());
}

QSeries eval_product(const ProductSum& sum, const QExponent& order) {
  QSeries total(order.denom(), order.units());
  for (const auto& e : sum) total = add(total, eval_product(e, order));
  return total;
}

}  // namespace nahm
