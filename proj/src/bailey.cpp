#include "nahm/bailey.hpp"

#include <cmath>
#include <stdexcept>

#include "nahm/poly.hpp"
#include "nahm/products.hpp"

namespace nahm {

namespace {

using Gen = std::function<QSeries(std::int64_t)>;

Monomial qpow(std::int64_t units, int denom) { return {Rational(1), QExponent(units, denom)}; }
Monomial unit_monomial(int denom) { return qpow(0, denom); }

std::int64_t q_units(const Rational& e, int denom) {
  return QExponent::from_rational(e, denom).units();
}

/// m * s with the order carried along.
QSeries times_monomial(const Monomial& m, const QSeries& s) {
  return s.scaled(m.coeff).shifted(m.exp.units());
}

/// Product of generated factors, valid through `order`. Factors are re-requested
/// at higher orders until the negative valuations of the others are covered.
QSeries product_to(std::int64_t order, int denom, const std::vector<Gen>& gens) {
  std::vector<std::int64_t> low(gens.size(), 0);
  for (int round = 0; round < 8; ++round) {
    std::int64_t total_low = 0;
    for (auto l : low) total_low += l;
    QSeries acc = QSeries::one(QExponent(order - total_low, denom));
    bool changed = false;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const QSeries f = gens[i](order - (total_low - low[i]));
      const std::int64_t v = std::min<std::int64_t>(0, f.valuation_units());
      if (v < low[i]) {
        low[i] = v;
        changed = true;
      }
      acc = mul(acc, f);
    }
    if (!changed || acc.order_units() >= order) {
      if (acc.order_units() < order) break;
      return acc.truncated(order);
    }
  }
  throw TruncationError("could not reach the requested order in a Bailey product");
}

QSeries scaled_product(const Monomial& m, std::int64_t order, int denom,
                       const std::vector<Gen>& gens) {
  return times_monomial(m, product_to(order - m.exp.units(), denom, gens));
}

Gen poch(const Monomial& a, std::int64_t base_units, std::int64_t n) {
  return [=](std::int64_t o) {
    return poch_finite(a, QExponent(base_units, a.exp.denom()), n, QExponent(o, a.exp.denom()));
  };
}

Gen poch_inv(const Monomial& a, std::int64_t base_units, std::int64_t n) {
  return [=](std::int64_t o) {
    return poch_finite_inverse(a, QExponent(base_units, a.exp.denom()), n,
                               QExponent(o, a.exp.denom()));
  };
}

Gen seq(const std::shared_ptr<const Sequence>& s, std::int64_t n) {
  return [s, n](std::int64_t o) { return s->at(n, o); };
}

Gen constant_series(const QSeries& poly) {
  return [poly](std::int64_t o) {
    return QSeries::from_terms(poly.denom(), o, poly.terms());
  };
}

/// Exact quotient of a Laurent polynomial by (1 - q^(step/D)); throws if it does not divide.
QSeries::Terms divide_one_minus(const QSeries::Terms& num, std::int64_t step) {
  QSeries::Terms quotient;
  QSeries::Terms rem = num;
  while (!rem.empty()) {
    auto [e, c] = *rem.begin();
    rem.erase(rem.begin());
    // c q^e = c q^e (1 - q^step) + c q^(e+step)
    quotient[e] += c;
    Rational& next = rem[e + step];
    next += c;
    if (next == 0) rem.erase(e + step);
    if (!rem.empty() && rem.begin()->first > num.rbegin()->first) {
      throw std::logic_error("numerator is not divisible by (1 - q)");
    }
  }
  return quotient;
}

/// (-1)^n q^(top) (q^(-lo) - q^(hi)) / (1 - q^(step)), exactly; all in lattice units.
QSeries polynomial_alpha(std::int64_t n, std::int64_t top, std::int64_t lo, std::int64_t hi,
                         std::int64_t step, int denom) {
  const Rational sign = n % 2 == 0 ? 1 : -1;
  QSeries::Terms num{{top - lo, sign}, {top + hi, -sign}};
  QSeries::Terms q = divide_one_minus(num, step);
  const std::int64_t max_e = q.empty() ? 0 : q.rbegin()->first;
  return QSeries::from_terms(denom, max_e, std::move(q));
}

void require_unit_aq(const Monomial& a) {
  const Monomial aq = a * qpow(a.exp.denom(), a.exp.denom());
  if (aq.exp.units() < 0 || (aq.exp.units() == 0 && aq.coeff == 1)) {
    throw std::domain_error("(aq;q) is not a unit series for a = " + a.str());
  }
}

std::shared_ptr<const Sequence> make_seq(int denom, Sequence::Generator g) {
  return std::make_shared<const Sequence>(denom, std::move(g));
}

bool is_q_power(const Monomial& m, std::int64_t units) {
  return m.coeff == 1 && m.exp.units() == units;
}

std::int64_t binom2(std::int64_t n) { return n * (n - 1) / 2; }

}  // namespace

QSeries Sequence::at(std::int64_t n, std::int64_t order_units) const {
  if (n < 0) return QSeries(denom_, order_units);
  auto it = memo_.find(n);
  if (it != memo_.end() && it->second.order_units() >= order_units) {
    return it->second.truncated(order_units);
  }
  // Callers tend to ask for low orders first and the full order later; computing at
  // the highest order seen so far avoids redoing every nested sum.
  high_water_ = std::max(high_water_, order_units);
  QSeries s = gen_(n, high_water_);
  if (s.order_units() < high_water_) {
    throw TruncationError("sequence generator returned a series below the requested order");
  }
  memo_.insert_or_assign(n, s.truncated(high_water_));
  return s.truncated(order_units);
}

std::string TransformStep::str() const {
  switch (kind) {
    case Kind::S1: return "S1";
    case Kind::S3: return "S3";
    case Kind::S5: return "S5";
    case Kind::General: return "GENERAL(" + params.at(0).str() + ", " + params.at(1).str() + ")";
    case Kind::DJK: return "DJK(" + params.at(0).str() + ")";
    case Kind::DJKLimit: return "DJKLIM(" + params.at(0).str() + ")";
  }
  return "?";
}

BaileyPair unit_pair(const Monomial& a) {
  const int D = a.exp.denom();
  require_unit_aq(a);
  const Monomial aq = a * qpow(D, D);
  auto alpha = make_seq(D, [D](std::int64_t n, std::int64_t o) {
    return n == 0 ? QSeries::one(QExponent(o, D)) : QSeries(D, o);
  });
  auto beta = make_seq(D, [D, aq](std::int64_t n, std::int64_t o) {
    return product_to(o, D, {poch_inv(qpow(D, D), D, n), poch_inv(aq, D, n)});
  });
  return {"unit", a, alpha, beta};
}

BaileyPair builtin_pair(std::string_view name, int D) {
  if (D % 4 != 0) throw LatticeError("built-in Bailey pairs need a lattice denominator divisible by 4");
  const auto u = [D](const Rational& e) { return q_units(e, D); };
  const Monomial q = qpow(D, D);
  const Monomial q2 = qpow(2 * D, D);
  const Monomial neg_half{Rational(-1), QExponent(u(Rational(1, 2)), D)};
  const Monomial neg_three_half{Rational(-1), QExponent(u(Rational(3, 2)), D)};

  auto one_or = [D](auto f) {
    return [D, f](std::int64_t n, std::int64_t o) {
      if (n == 0) return QSeries::one(QExponent(o, D));
      return QSeries::from_terms(D, o, f(n).terms());
    };
  };

  if (name == "G1") {
    auto alpha = make_seq(D, one_or([=](std::int64_t n) {
      // (-1)^n q^{n^2/2 + binom(n,2)/2} (1 + q^{n/2})
      const std::int64_t e = u(Rational(n * n, 2) + Rational(binom2(n), 2));
      const Rational s = n % 2 == 0 ? 1 : -1;
      return QSeries::from_terms(D, e + u(Rational(n, 2)), {{e, s}, {e + u(Rational(n, 2)), s}});
    }));
    auto beta = make_seq(D, [=](std::int64_t n, std::int64_t o) {
      return product_to(o, D, {poch_inv(q2, 2 * D, n), poch_inv(neg_half, D, n)});
    });
    return {"G1", unit_monomial(D), alpha, beta};
  }
  if (name == "G2") {
    auto alpha = make_seq(D, one_or([=](std::int64_t n) {
      // (-1)^n q^{3/2 binom(n+1,2)} (q^{-n/2} - q^{(n+1)/2}) / (1 - q^{1/2})
      return polynomial_alpha(n, u(Rational(3 * binom2(n + 1), 2)), u(Rational(n, 2)),
                              u(Rational(n + 1, 2)), u(Rational(1, 2)), D);
    }));
    auto beta = make_seq(D, [=](std::int64_t n, std::int64_t o) {
      return product_to(o, D, {poch_inv(q2, 2 * D, n), poch_inv(neg_three_half, D, n)});
    });
    return {"G2", q, alpha, beta};
  }
  if (name == "G3") {
    auto alpha = make_seq(D, one_or([=](std::int64_t n) {
      // (-1)^n q^{3/2 binom(n,2)} (1 + q^{3n/2})
      const std::int64_t e = u(Rational(3 * binom2(n), 2));
      const std::int64_t f = u(Rational(3 * n, 2));
      const Rational s = n % 2 == 0 ? 1 : -1;
      return QSeries::from_terms(D, e + f, {{e, s}, {e + f, s}});
    }));
    auto beta = make_seq(D, [=](std::int64_t n, std::int64_t o) {
      return scaled_product(qpow(n * D, D), o, D,
                            {poch_inv(q2, 2 * D, n), poch_inv(neg_half, D, n)});
    });
    return {"G3", unit_monomial(D), alpha, beta};
  }
  if (name == "G1star" || name == "G1*") {
    auto alpha = make_seq(D, one_or([=](std::int64_t n) {
      // (-1)^n q^{3/2 binom(n+1,2)} (q^{-n} - q^{n+1}) / (1 - q)
      return polynomial_alpha(n, u(Rational(3 * binom2(n + 1), 2)), n * D, (n + 1) * D, D, D);
    }));
    auto beta = make_seq(D, [=](std::int64_t n, std::int64_t o) {
      return product_to(o, D, {poch_inv(q2, 2 * D, n), poch_inv(neg_half, D, n)});
    });
    return {"G1star", q, alpha, beta};
  }
  throw std::invalid_argument("unknown Bailey pair '" + std::string(name) + "'");
}

BaileyPair apply_transform(const BaileyPair& p, const TransformStep& t) {
  const int D = p.denom();
  const Monomial a = p.a;
  const Monomial q = qpow(D, D);
  const auto alpha = p.alpha;
  const auto beta = p.beta;
  const std::string name = p.name + " |> " + t.str();
  using Kind = TransformStep::Kind;

  switch (t.kind) {
    case Kind::S1: {
      auto w = [=](std::int64_t n) { return a.pow(n) * qpow(n * n * D, D); };
      auto na = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        return scaled_product(w(n), o, D, {seq(alpha, n)});
      });
      auto nb = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        QSeries s(D, o);
        for (std::int64_t r = 0; r <= n; ++r) {
          s = add(s, scaled_product(w(r), o, D, {poch_inv(q, D, n - r), seq(beta, r)}));
        }
        return s;
      });
      return {name, a, na, nb};
    }
    case Kind::S3: {
      const Monomial nh{Rational(-1), QExponent(D / 2, D)};  // -q^{1/2}
      const Monomial nah = a * nh;                            // -a q^{1/2}
      if (D % 2 != 0) throw LatticeError("S3 needs q^(1/2) on the lattice");
      // a^n q^{n^2/2}
      auto w = [=](std::int64_t n) {
        return a.pow(n) * Monomial(Rational(1), QExponent::from_rational(Rational(n * n, 2), D));
      };
      auto na = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        return scaled_product(w(n), o, D, {poch(nh, D, n), poch_inv(nah, D, n), seq(alpha, n)});
      });
      auto nb = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        QSeries s(D, o);
        for (std::int64_t r = 0; r <= n; ++r) {
          s = add(s, scaled_product(w(r), o, D,
                                    {poch(nh, D, r), poch_inv(q, D, n - r), poch_inv(nah, D, n),
                                     seq(beta, r)}));
        }
        return s;
      });
      return {name, a, na, nb};
    }
    case Kind::S5: {
      if (a.coeff != 1 || a.exp.units() % 2 != 0) {
        throw std::invalid_argument("S5 needs a^(1/2) on the lattice; a = " + a.str());
      }
      const Monomial h = qpow(a.exp.units() / 2, D);  // a^{1/2}
      const Monomial nh{Rational(-1), h.exp};           // -a^{1/2}
      const Monomial nhq = nh * q;                      // -a^{1/2} q
      // a^{n/2} q^{(n^2-n)/2}
      auto w = [=](std::int64_t n) { return h.pow(n) * qpow(binom2(n) * D, D); };
      auto na = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        return scaled_product(w(n), o, D, {poch(nhq, D, n), poch_inv(nh, D, n), seq(alpha, n)});
      });
      auto nb = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        QSeries s(D, o);
        for (std::int64_t r = 0; r <= n; ++r) {
          s = add(s, scaled_product(w(r), o, D,
                                    {poch(nhq, D, r), poch_inv(q, D, n - r), poch_inv(nh, D, n),
                                     seq(beta, r)}));
        }
        return s;
      });
      return {name, a, na, nb};
    }
    case Kind::General: {
      if (t.params.size() != 2) throw std::invalid_argument("GENERAL takes two parameters");
      const Monomial r1 = t.params[0];
      const Monomial r2 = t.params[1];
      const Monomial aq = a * q;
      const Monomial mu = aq / (r1 * r2);
      const Monomial c1 = aq / r1;
      const Monomial c2 = aq / r2;
      auto na = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        return scaled_product(mu.pow(n), o, D,
                              {poch(r1, D, n), poch(r2, D, n), poch_inv(c1, D, n),
                               poch_inv(c2, D, n), seq(alpha, n)});
      });
      auto nb = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        QSeries s(D, o);
        for (std::int64_t r = 0; r <= n; ++r) {
          s = add(s, scaled_product(mu.pow(r), o, D,
                                    {poch(r1, D, r), poch(r2, D, r), poch(mu, D, n - r),
                                     poch_inv(c1, D, n), poch_inv(c2, D, n),
                                     poch_inv(q, D, n - r), seq(beta, r)}));
        }
        return s;
      });
      return {name, a, na, nb};
    }
    case Kind::DJK: {
      if (t.params.size() != 1) throw std::invalid_argument("DJK takes one parameter");
      const Monomial b = t.params[0];
      if (is_q_power(a, 0)) throw std::invalid_argument("DJK needs a != 1");
      if (is_q_power(b, 0)) throw std::invalid_argument("DJK needs b != 1");
      // (1-a)/(1-a q^{2k}), exactly 1 when k = 0
      auto ratio = [=](std::int64_t k) -> std::vector<Gen> {
        if (k == 0) return {};
        return {poch(a, D, 1), poch_inv(a * qpow(2 * k * D, D), D, 1)};
      };
      auto na = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        if (n == 0) return alpha->at(0, o);
        std::vector<Gen> first{poch(b * qpow(n * D, D), D, 1), poch_inv(b, D, 1), seq(alpha, n)};
        for (auto& g : ratio(n)) first.push_back(g);
        const Monomial aqn = a * qpow((n - 1) * D, D);
        Gen diff = [=](std::int64_t oo) {
          return sub(monomial_series(aqn, QExponent(oo, D)), monomial_series(b, QExponent(oo, D)));
        };
        std::vector<Gen> second{diff, poch_inv(b, D, 1), seq(alpha, n - 1)};
        for (auto& g : ratio(n - 1)) second.push_back(g);
        return sub(product_to(o, D, first), scaled_product(qpow((n - 1) * D, D), o, D, second));
      });
      auto nb = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        return product_to(o, D, {poch(b * q, D, n), poch_inv(b, D, n), seq(beta, n)});
      });
      return {name, a / q, na, nb};
    }
    case Kind::DJKLimit: {
      if (t.params.size() != 1) throw std::invalid_argument("DJKLIM takes one parameter u");
      const Monomial uu = t.params[0];
      if (!is_q_power(a, D)) throw std::invalid_argument("DJKLIM needs a pair relative to q");
      if (uu.coeff != 1 || uu.exp.units() <= 0) {
        throw std::invalid_argument("DJKLIM needs u = q^e with e > 0");
      }
      const std::int64_t ue = uu.exp.units();
      for (std::int64_t n = 1; n <= 5; ++n) {
        const QSeries want = polynomial_alpha(n, ue * binom2(n + 1), n * D, (n + 1) * D, D, D);
        const QSeries got = alpha->at(n, want.order_units());
        if (!(got == want)) {
          throw std::invalid_argument("alpha_" + std::to_string(n) +
                                      " does not have the shape DJKLIM(" + uu.str() + ") needs");
        }
      }
      auto na = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        if (n == 0) return QSeries::one(QExponent(o, D));
        const Rational s = n % 2 == 0 ? 1 : -1;
        const std::int64_t e = ue * binom2(n);
        return QSeries::from_terms(D, o, {{e, s}, {e + ue * n, s}});
      });
      auto nb = make_seq(D, [=](std::int64_t n, std::int64_t o) {
        return scaled_product(qpow(n * D, D), o, D, {seq(beta, n)});
      });
      return {name, a / q, na, nb};
    }
  }
  throw std::logic_error("unhandled transform");
}

BaileyPair chain(const BaileyPair& p0, const std::vector<TransformStep>& steps) {
  BaileyPair p = p0;
  for (const auto& s : steps) p = apply_transform(p, s);
  return p;
}

namespace {

Monomial parse_monomial(const std::string& text, int denom) {
  const auto terms = parse_qpoly(text);
  if (terms.size() != 1) throw ParseError("expected a single monomial, got '" + text + "'");
  return to_monomial(terms[0], denom);
}

/// Splits "NAME(args)^k" into its parts.
void split_call(const std::string& item, std::string& head, std::vector<std::string>& args,
                int& repeat) {
  std::string body = item;
  repeat = 1;
  // A trailing ^k outside parentheses repeats the step.
  const auto close = body.rfind(')');
  const auto caret = body.rfind('^');
  if (caret != std::string::npos && (close == std::string::npos || caret > close)) {
    repeat = std::stoi(trim(body.substr(caret + 1)));
    if (repeat < 0) throw ParseError("negative repeat count in '" + item + "'");
    body = trim(body.substr(0, caret));
  }
  const auto open = body.find('(');
  if (open == std::string::npos) {
    head = trim(body);
    return;
  }
  if (body.back() != ')') throw ParseError("unbalanced parentheses in '" + item + "'");
  head = trim(body.substr(0, open));
  const std::string inner = body.substr(open + 1, body.size() - open - 2);
  for (auto& a : split_top_level(inner, ',')) args.push_back(trim(a));
}

}  // namespace

ChainExpr parse_chain(std::string_view text, int denom) {
  ChainExpr out;
  std::vector<std::string> items;
  std::string s(text);
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find("|>", pos);
    items.push_back(trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 2;
  }
  if (items.empty() || items[0].empty()) throw ParseError("empty chain expression");

  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string head;
    std::vector<std::string> args;
    int repeat = 1;
    split_call(items[i], head, args, repeat);
    if (i == 0) {
      if (repeat != 1) throw ParseError("the seed pair cannot be repeated");
      out.seed = head;
      for (const auto& a : args) out.seed_params.push_back(parse_monomial(a, denom));
      continue;
    }
    TransformStep step{TransformStep::Kind::S1, {}};
    std::size_t want = 0;
    if (head == "S1") {
      step.kind = TransformStep::Kind::S1;
    } else if (head == "S3") {
      step.kind = TransformStep::Kind::S3;
    } else if (head == "S5") {
      step.kind = TransformStep::Kind::S5;
    } else if (head == "GENERAL") {
      step.kind = TransformStep::Kind::General;
      want = 2;
    } else if (head == "DJK") {
      step.kind = TransformStep::Kind::DJK;
      want = 1;
    } else if (head == "DJKLIM") {
      step.kind = TransformStep::Kind::DJKLimit;
      want = 1;
    } else {
      throw ParseError("unknown transform '" + head + "'");
    }
    if (args.size() != want) {
      throw ParseError(head + " takes " + std::to_string(want) + " parameter(s)");
    }
    for (const auto& a : args) step.params.push_back(parse_monomial(a, denom));
    for (int r = 0; r < repeat; ++r) out.steps.push_back(step);
  }
  return out;
}

BaileyPair build_chain(std::string_view text, int denom) {
  const ChainExpr e = parse_chain(text, denom);
  BaileyPair seed = [&] {
    if (e.seed == "unit") {
      if (e.seed_params.size() > 1) throw ParseError("unit takes at most one parameter");
      return unit_pair(e.seed_params.empty() ? unit_monomial(denom) : e.seed_params[0]);
    }
    if (!e.seed_params.empty()) throw ParseError(e.seed + " takes no parameters");
    return builtin_pair(e.seed, denom);
  }();
  return chain(seed, e.steps);
}

PairReport verify_pair(const BaileyPair& p, std::int64_t n_max, const QExponent& order) {
  const int D = p.denom();
  const std::int64_t U = order.units();
  require_unit_aq(p.a);
  const Monomial q = qpow(D, D);
  const Monomial aq = p.a * q;
  PairReport out;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    QSeries rhs(D, U);
    for (std::int64_t k = 0; k <= n; ++k) {
      rhs = add(rhs, product_to(U, D, {seq(p.alpha, k), poch_inv(q, D, n - k),
                                       poch_inv(aq, D, n + k)}));
    }
    EqualityReport r = equal_up_to(p.beta_at(n, order), rhs, order);
    if (!r.equal) out.ok = false;
    out.checks.push_back({n, r});
  }
  return out;
}

Sides general_bailey_check(const BaileyPair& p, const Monomial& rho1, const Monomial& rho2,
                           std::int64_t n, const QExponent& order) {
  const int D = p.denom();
  const std::int64_t U = order.units();
  const Monomial q = qpow(D, D);
  const Monomial aq = p.a * q;
  const Monomial mu = aq / (rho1 * rho2);
  const Monomial c1 = aq / rho1;
  const Monomial c2 = aq / rho2;
  require_unit_aq(p.a);

  // Both sides times (aq/rho1, aq/rho2; q)_n, which keeps specializations where that
  // product vanishes (e.g. a = 1, rho1 = q^2) meaningful.
  QSeries inner(D, U);
  for (std::int64_t j = 0; j <= n; ++j) {
    inner = add(inner, scaled_product(mu.pow(j), U, D,
                                      {poch(rho1, D, j), poch(rho2, D, j), poch(mu, D, n - j),
                                       poch_inv(q, D, n - j), seq(p.beta, j)}));
  }
  QSeries rhs(D, U);
  for (std::int64_t r = 0; r <= n; ++r) {
    rhs = add(rhs, scaled_product(mu.pow(r), U, D,
                                  {poch(rho1, D, r), poch(rho2, D, r), poch_inv(q, D, n - r),
                                   poch_inv(aq, D, n + r), poch(c1 * q.pow(r), D, n - r),
                                   poch(c2 * q.pow(r), D, n - r), seq(p.alpha, r)}));
  }
  EqualityReport rep = equal_up_to(inner, rhs, order);
  return {inner, rhs, rep};
}

Sides limit_identity(const BaileyPair& p, const QExponent& order) {
  const int D = p.denom();
  const std::int64_t U = order.units();
  require_unit_aq(p.a);
  const Monomial q = qpow(D, D);
  const double ord = std::max(0.0, static_cast<double>(U) / D);
  const std::int64_t n_cut = static_cast<std::int64_t>(std::ceil(std::sqrt(ord))) + 4;
  auto w = [&](std::int64_t n) { return p.a.pow(n) * qpow(n * n * D, D); };

  QSeries lhs(D, U);
  QSeries alpha_sum(D, U);
  for (std::int64_t n = 0; n <= n_cut; ++n) {
    lhs = add(lhs, scaled_product(w(n), U, D, {seq(p.beta, n)}));
  }
  for (std::int64_t n = n_cut + 1; n <= n_cut + 2; ++n) {
    if (!scaled_product(w(n), U, D, {seq(p.beta, n)}).is_zero() ||
        !scaled_product(w(n), U, D, {seq(p.alpha, n)}).is_zero()) {
      throw std::runtime_error("limit identity: term " + std::to_string(n) +
                               " still reaches the order; valuations do not grow fast enough");
    }
  }
  ProductExpr inv;
  inv.factors.push_back({p.a * q, q.exp, -1});
  const QSeries prod = eval_product(inv, QExponent(U, D));
  for (std::int64_t n = 0; n <= n_cut; ++n) {
    alpha_sum = add(alpha_sum, scaled_product(w(n), U, D, {seq(p.alpha, n)}));
  }
  const std::int64_t low = std::min<std::int64_t>(0, alpha_sum.valuation_units());
  const QSeries rhs =
      mul(alpha_sum, low < 0 ? eval_product(inv, QExponent(U - low, D)) : prod).truncated(U);
  EqualityReport rep = equal_up_to(lhs, rhs, order);
  return {lhs, rhs, rep};
}

Sides lemma23_check(std::int64_t k, const QExponent& order) {
  const int D = order.denom();
  if (D % 4 != 0) throw LatticeError("Lemma check needs q^(1/4) on the lattice");
  const std::int64_t U = order.units();
  const Monomial q = qpow(D, D);
  const Monomial q2 = qpow(2 * D, D);
  QSeries lhs(D, U);
  for (std::int64_t i = 0; i <= k; ++i) {
    // (1 - q^{2i+1}) / (1 - q) = 1 + q + ... + q^{2i}
    QSeries::Terms geo;
    for (std::int64_t j = 0; j <= 2 * i; ++j) geo[j * D] = 1;
    const Monomial m{i % 2 == 0 ? Rational(1) : Rational(-1),
                     QExponent::from_rational(Rational(3 * i * i - i, 4), D)};
    lhs = add(lhs, scaled_product(m, U, D,
                                  {constant_series(QSeries::from_terms(D, 2 * i * D, geo)),
                                   poch_inv(q2, D, k + i), poch_inv(q, D, k - i)}));
  }
  const Monomial nh{Rational(-1), QExponent(D / 2, D)};
  const QSeries rhs = product_to(U, D, {poch_inv(nh, D, k), poch_inv(q2, 2 * D, k)});
  EqualityReport rep = equal_up_to(lhs, rhs, order);
  return {lhs, rhs, rep};
}

}  // namespace nahm
