#include "nahm/series.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace nahm {

namespace {

void require_same_denom(int a, int b) {
  if (a != b) {
    throw LatticeError("exponent denominators differ: " + std::to_string(a) + " vs " +
                       std::to_string(b));
  }
}

}  // namespace

QExponent::QExponent(std::int64_t units, int denom) : units_(units), denom_(denom) {
  if (denom <= 0) throw LatticeError("exponent denominator must be positive");
}

QExponent QExponent::from_rational(const Rational& value, int denom) {
  Rational scaled = value * denom;
  scaled.canonicalize();
  if (scaled.get_den() != 1) {
    throw LatticeError("exponent " + value.get_str() + " is not on the 1/" +
                       std::to_string(denom) + " lattice");
  }
  if (!scaled.get_num().fits_slong_p()) throw LatticeError("exponent out of range");
  return {scaled.get_num().get_si(), denom};
}

std::string QExponent::str() const {
  return std::to_string(units_) + "/" + std::to_string(denom_);
}

void QExponent::check_same(const QExponent& other) const {
  require_same_denom(denom_, other.denom_);
}

std::strong_ordering QExponent::operator<=>(const QExponent& other) const {
  check_same(other);
  return units_ <=> other.units_;
}

bool QExponent::operator==(const QExponent& other) const {
  check_same(other);
  return units_ == other.units_;
}

QExponent QExponent::operator+(const QExponent& other) const {
  check_same(other);
  return {units_ + other.units_, denom_};
}

QExponent QExponent::operator-(const QExponent& other) const {
  check_same(other);
  return {units_ - other.units_, denom_};
}

Monomial::Monomial(Rational c, QExponent e) : coeff(std::move(c)), exp(e) {
  coeff.canonicalize();
  if (coeff == 0) throw std::invalid_argument("zero monomial");
}

Monomial Monomial::operator*(const Monomial& other) const {
  return {coeff * other.coeff, exp + other.exp};
}

Monomial Monomial::operator/(const Monomial& other) const {
  return {coeff / other.coeff, exp - other.exp};
}

Monomial Monomial::pow(std::int64_t n) const {
  Rational c(1);
  Rational base = n >= 0 ? coeff : Rational(1) / coeff;
  for (std::int64_t i = 0; i < (n >= 0 ? n : -n); ++i) c *= base;
  return {c, exp * n};
}

std::string Monomial::str() const {
  Rational e = exp.value();
  if (e == 0) return coeff.get_str();
  std::string out;
  if (coeff == -1) {
    out = "-";
  } else if (coeff != 1) {
    out = coeff.get_str() + "*";
  }
  out += "q";
  if (e.get_den() == 1 && e > 0) {
    if (e != 1) out += "^" + e.get_str();
  } else {
    out += "^(" + e.get_str() + ")";
  }
  return out;
}

QSeries::QSeries(int denom, std::int64_t order_units) : denom_(denom), order_(order_units) {
  if (denom <= 0) throw LatticeError("exponent denominator must be positive");
}

QSeries QSeries::from_terms(int denom, std::int64_t order_units, Terms terms) {
  QSeries s(denom, order_units);
  for (auto it = terms.begin(); it != terms.end();) {
    it->second.canonicalize();  // mpq_class(num, den) does not reduce
    if (it->first > order_units || it->second == 0) {
      it = terms.erase(it);
    } else {
      ++it;
    }
  }
  s.terms_ = std::move(terms);
  return s;
}

QSeries QSeries::one(const QExponent& order) { return constant(Rational(1), order); }

QSeries QSeries::constant(const Rational& c, const QExponent& order) {
  QSeries s(order.denom(), order.units());
  Rational v = c;
  v.canonicalize();
  s.accumulate(0, v);
  return s;
}

std::int64_t QSeries::valuation_units() const noexcept {
  return terms_.empty() ? order_ + 1 : terms_.begin()->first;
}

Rational QSeries::coefficient_units(std::int64_t units) const {
  if (units > order_) {
    throw TruncationError("coefficient at " + std::to_string(units) + "/" +
                          std::to_string(denom_) + " beyond order " + std::to_string(order_) +
                          "/" + std::to_string(denom_));
  }
  auto it = terms_.find(units);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational QSeries::coefficient(const QExponent& e) const {
  require_same_denom(denom_, e.denom());
  return coefficient_units(e.units());
}

QSeries QSeries::truncated(std::int64_t order_units) const {
  QSeries s(denom_, std::min(order_, order_units));
  s.terms_.insert(terms_.begin(), terms_.upper_bound(s.order_));
  return s;
}

QSeries QSeries::shifted(std::int64_t units) const {
  QSeries s(denom_, order_ + units);
  for (const auto& [e, c] : terms_) s.terms_.emplace_hint(s.terms_.end(), e + units, c);
  return s;
}

QSeries QSeries::scaled(const Rational& factor) const {
  QSeries s(denom_, order_);
  Rational c = factor;
  c.canonicalize();
  if (c == 0) return s;
  for (const auto& [e, v] : terms_) s.terms_.emplace_hint(s.terms_.end(), e, v * c);
  return s;
}

QSeries QSeries::operator-() const { return scaled(Rational(-1)); }

bool QSeries::all_integer() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.get_den() == 1; });
}

void QSeries::accumulate(std::int64_t units, const Rational& c) {
  if (units > order_ || c == 0) return;
  auto [it, inserted] = terms_.try_emplace(units, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

QSeries monomial_series(const Monomial& m, const QExponent& order) {
  require_same_denom(m.exp.denom(), order.denom());
  QSeries s(order.denom(), order.units());
  s.accumulate(m.exp.units(), m.coeff);
  return s;
}

QSeries add(const QSeries& a, const QSeries& b) {
  require_same_denom(a.denom(), b.denom());
  QSeries out = a.truncated(b.order_units());
  for (const auto& [e, c] : b.terms()) {
    if (e > out.order_units()) break;
    out.accumulate(e, c);
  }
  return out;
}

QSeries sub(const QSeries& a, const QSeries& b) { return add(a, -b); }

QSeries mul_truncated(const QSeries& a, const QSeries& b, std::int64_t cap_units) {
  require_same_denom(a.denom(), b.denom());
  const int denom = a.denom();
  if (a.is_zero() || b.is_zero()) {
    // The product of a zero series with anything is zero up to the tighter bound.
    std::int64_t order = std::min(a.order_units() + b.valuation_units(),
                                  b.order_units() + a.valuation_units());
    return QSeries(denom, std::min(order, cap_units));
  }
  const std::int64_t va = a.valuation_units();
  const std::int64_t vb = b.valuation_units();
  const std::int64_t order =
      std::min({a.order_units() + vb, b.order_units() + va, cap_units});
  QSeries out(denom, order);
  const std::int64_t lo = va + vb;
  if (lo > order) return out;

  std::int64_t step = 0;
  for (const auto& t : a.terms()) step = std::gcd(step, t.first - va);
  for (const auto& t : b.terms()) step = std::gcd(step, t.first - vb);
  if (step == 0) step = 1;

  std::vector<Rational> acc(static_cast<std::size_t>((order - lo) / step + 1));
  std::vector<bool> touched(acc.size(), false);
  mpq_class prod;
  for (const auto& [ea, ca] : a.terms()) {
    if (ea + vb > order) break;
    for (const auto& [eb, cb] : b.terms()) {
      const std::int64_t e = ea + eb;
      if (e > order) break;
      const auto idx = static_cast<std::size_t>((e - lo) / step);
      mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
      acc[idx] += prod;
      touched[idx] = true;
    }
  }
  QSeries::Terms terms;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (touched[i] && acc[i] != 0) {
      terms.emplace_hint(terms.end(), lo + static_cast<std::int64_t>(i) * step,
                         std::move(acc[i]));
    }
  }
  return QSeries::from_terms(denom, order, std::move(terms));
}

QSeries mul(const QSeries& a, const QSeries& b) {
  return mul_truncated(a, b, std::numeric_limits<std::int64_t>::max());
}

QSeries invert_unit(const QSeries& a, const QExponent& order) {
  require_same_denom(a.denom(), order.denom());
  if (a.is_zero()) throw std::domain_error("cannot invert the zero series");
  const int denom = a.denom();
  const std::int64_t e = a.valuation_units();
  const Rational c = a.terms().begin()->second;
  // a = c q^e (1 + u); u known through a.order - e, so 1/a is known through a.order - 2e.
  const std::int64_t target = std::min(order.units(), a.order_units() - 2 * e);
  QSeries out(denom, target);
  const std::int64_t span = target + e;  // exponents of 1/(1+u) needed: 0..span
  if (span < 0) return out;

  std::vector<std::pair<std::int64_t, Rational>> u;
  for (auto it = std::next(a.terms().begin()); it != a.terms().end(); ++it) {
    if (it->first - e > span) break;
    u.emplace_back(it->first - e, it->second / c);
  }
  std::int64_t step = 0;
  for (const auto& t : u) step = std::gcd(step, t.first);
  if (step == 0) step = span + 1;

  const std::size_t n = static_cast<std::size_t>(span / step) + 1;
  std::vector<Rational> inv(n);
  inv[0] = 1;
  mpq_class prod;
  for (std::size_t k = 1; k < n; ++k) {
    Rational s;
    const std::int64_t ek = static_cast<std::int64_t>(k) * step;
    for (const auto& [eu, cu] : u) {
      if (eu > ek) break;
      const auto& prev = inv[static_cast<std::size_t>((ek - eu) / step)];
      if (prev == 0) continue;
      mpq_mul(prod.get_mpq_t(), cu.get_mpq_t(), prev.get_mpq_t());
      s -= prod;
    }
    inv[k] = std::move(s);
  }
  const Rational cinv = Rational(1) / c;
  QSeries::Terms terms;
  for (std::size_t k = 0; k < n; ++k) {
    if (inv[k] != 0) {
      terms.emplace_hint(terms.end(), static_cast<std::int64_t>(k) * step - e, inv[k] * cinv);
    }
  }
  return QSeries::from_terms(denom, target, std::move(terms));
}

QSeries times_binomial(const QSeries& a, const Rational& factor, std::int64_t shift) {
  Rational c = factor;
  c.canonicalize();
  if (shift < 0) throw std::domain_error("times_binomial needs a nonnegative shift");
  QSeries out = a;
  if (c == 0) return out;
  if (shift == 0) return a.scaled(Rational(1) + c);
  mpq_class prod;
  for (auto it = a.terms().begin(); it != a.terms().end(); ++it) {
    const std::int64_t e = it->first + shift;
    if (e > a.order_units()) break;
    mpq_mul(prod.get_mpq_t(), it->second.get_mpq_t(), c.get_mpq_t());
    out.accumulate(e, prod);
  }
  return out;
}

QSeries divide_binomial(const QSeries& a, const Rational& factor, std::int64_t shift) {
  Rational c = factor;
  c.canonicalize();
  if (shift <= 0) throw std::domain_error("divide_binomial needs a positive shift");
  // b = a / (1 + c q^s) satisfies b_e = a_e - c b_{e-s}.
  const std::int64_t order = a.order_units();
  if (a.is_zero() || c == 0) return a;
  const std::int64_t lo = a.valuation_units();
  std::vector<Rational> dense(static_cast<std::size_t>(order - lo + 1));
  for (const auto& [e, v] : a.terms()) dense[static_cast<std::size_t>(e - lo)] = v;
  const Rational neg = -c;
  mpq_class prod;
  for (std::size_t i = static_cast<std::size_t>(shift); i < dense.size(); ++i) {
    const auto& prev = dense[i - static_cast<std::size_t>(shift)];
    if (prev == 0) continue;
    mpq_mul(prod.get_mpq_t(), prev.get_mpq_t(), neg.get_mpq_t());
    dense[i] += prod;
  }
  QSeries::Terms terms;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0) {
      terms.emplace_hint(terms.end(), lo + static_cast<std::int64_t>(i), std::move(dense[i]));
    }
  }
  return QSeries::from_terms(a.denom(), order, std::move(terms));
}

QSeries substitute_power(const QSeries& a, const Rational& k) {
  if (k <= 0) throw std::domain_error("substitution power must be positive");
  const int denom = a.denom();
  auto map_exp = [&](std::int64_t units) {
    Rational v = Rational(units) * k;
    v.canonicalize();
    if (v.get_den() != 1) {
      throw LatticeError("substitution q -> q^" + k.get_str() + " leaves the lattice");
    }
    return v.get_num().get_si();
  };
  Rational ord = Rational(a.order_units()) * k;
  ord.canonicalize();
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), ord.get_num_mpz_t(), ord.get_den_mpz_t());
  QSeries::Terms terms;
  for (const auto& [e, c] : a.terms()) terms.emplace_hint(terms.end(), map_exp(e), c);
  return QSeries::from_terms(denom, fl.get_si(), std::move(terms));
}

EqualityReport equal_up_to(const QSeries& a, const QSeries& b, const QExponent& order) {
  require_same_denom(a.denom(), b.denom());
  require_same_denom(a.denom(), order.denom());
  if (order.units() > a.order_units() || order.units() > b.order_units()) {
    throw TruncationError("comparison order " + order.str() + " exceeds operand validity (" +
                          a.order().str() + ", " + b.order().str() + ")");
  }
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  const std::int64_t limit = order.units();
  while (true) {
    const bool ea = ia == a.terms().end() || ia->first > limit;
    const bool eb = ib == b.terms().end() || ib->first > limit;
    if (ea && eb) return {};
    std::int64_t e;
    Rational ca, cb;
    if (eb || (!ea && ia->first < ib->first)) {
      e = ia->first;
      ca = ia->second;
      ++ia;
    } else if (ea || ib->first < ia->first) {
      e = ib->first;
      cb = ib->second;
      ++ib;
    } else {
      e = ia->first;
      ca = ia->second;
      cb = ib->second;
      ++ia;
      ++ib;
    }
    if (ca != cb) {
      return {false, Mismatch{QExponent(e, a.denom()), ca, cb}};
    }
  }
}

Rational coefficient(const QSeries& a, const QExponent& e) { return a.coefficient(e); }

std::string dump(const QSeries& s) {
  std::string out = "order " + s.order().str() + "\n";
  for (const auto& [e, c] : s.terms()) {
    out += std::to_string(e);
    out += '/';
    out += std::to_string(s.denom());
    out += ' ';
    out += c.get_str();
    out += '\n';
  }
  return out;
}

namespace {

std::pair<std::int64_t, int> parse_exponent(std::string_view tok) {
  auto slash = tok.find('/');
  if (slash == std::string_view::npos) throw std::invalid_argument("bad exponent in dump");
  std::int64_t num = 0;
  int den = 0;
  auto r1 = std::from_chars(tok.data(), tok.data() + slash, num);
  auto r2 = std::from_chars(tok.data() + slash + 1, tok.data() + tok.size(), den);
  if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != tok.data() + slash ||
      r2.ptr != tok.data() + tok.size() || den <= 0) {
    throw std::invalid_argument("bad exponent in dump: " + std::string(tok));
  }
  return {num, den};
}

}  // namespace

QSeries parse_dump(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dump");
  std::istringstream head(line);
  std::string word, tok;
  head >> word >> tok;
  if (word != "order" || tok.empty()) throw std::invalid_argument("dump header missing");
  auto [ord, denom] = parse_exponent(tok);
  QSeries s(denom, ord);
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string etok, ctok;
    row >> etok >> ctok;
    auto [e, d] = parse_exponent(etok);
    if (d != denom) throw LatticeError("mixed denominators in dump");
    if (e <= prev) throw std::invalid_argument("dump exponents not ascending");
    prev = e;
    Rational c;
    if (c.set_str(ctok, 10) != 0) throw std::invalid_argument("bad coefficient: " + ctok);
    c.canonicalize();
    if (c == 0 || e > ord) throw std::invalid_argument("dump term violates invariants");
    s.accumulate(e, c);
  }
  return s;
}

std::string digest(const QSeries& s) {
  // FNV-1a over the dump text.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump(s)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nahm
