#include "nahm/nahm_sum.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nahm {

namespace {

std::int64_t floor_units(const Rational& x, int denom) {
  Rational y = x * denom;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  return f.get_si();
}

std::size_t index_of(const std::vector<std::string>& vars, const std::string& v) {
  auto it = std::find(vars.begin(), vars.end(), v);
  if (it == vars.end()) throw std::invalid_argument("unknown variable '" + v + "'");
  return static_cast<std::size_t>(it - vars.begin());
}

bool mentions(const MultiSumSpec& spec, const std::string& v) {
  for (const auto& x : spec.extras) {
    if (x.length.variables().count(v)) return true;
  }
  for (const auto& t : spec.prefactor) {
    if (t.exponent.variables().count(v)) return true;
  }
  return false;
}

std::string fresh_name(const std::vector<std::string>& vars) {
  for (int i = 0;; ++i) {
    std::string name = i == 0 ? "m" : "m" + std::to_string(i);
    if (std::find(vars.begin(), vars.end(), name) == vars.end()) return name;
  }
}

}  // namespace

Matrix NahmQuadruple::symmetrized() const {
  const std::size_t r = rank();
  if (A.size() != r || d.size() != r) throw std::invalid_argument("quadruple shape mismatch");
  Matrix out(r, std::vector<Rational>(r));
  for (std::size_t i = 0; i < r; ++i) {
    if (A[i].size() != r) throw std::invalid_argument("A must be square");
    for (std::size_t j = 0; j < r; ++j) out[i][j] = A[i][j] * Rational(d[j]);
  }
  return out;
}

bool check_symmetrizable(const Matrix& A, const std::vector<std::int64_t>& d) {
  if (A.size() != d.size()) throw std::invalid_argument("A and d have different sizes");
  for (const auto& row : A) {
    if (row.size() != A.size()) throw std::invalid_argument("A must be square");
  }
  for (auto x : d) {
    if (x <= 0) throw std::invalid_argument("d must be positive");
  }
  NahmQuadruple q{A, std::vector<Rational>(d.size()), Rational(0), d};
  const Matrix ad = q.symmetrized();
  for (std::size_t i = 0; i < ad.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (ad[i][j] != ad[j][i]) return false;
    }
  }
  return positive_definite(ad);
}

QSeries nahm_sum(const NahmQuadruple& quad, const QExponent& order, bool include_c) {
  if (!check_symmetrizable(quad.A, quad.d)) {
    throw std::domain_error("A diag(d) is not symmetric positive definite");
  }
  const int D = order.denom();
  const std::int64_t U = order.units();
  const std::size_t r = quad.rank();
  QuadraticForm f{quad.symmetrized(), quad.b, include_c ? quad.c : Rational(0)};
  QSeries total(D, U);
  const auto box = lattice_bound(f, order);
  if (std::any_of(box.begin(), box.end(), [](std::int64_t b) { return b < 0; })) return total;

  // Real minimum of E bounds how far below zero a summand can start.
  const Matrix S = inverse(f.M);
  Rational quad_min = f.c;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) quad_min -= f.l[i] * S[i][j] * f.l[j] / 2;
  }
  const std::int64_t work = U + std::max<std::int64_t>(0, -floor_units(quad_min, D));

  // 1/(q^d; q^d)_n for each distinct d, built up one factor at a time.
  std::map<std::int64_t, std::vector<QSeries>> tables;
  for (std::size_t i = 0; i < r; ++i) {
    auto& t = tables[quad.d[i]];
    const std::int64_t step = quad.d[i] * D;
    if (t.empty()) t.push_back(QSeries::one(QExponent(work, D)));
    while (static_cast<std::int64_t>(t.size()) <= box[i]) {
      const std::int64_t n = static_cast<std::int64_t>(t.size());
      t.push_back(divide_binomial(t.back(), Rational(-1), step * n));
    }
  }

  std::vector<std::int64_t> n(r, 0);
  while (true) {
    const Rational e = f.eval(n);
    Rational eu = e * D;
    eu.canonicalize();
    if (eu.get_den() != 1) throw LatticeError("Nahm exponent " + e.get_str() + " off the lattice");
    const std::int64_t s = eu.get_num().get_si();
    if (s <= U) {
      QSeries term = QSeries::one(QExponent(U - s, D));
      for (std::size_t i = 0; i < r; ++i) {
        if (n[i] > 0) term = mul_truncated(term, tables[quad.d[i]][n[i]], U - s);
      }
      total = add(total, term.shifted(s).truncated(U));
    }
    std::size_t i = 0;
    while (i < r && n[i] == box[i]) n[i++] = 0;
    if (i == r) break;
    ++n[i];
  }
  return total;
}

MultiSumSpec to_multisum(const NahmQuadruple& quad, const std::vector<std::string>& vars,
                         std::int64_t base, int denom) {
  const std::size_t r = quad.rank();
  if (vars.size() != r) throw std::invalid_argument("one variable name per row of A");
  if (!check_symmetrizable(quad.A, quad.d)) {
    throw std::domain_error("A diag(d) is not symmetric positive definite");
  }
  const Matrix ad = quad.symmetrized();
  MultiSumSpec spec;
  spec.vars = vars;
  spec.denom = denom;
  Poly e;
  for (std::size_t i = 0; i < r; ++i) {
    const Poly xi = Poly::var(vars[i]);
    e = e + Poly(quad.b[i]) * xi;
    e = e + Poly(ad[i][i] / 2) * xi * xi;
    for (std::size_t j = i + 1; j < r; ++j) e = e + Poly(ad[i][j]) * xi * Poly::var(vars[j]);
    spec.denom_bases.push_back(QExponent::whole(quad.d[i] * base, denom));
  }
  spec.exponent = Poly(Rational(base)) * e;
  return spec;
}

std::optional<ReducedForm> reduce_euler(const MultiSumSpec& spec, const std::string& v) {
  if (spec.vars.size() < 2) return std::nullopt;
  const std::size_t iv = index_of(spec.vars, v);
  const QExponent beta = spec.denom_bases[iv];
  if (beta.units() <= 0 || mentions(spec, v)) return std::nullopt;
  const QuadraticForm f = quadratic_form(spec.exponent, spec.vars);
  const Rational b = beta.value();
  if (f.M[iv][iv] != b) return std::nullopt;

  Poly length;
  for (std::size_t j = 0; j < spec.vars.size(); ++j) {
    if (j == iv) continue;
    const Rational ratio = f.M[iv][j] / b;
    if (ratio < 0 || ratio.get_den() != 1) return std::nullopt;
    length = length + Poly(ratio) * Poly::var(spec.vars[j]);
  }
  const Rational z = b / 2 + f.l[iv];
  if (z < 0) return std::nullopt;
  const Rational zu = z * spec.denom;
  if (zu.get_den() != 1) return std::nullopt;
  const Monomial arg(Rational(-1), QExponent::from_rational(z, spec.denom));

  ReducedForm out;
  out.route = "euler " + v;
  out.outer.factors.push_back({arg, beta, 1});
  MultiSumSpec& s = out.spec;
  s.denom = spec.denom;
  for (std::size_t j = 0; j < spec.vars.size(); ++j) {
    if (j == iv) continue;
    s.vars.push_back(spec.vars[j]);
    s.denom_bases.push_back(spec.denom_bases[j]);
  }
  s.exponent = spec.exponent.substitute({{v, Poly(0)}});
  s.extras = spec.extras;
  s.prefactor = spec.prefactor;
  if (!length.is_zero()) s.extras.push_back({arg, beta, length, true});
  return out;
}

std::optional<ReducedForm> reduce_lemma21(const MultiSumSpec& spec, const std::string& j,
                                          const std::string& k) {
  if (spec.vars.size() < 2 || j == k) return std::nullopt;
  const std::size_t ij = index_of(spec.vars, j);
  const std::size_t ik = index_of(spec.vars, k);
  const QExponent bj = spec.denom_bases[ij];
  const QExponent bk = spec.denom_bases[ik];
  if (bj.units() <= 0 || bk.units() != 2 * bj.units()) return std::nullopt;

  const std::string m = fresh_name(spec.vars);
  const Poly xj = Poly::var(j);
  const Definitions sub{{j, Poly::var(m) - Poly(2) * Poly::var(k)}};
  // E - b binom(n_j, 2), rewritten with n_j = m - 2 n_k, must not see n_k.
  const Poly rest = spec.exponent - Poly(bj.value() / 2) * (xj * xj - xj);
  const Poly g = rest.substitute(sub);
  if (g.variables().count(k)) return std::nullopt;

  ReducedForm out;
  out.route = "lemma21 " + j + " " + k;
  MultiSumSpec& s = out.spec;
  s.denom = spec.denom;
  s.exponent = g;
  for (std::size_t i = 0; i < spec.vars.size(); ++i) {
    if (i == ik) continue;
    s.vars.push_back(i == ij ? m : spec.vars[i]);
    s.denom_bases.push_back(spec.denom_bases[i]);
  }
  for (auto x : spec.extras) {
    x.length = x.length.substitute(sub);
    if (x.length.variables().count(k)) return std::nullopt;
    s.extras.push_back(std::move(x));
  }
  for (auto t : spec.prefactor) {
    t.exponent = t.exponent.substitute(sub);
    if (t.exponent.variables().count(k)) return std::nullopt;
    s.prefactor.push_back(std::move(t));
  }
  try {
    validate(s);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
  return out;
}

std::optional<ReducedForm> reduce_rank(const MultiSumSpec& spec) {
  for (const auto& v : spec.vars) {
    if (auto r = reduce_euler(spec, v)) return r;
  }
  for (const auto& j : spec.vars) {
    for (const auto& k : spec.vars) {
      if (auto r = reduce_lemma21(spec, j, k)) return r;
    }
  }
  return std::nullopt;
}

std::optional<ReducedForm> reduce_rank(const NahmQuadruple& quad) {
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < quad.rank(); ++i) vars.push_back("n" + std::to_string(i + 1));
  return reduce_rank(to_multisum(quad, vars));
}

QSeries eval_reduced(const ReducedForm& form, const QExponent& order) {
  const QSeries inner = multi_sum(form.spec, order);
  const std::int64_t low = std::min<std::int64_t>(0, inner.valuation_units());
  const QSeries outer =
      eval_product(form.outer, QExponent(order.units() - low, order.denom()));
  return mul(outer, inner).truncated(order.units());
}

}  // namespace nahm
