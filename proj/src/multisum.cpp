#include "nahm/multisum.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "nahm/products.hpp"

namespace nahm {

namespace {

using Matrix = std::vector<std::vector<Rational>>;

std::int64_t floor_q(const Rational& x) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f.get_si();
}

// Largest integer t with t <= x + sqrt(y), y >= 0.
std::int64_t floor_x_plus_sqrt(const Rational& x, const Rational& y) {
  mpz_class fy;
  mpz_fdiv_q(fy.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), fy.get_mpz_t());
  std::int64_t t = floor_q(x) + s.get_si() + 1;
  auto ok = [&](std::int64_t c) {
    Rational d = Rational(c) - x;
    return d <= 0 || d * d <= y;
  };
  while (!ok(t)) --t;
  return t;
}

// min over integers y >= 0 of m/2 y^2 + g y, for m > 0.
Rational min_quadratic_nonneg(const Rational& m, const Rational& g) {
  if (g >= 0) return Rational(0);
  const Rational ystar = -g / m;
  const std::int64_t lo = floor_q(ystar);
  Rational best(0);
  for (std::int64_t y : {lo, lo + 1}) {
    if (y < 0) continue;
    Rational v = m * y * y / 2 + g * y;
    if (v < best) best = v;
  }
  return best;
}

// Per-variable box for a form with nonnegative entries: every other variable
// contributes at least its own one-variable minimum.
std::vector<std::int64_t> orthant_box(const QuadraticForm& form, const Rational& ord) {
  const std::size_t r = form.rank();
  std::vector<std::int64_t> box(r, -1);
  std::vector<Rational> mins(r);
  Rational min_total;
  for (std::size_t j = 0; j < r; ++j) {
    mins[j] = min_quadratic_nonneg(form.M[j][j], form.l[j]);
    min_total += mins[j];
  }
  for (std::size_t i = 0; i < r; ++i) {
    const Rational m = form.M[i][i];
    const Rational budget = ord - form.c - (min_total - mins[i]);
    const Rational disc = form.l[i] * form.l[i] / (m * m) + 2 * budget / m;
    if (disc < 0) return std::vector<std::int64_t>(r, -1);
    box[i] = floor_x_plus_sqrt(-form.l[i] / m, disc);
    if (box[i] < 0) return std::vector<std::int64_t>(r, -1);
  }
  return box;
}

Rational det(Matrix a) {
  const std::size_t n = a.size();
  Rational d(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

struct NodeForm {
  // Variables in enumeration order.
  Matrix M;
  std::vector<Rational> l;
  Rational c;
};

}  // namespace

std::string ExtraFactor::str() const {
  return std::string(in_denominator ? "1/" : "") + "pochf(" + arg.str() + "; " +
         Monomial(1, base).str() + "; " + length.str() + ")";
}

Rational QuadraticForm::eval(const std::vector<std::int64_t>& n) const {
  Rational e = c;
  for (std::size_t i = 0; i < n.size(); ++i) {
    e += l[i] * n[i];
    e += M[i][i] * n[i] * n[i] / 2;
    for (std::size_t j = i + 1; j < n.size(); ++j) e += M[i][j] * n[i] * n[j];
  }
  return e;
}

QuadraticForm quadratic_form(const Poly& exponent, const std::vector<std::string>& vars) {
  if (exponent.degree() > 2) throw std::domain_error("exponent has degree above 2");
  for (const auto& v : exponent.variables()) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
      throw std::domain_error("exponent uses unknown variable '" + v + "'");
    }
  }
  const std::size_t r = vars.size();
  QuadraticForm f;
  f.M.assign(r, std::vector<Rational>(r));
  f.l.assign(r, Rational(0));
  f.c = exponent.constant_term();
  for (std::size_t i = 0; i < r; ++i) {
    f.l[i] = exponent.linear_coeff(vars[i]);
    f.M[i][i] = 2 * exponent.quadratic_coeff(vars[i], vars[i]);
    for (std::size_t j = i + 1; j < r; ++j) {
      f.M[i][j] = f.M[j][i] = exponent.quadratic_coeff(vars[i], vars[j]);
    }
  }
  return f;
}

std::pair<std::vector<Rational>, Rational> affine_form(const Poly& p,
                                                       const std::vector<std::string>& vars) {
  if (p.degree() > 1) throw std::domain_error("expected an affine expression: " + p.str());
  for (const auto& v : p.variables()) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
      throw std::domain_error("unknown variable '" + v + "' in " + p.str());
    }
  }
  std::vector<Rational> a(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) a[i] = p.linear_coeff(vars[i]);
  return {a, p.constant_term()};
}

bool positive_definite(const Matrix& M) {
  for (std::size_t k = 1; k <= M.size(); ++k) {
    Matrix sub(k, std::vector<Rational>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = M[i][j];
    }
    if (det(sub) <= 0) return false;
  }
  return true;
}

Matrix inverse(const Matrix& M) {
  const std::size_t n = M.size();
  Matrix a = M;
  Matrix inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const Rational piv = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= piv;
      inv[c][k] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

void validate(const MultiSumSpec& spec) {
  if (spec.vars.empty()) throw std::domain_error("multi-sum without variables");
  if (spec.denom_bases.size() != spec.vars.size()) {
    throw std::domain_error("one denominator base per variable is required");
  }
  for (const auto& b : spec.denom_bases) {
    if (b.denom() != spec.denom) throw LatticeError("denominator base on a different lattice");
    if (b.units() < 0) throw std::domain_error("negative denominator base");
  }
  const QuadraticForm f = quadratic_form(spec.exponent, spec.vars);
  if (!positive_definite(f.M) && !orthant_bounded(f.M)) {
    throw std::domain_error("exponent form is not positive definite; the sum is unbounded");
  }
  for (const auto& t : spec.prefactor) affine_form(t.exponent, spec.vars);
  for (const auto& x : spec.extras) {
    affine_form(x.length, spec.vars);
    if (x.arg.exp.units() < 0) throw std::domain_error("extra factor with negative exponent");
    if (x.base.units() <= 0) throw std::domain_error("extra factor base must be positive");
  }
}

bool orthant_bounded(const Matrix& M) {
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (M[i][i] <= 0) return false;
    for (std::size_t j = 0; j < M.size(); ++j) {
      if (M[i][j] < 0) return false;
    }
  }
  return true;
}

std::vector<std::int64_t> lattice_bound(const QuadraticForm& form, const QExponent& order) {
  const std::size_t r = form.rank();
  const Rational ord = order.value();
  std::vector<std::int64_t> box(r, -1);
  if (!positive_definite(form.M)) return orthant_box(form, ord);
  // Ellipsoid bound: the region E <= order is an ellipsoid around -M^{-1} l.
  const Matrix S = inverse(form.M);
  std::vector<Rational> w(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) w[i] += S[i][j] * form.l[j];
  }
  Rational lw;
  for (std::size_t i = 0; i < r; ++i) lw += form.l[i] * w[i];
  const Rational radius = ord - form.c + lw / 2;
  if (radius < 0) return box;

  bool nonneg = true;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (i != j && form.M[i][j] < 0) nonneg = false;
    }
  }
  std::vector<Rational> mins(r);
  Rational min_total;
  if (nonneg) {
    for (std::size_t j = 0; j < r; ++j) {
      mins[j] = min_quadratic_nonneg(form.M[j][j], form.l[j]);
      min_total += mins[j];
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    std::int64_t t = floor_x_plus_sqrt(-w[i], 2 * radius * S[i][i]);
    if (nonneg) {
      // m/2 t^2 + l t <= order - c - (other minima), t >= 0.
      const Rational m = form.M[i][i];
      const Rational budget = ord - form.c - (min_total - mins[i]);
      // t <= -l/m + sqrt(l^2/m^2 + 2 budget/m)
      const Rational disc = form.l[i] * form.l[i] / (m * m) + 2 * budget / m;
      if (disc < 0) {
        t = -1;
      } else {
        t = std::min(t, floor_x_plus_sqrt(-form.l[i] / m, disc));
      }
    }
    box[i] = std::max<std::int64_t>(t, -1);
  }
  // A negative entry anywhere means no admissible point at all.
  if (std::any_of(box.begin(), box.end(), [](std::int64_t v) { return v < 0; })) {
    std::fill(box.begin(), box.end(), -1);
  }
  return box;
}

std::vector<std::int64_t> lattice_bound(const MultiSumSpec& spec, const QExponent& order) {
  validate(spec);
  const QuadraticForm base = quadratic_form(spec.exponent, spec.vars);
  if (spec.prefactor.empty()) return lattice_bound(base, order);
  std::vector<std::int64_t> box(spec.vars.size(), -1);
  for (const auto& t : spec.prefactor) {
    QuadraticForm f = base;
    auto [a, c] = affine_form(t.exponent, spec.vars);
    for (std::size_t i = 0; i < a.size(); ++i) f.l[i] += a[i];
    f.c += c;
    const auto b = lattice_bound(f, order);
    for (std::size_t i = 0; i < box.size(); ++i) box[i] = std::max(box[i], b[i]);
  }
  return box;
}

namespace {

using Dense = std::vector<mpq_class>;

Dense to_dense(const QSeries& s, std::int64_t cap) {
  if (s.valuation_units() < 0) throw std::domain_error("factor has negative valuation");
  Dense d(static_cast<std::size_t>(cap + 1));
  for (const auto& [e, c] : s.terms()) {
    if (e > cap) break;
    d[static_cast<std::size_t>(e)] = c;
  }
  return d;
}

// out = a * b truncated to out.size().
void dense_mul(const Dense& a, const Dense& b, Dense& out, std::size_t len) {
  out.assign(len, mpq_class());
  mpq_class prod;
  for (std::size_t i = 0; i < len && i < a.size(); ++i) {
    if (mpq_sgn(a[i].get_mpq_t()) == 0) continue;
    for (std::size_t j = 0; i + j < len && j < b.size(); ++j) {
      if (mpq_sgn(b[j].get_mpq_t()) == 0) continue;
      mpq_mul(prod.get_mpq_t(), a[i].get_mpq_t(), b[j].get_mpq_t());
      out[i + j] += prod;
    }
  }
}

class Evaluator {
 public:
  Evaluator(const MultiSumSpec& spec, const QExponent& order) : spec_(spec), order_(order) {
    validate(spec);
    if (order.denom() != spec.denom) throw LatticeError("order on a different lattice");
    r_ = spec.vars.size();
    D_ = spec.denom;
    U_ = order.units();
    box_ = lattice_bound(spec, order);

    // Variables that control extra-factor lengths go first, so those factors
    // are multiplied in once per outer value rather than at every leaf.
    std::vector<int> weight(r_, 0);
    for (const auto& x : spec.extras) {
      auto [a, c] = affine_form(x.length, spec.vars);
      for (std::size_t i = 0; i < r_; ++i) {
        if (a[i] != 0) weight[i] = 1;
      }
    }
    perm_.resize(r_);
    std::iota(perm_.begin(), perm_.end(), 0);
    std::stable_sort(perm_.begin(), perm_.end(),
                     [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });

    const QuadraticForm f = quadratic_form(spec.exponent, spec.vars);
    form_.M.assign(r_, std::vector<Rational>(r_));
    form_.l.resize(r_);
    form_.c = f.c;
    for (std::size_t i = 0; i < r_; ++i) {
      form_.l[i] = f.l[perm_[i]];
      for (std::size_t j = 0; j < r_; ++j) form_.M[i][j] = f.M[perm_[i]][perm_[j]];
    }
    if (spec.prefactor.empty()) {
      shifts_.push_back({std::vector<Rational>(r_), Rational(0), Rational(1)});
    } else {
      for (const auto& t : spec.prefactor) {
        auto [a, c] = affine_form(t.exponent, spec.vars);
        std::vector<Rational> pa(r_);
        for (std::size_t i = 0; i < r_; ++i) pa[i] = a[perm_[i]];
        shifts_.push_back({pa, c, t.coeff});
      }
    }
    // Per depth: inverse of the block of still-free variables.
    free_inv_.resize(r_ + 1);
    free_nonneg_.assign(r_ + 1, true);
    free_pd_.assign(r_ + 1, true);
    for (std::size_t d = 0; d < r_; ++d) {
      const std::size_t m = r_ - d;
      Matrix sub(m, std::vector<Rational>(m));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          sub[i][j] = form_.M[d + i][d + j];
          if (i != j && sub[i][j] < 0) free_nonneg_[d] = false;
        }
      }
      free_pd_[d] = positive_definite(sub);
      if (free_pd_[d]) free_inv_[d] = inverse(sub);
    }
    for (const auto& x : spec.extras) {
      auto [a, c] = affine_form(x.length, spec.vars);
      ExtraInfo info{&x, std::vector<Rational>(r_), c, 0, {}};
      std::size_t last = 0;
      for (std::size_t i = 0; i < r_; ++i) {
        info.coeffs[i] = a[perm_[i]];
        if (info.coeffs[i] != 0) last = i + 1;
      }
      info.depth = last == 0 ? 0 : last - 1;
      extras_.push_back(std::move(info));
    }
    for (std::size_t i = 0; i < r_; ++i) step_.push_back(spec.denom_bases[perm_[i]].units());
    x_.assign(r_, 0);
  }

  QSeries run(MultiSumStats* stats) {
    const int d = D_;
    if (std::any_of(box_.begin(), box_.end(), [](std::int64_t b) { return b < 0; })) {
      if (stats) stats->box = box_;
      return QSeries(d, U_);
    }
    const Rational root = node_lb(0);
    const std::int64_t lo_units = std::min<std::int64_t>(0, floor_q(root * D_));
    offset_ = lo_units;
    result_.assign(static_cast<std::size_t>(U_ - lo_units + 1), mpq_class());
    const std::int64_t cap = U_ - lo_units;
    Dense one(static_cast<std::size_t>(cap + 1));
    one[0] = 1;
    bufs_.assign(r_, Dense());
    scratch_a_.assign(r_, Dense());
    scratch_b_.assign(r_, Dense());
    recurse(0, one, cap);
    if (stats) {
      stats->box = box_;
      stats->points = points_;
    }
    QSeries::Terms terms;
    for (std::size_t i = 0; i < result_.size(); ++i) {
      if (mpq_sgn(result_[i].get_mpq_t()) != 0) {
        terms.emplace_hint(terms.end(), static_cast<std::int64_t>(i) + offset_,
                           std::move(result_[i]));
      }
    }
    return QSeries::from_terms(d, U_, std::move(terms));
  }

 private:
  struct Shift {
    std::vector<Rational> a;
    Rational c;
    Rational coeff;
  };
  struct ExtraInfo {
    const ExtraFactor* factor;
    std::vector<Rational> coeffs;
    Rational c;
    std::size_t depth;
    std::map<std::int64_t, Dense> cache;
  };

  // Lower bound for exponent + prefactor shift over all completions of x_[0..d).
  // `relaxed` receives the real-relaxation minimum, which is convex in x_[d-1].
  Rational node_lb(std::size_t d, Rational* relaxed = nullptr) const {
    Rational best, best_relaxed;
    bool first = true;
    for (const auto& sh : shifts_) {
      Rational e = form_.c + sh.c;
      for (std::size_t i = 0; i < d; ++i) {
        e += (form_.l[i] + sh.a[i]) * x_[i];
        e += form_.M[i][i] * x_[i] * x_[i] / 2;
        for (std::size_t j = i + 1; j < d; ++j) e += form_.M[i][j] * x_[i] * x_[j];
      }
      Rational bound = e;
      Rational real = e;
      if (d < r_) {
        const std::size_t m = r_ - d;
        std::vector<Rational> g(m);
        for (std::size_t i = 0; i < m; ++i) {
          g[i] = form_.l[d + i] + sh.a[d + i];
          for (std::size_t j = 0; j < d; ++j) g[i] += form_.M[d + i][j] * x_[j];
        }
        Rational sep = e;
        if (free_nonneg_[d]) {
          for (std::size_t i = 0; i < m; ++i) {
            sep += min_quadratic_nonneg(form_.M[d + i][d + i], g[i]);
          }
        }
        if (free_pd_[d]) {
          Rational quad;
          const Matrix& S = free_inv_[d];
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) quad += g[i] * S[i][j] * g[j];
          }
          real = e - quad / 2;
          bound = free_nonneg_[d] && sep > real ? sep : real;
        } else {
          // Semidefinite block: validate() guarantees free_nonneg_ here.
          real = bound = sep;
        }
      }
      if (first || bound < best) best = bound;
      if (first || real < best_relaxed) best_relaxed = real;
      first = false;
    }
    if (relaxed) *relaxed = best_relaxed;
    return best;
  }

  const Dense& extra_series(ExtraInfo& info) {
    Rational len = info.c;
    for (std::size_t i = 0; i <= info.depth && i < r_; ++i) len += info.coeffs[i] * x_[i];
    if (len.get_den() != 1) throw std::domain_error("non-integer Pochhammer length");
    const std::int64_t n = len.get_num().get_si();
    auto it = info.cache.find(n);
    if (it == info.cache.end()) {
      const QExponent ord(U_ - offset_, D_);
      const ExtraFactor& f = *info.factor;
      QSeries s = f.in_denominator
                      ? (n >= 0 ? poch_finite_inverse(f.arg, f.base, n, ord)
                                : poch_finite(Monomial(f.arg.coeff, f.arg.exp + f.base * n),
                                              f.base, -n, ord))
                      : poch_finite(f.arg, f.base, n, ord);
      it = info.cache.emplace(n, to_dense(s, U_ - offset_)).first;
    }
    return it->second;
  }

  void recurse(std::size_t d, const Dense& parent, std::int64_t cap_parent) {
    const std::size_t len = static_cast<std::size_t>(cap_parent + 1);
    Dense& buf = bufs_[d];
    buf.assign(parent.begin(), parent.begin() + static_cast<std::ptrdiff_t>(len));
    const std::int64_t step = step_[d];
    // The early exit below needs the relaxed bound to be convex in n.
    const bool convex = shifts_.size() == 1 && free_pd_[d + 1];
    Rational prev_relaxed;
    for (std::int64_t n = 0; n <= box_[perm_[d]]; ++n) {
      if (n > 0 && step > 0) {
        // buf /= (1 - q^{step n})
        const std::size_t s = static_cast<std::size_t>(step * n);
        for (std::size_t i = s; i < len; ++i) {
          if (mpq_sgn(buf[i - s].get_mpq_t()) != 0) buf[i] += buf[i - s];
        }
      }
      x_[d] = n;
      Rational relaxed;
      const Rational lb = node_lb(d + 1, &relaxed);
      const Rational lb_units = lb * D_;
      const bool rising = n > 0 && relaxed >= prev_relaxed;
      prev_relaxed = relaxed;
      if (lb_units > U_) {
        // The relaxed bound is convex in n: once it rises above the order it stays there.
        if (convex && rising && relaxed * D_ > U_) break;
        continue;
      }
      const std::int64_t cap = std::min(cap_parent, U_ - floor_q(lb_units));
      const Dense* cur = &buf;
      bool in_a = false;
      for (auto& info : extras_) {
        if (info.depth != d) continue;
        const Dense& ex = extra_series(info);
        Dense& out = in_a ? scratch_b_[d] : scratch_a_[d];
        dense_mul(*cur, ex, out, static_cast<std::size_t>(cap + 1));
        cur = &out;
        in_a = !in_a;
      }
      if (d + 1 == r_) {
        leaf(*cur, cap);
      } else {
        recurse(d + 1, *cur, cap);
      }
    }
    x_[d] = 0;
  }

  void leaf(const Dense& q, std::int64_t cap) {
    ++points_;
    Rational e = form_.c;
    for (std::size_t i = 0; i < r_; ++i) {
      e += form_.l[i] * x_[i];
      e += form_.M[i][i] * x_[i] * x_[i] / 2;
      for (std::size_t j = i + 1; j < r_; ++j) e += form_.M[i][j] * x_[i] * x_[j];
    }
    mpq_class prod;
    for (const auto& sh : shifts_) {
      Rational t = e + sh.c;
      for (std::size_t i = 0; i < r_; ++i) t += sh.a[i] * x_[i];
      Rational tu = t * D_;
      tu.canonicalize();
      if (tu.get_den() != 1) {
        throw LatticeError("summand exponent " + t.get_str() + " is off the 1/" +
                           std::to_string(D_) + " lattice");
      }
      const std::int64_t s = tu.get_num().get_si();
      if (s > U_) continue;
      const std::int64_t top = std::min<std::int64_t>(cap, U_ - s);
      for (std::int64_t i = 0; i <= top && i < static_cast<std::int64_t>(q.size()); ++i) {
        const auto& c = q[static_cast<std::size_t>(i)];
        if (mpq_sgn(c.get_mpq_t()) == 0) continue;
        auto& slot = result_[static_cast<std::size_t>(i + s - offset_)];
        if (sh.coeff == 1) {
          slot += c;
        } else {
          mpq_mul(prod.get_mpq_t(), c.get_mpq_t(), sh.coeff.get_mpq_t());
          slot += prod;
        }
      }
    }
  }

  const MultiSumSpec& spec_;
  QExponent order_;
  std::size_t r_ = 0;
  int D_ = kDefaultDenom;
  std::int64_t U_ = 0;
  std::int64_t offset_ = 0;
  std::vector<std::int64_t> box_;
  std::vector<std::size_t> perm_;
  NodeForm form_;
  std::vector<Shift> shifts_;
  std::vector<Matrix> free_inv_;
  std::vector<bool> free_nonneg_;
  std::vector<bool> free_pd_;
  std::vector<ExtraInfo> extras_;
  std::vector<std::int64_t> step_;
  std::vector<std::int64_t> x_;
  std::vector<Dense> bufs_;
  std::vector<Dense> scratch_a_;
  std::vector<Dense> scratch_b_;
  Dense result_;
  std::uint64_t points_ = 0;
};

}  // namespace

QSeries multi_sum(const MultiSumSpec& spec, const QExponent& order, MultiSumStats* stats) {
  Evaluator ev(spec, order);
  return ev.run(stats);
}

QSeries multi_sum_box(const MultiSumSpec& spec, const QExponent& order,
                      const std::vector<std::int64_t>& box) {
  validate(spec);
  const std::size_t r = spec.vars.size();
  if (box.size() != r) throw std::invalid_argument("box dimension mismatch");
  const QuadraticForm f = quadratic_form(spec.exponent, spec.vars);
  QSeries total(spec.denom, order.units());
  if (std::any_of(box.begin(), box.end(), [](std::int64_t b) { return b < 0; })) return total;
  std::vector<std::int64_t> n(r, 0);
  std::map<std::string, Rational> env;
  while (true) {
    for (std::size_t i = 0; i < r; ++i) env[spec.vars[i]] = Rational(n[i]);
    const Rational e = f.eval(n);
    // Summand as an explicit product, nothing shared between points.
    std::vector<QTerm> pre = spec.prefactor;
    if (pre.empty()) pre.push_back({Rational(1), Poly(0)});
    Rational min_shift;
    bool first = true;
    for (const auto& t : pre) {
      Rational s = e + t.exponent.eval(env);
      if (first || s < min_shift) min_shift = s;
      first = false;
    }
    const std::int64_t lo = floor_q(min_shift * spec.denom);
    if (lo <= order.units()) {
      const QExponent work(order.units() - std::min<std::int64_t>(lo, 0), spec.denom);
      QSeries s = QSeries::one(work);
      for (std::size_t i = 0; i < r; ++i) {
        const QExponent& b = spec.denom_bases[i];
        if (b.units() > 0) {
          s = mul(s, poch_finite_inverse(Monomial(Rational(1), b), b, n[i], work));
        }
      }
      for (const auto& x : spec.extras) {
        const Rational len = x.length.eval(env);
        const std::int64_t L = len.get_num().get_si();
        QSeries p = poch_finite(x.arg, x.base, L, work);
        s = mul(s, x.in_denominator ? invert_unit(p, work) : p);
      }
      QSeries pref(spec.denom, work.units() + 64 * spec.denom);
      for (const auto& t : pre) {
        pref.accumulate(QExponent::from_rational(e + t.exponent.eval(env), spec.denom).units(),
                        t.coeff);
      }
      total = add(total, mul(pref, s).truncated(order.units()));
    }
    std::size_t i = 0;
    while (i < r && n[i] == box[i]) n[i++] = 0;
    if (i == r) break;
    ++n[i];
  }
  return total.truncated(order.units());
}

std::string describe(const MultiSumSpec& spec) {
  std::string out = "sum over (";
  for (std::size_t i = 0; i < spec.vars.size(); ++i) {
    if (i) out += ",";
    out += spec.vars[i];
  }
  out += ") of ";
  if (!spec.prefactor.empty()) out += "(" + qpoly_str(spec.prefactor) + ") * ";
  out += "q^(" + spec.exponent.str() + ")";
  for (std::size_t i = 0; i < spec.vars.size(); ++i) {
    const auto& b = spec.denom_bases[i];
    if (b.units() == 0) continue;
    const std::string qb = "q^" + b.value().get_str();
    out += " / (" + qb + ";" + qb + ")_" + spec.vars[i];
  }
  for (const auto& x : spec.extras) out += " * " + x.str();
  return out;
}

}  // namespace nahm
