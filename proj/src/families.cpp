// Parameterized identity families. Each builder returns the sum side as a
// MultiSumSpec over named indices and the product side as a ProductSum.

#include <functional>
#include <stdexcept>

#include "nahm/catalog.hpp"

namespace nahm {

namespace {

using Z = std::int64_t;

Poly v(const std::string& name) { return Poly::var(name); }
Poly binom2(const Poly& x) { return Poly(Rational(1, 2)) * x * (x - Poly(1)); }
std::string num(Z x) { return std::to_string(x); }
std::string rat(const Rational& x) {
  Rational y = x;
  y.canonicalize();
  return y.get_str();
}

// Incremental builder for one instance.
struct Sum {
  int denom;
  MultiSumSpec spec;
  std::vector<Poly> n;  // n[t] for t = 1..K (index 0 unused)

  explicit Sum(int d) : denom(d) { spec.denom = d; }

  void var(const std::string& name, const Rational& base) {
    spec.vars.push_back(name);
    spec.denom_bases.push_back(QExponent::from_rational(base, denom));
  }
  // Adds n1..nK with the given bases; split[t] != 0 splits n_t = n_{t,1} + split[t] n_{t,2}
  // with denominator bases base[t] and 2 base[t].
  void indices(Z K, const std::function<Rational(Z)>& base, Z split_at = 0, Z split_mult = 2,
               const Rational& split_base2 = 0) {
    n.assign(static_cast<std::size_t>(K + 1), Poly());
    for (Z t = 1; t <= K; ++t) {
      if (t == split_at) {
        const std::string a = "n" + num(t) + "_1";
        const std::string b = "n" + num(t) + "_2";
        var(a, base(t));
        var(b, split_base2);
        n[t] = v(a) + Poly(Rational(split_mult)) * v(b);
      } else {
        var("n" + num(t), base(t));
        n[t] = v("n" + num(t));
      }
    }
  }
  Poly N(Z j) const {
    Poly s;
    for (Z t = j; t < static_cast<Z>(n.size()); ++t) s = s + n[t];
    return s;
  }
  Z K() const { return static_cast<Z>(n.size()) - 1; }
  Poly sum_sq() const {
    Poly s;
    for (Z j = 1; j <= K(); ++j) s = s + N(j) * N(j);
    return s;
  }
  // N_from + N_{from+step} + ... up to N_to.
  Poly tail(Z from, Z to, Z step = 1) const {
    Poly s;
    for (Z j = std::max<Z>(from, 1); j <= to; j += step) s = s + N(j);
    return s;
  }
  void extra_inv(const Monomial& arg, const Rational& base, const Poly& length) {
    spec.extras.push_back({arg, QExponent::from_rational(base, denom), length, true});
  }
};

Monomial qm(const Rational& e, int denom, int sign = 1) {
  return {Rational(sign), QExponent::from_rational(e, denom)};
}

// TP(a, m-a, m; m) as text; the parser turns it into the product.
std::string tp(const Rational& a, const Rational& m) {
  return "TP(" + rat(a) + "," + rat(m - a) + "," + rat(m) + ";" + rat(m) + ")";
}

struct Built {
  MultiSumSpec lhs;
  std::string rhs;
  std::optional<BaileyRoute> bailey;
};

// Chain for thm1.1 at (k, i) in base q.
std::string chain_13(Z k, Z i) {
  auto rep = [](const std::string& s, Z times) {
    return times <= 0 ? std::string() : " |> " + s + (times > 1 ? "^" + num(times) : "");
  };
  if (i == k + 1) return "G1" + rep("S1", k - 1);
  const Rational u = Rational(3, 2) + 2 * (k - i);
  return "G1star" + rep("S1", k - i) + " |> DJKLIM(q^(" + Rational(u).get_str() + "))" +
         rep("S1", i - 1);
}

using Builder = std::function<Built(Z, Z, int)>;

struct Family {
  FamilyInfo info;
  std::function<bool(Z, Z)> in_domain;
  Builder build;
  Z k_min;
};

const std::vector<Family>& table() {
  static const std::vector<Family> fams = [] {
    std::vector<Family> f;
    auto one = [](Z) { return Rational(1); };
    auto ik1 = [](Z k, Z i) { return k >= 1 && i >= 1 && i <= k + 1; };

    f.push_back({{"AG", "k >= 2, 1 <= i <= k", true},
                 [](Z k, Z i) { return k >= 2 && i >= 1 && i <= k; },
                 [one](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k - 1, one);
                   s.spec.exponent = s.sum_sq() + s.tail(i, k - 1);
                   return Built{s.spec, tp(i, 2 * k + 1) + " / P(1;1)", {}};
                 },
                 2});
    f.push_back({{"Bressoud", "k >= 2, 1 <= i <= k", true},
                 [](Z k, Z i) { return k >= 2 && i >= 1 && i <= k; },
                 [](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k - 1, [k](Z t) { return Rational(t == k - 1 ? 2 : 1); });
                   s.spec.exponent = s.sum_sq() + s.tail(i, k - 1);
                   return Built{s.spec, tp(i, 2 * k) + " / P(1;1)", {}};
                 },
                 2});
    f.push_back({{"Bressoud1980", "k >= 2, 1 <= i <= k-1", true},
                 [](Z k, Z i) { return k >= 2 && i >= 1 && i <= k - 1; },
                 [](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k - 1, [k](Z t) { return Rational(t == k - 1 ? 2 : 1); });
                   s.spec.exponent = s.sum_sq() - s.tail(1, i);
                   std::string rhs;
                   for (Z m = 0; m <= i; ++m) {
                     if (m) rhs += " + ";
                     rhs += "TP(" + num(2 * k) + "," + num(k - i + 2 * m) + "," +
                            num(k + i - 2 * m) + ";" + num(2 * k) + ") / P(1;1)";
                   }
                   return Built{s.spec, rhs, {}};
                 },
                 2});
    f.push_back({{"Warnaar", "k >= 2, 1 <= i <= k", true},
                 [](Z k, Z i) { return k >= 2 && i >= 1 && i <= k; },
                 [](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k, [k](Z t) { return Rational(t == k ? 2 : 1); });
                   s.spec.exponent = Poly(Rational(1, 2)) * s.sum_sq() + s.tail(i, k, 2);
                   const Rational m(2 * k + 3, 2);
                   return Built{s.spec,
                                "P(-q^(1/2);1) * " + tp(Rational(i, 2), m) + " / P(1;1)", {}};
                 },
                 2});
    f.push_back({{"thm1.1", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k, [k](Z t) { return Rational(t == k ? 2 : 1); });
                   s.spec.exponent = s.sum_sq() + s.tail(i, k);
                   s.extra_inv(qm(Rational(1, 2), d, -1), 1, s.n[k]);
                   const Rational m = Rational(3, 2) + 2 * k;
                   return Built{s.spec, tp(i, m) + " / P(1;1)",
                                BaileyRoute{chain_13(k, i), {}, 1}};
                 },
                 1});
    f.push_back({{"thm1.2", "k >= 1", false}, [](Z k, Z) { return k >= 1; },
                 [](Z k, Z, int d) {
                   Sum s(d);
                   s.indices(k, [k](Z t) { return Rational(t == k ? 2 : 1); });
                   s.spec.exponent = s.sum_sq() + s.tail(1, k);
                   s.extra_inv(qm(Rational(1, 2), d, -1), 1, s.n[k] + Poly(1));
                   const Rational m = Rational(3, 2) + 2 * k;
                   const std::string chain =
                       "G2" + (k > 1 ? " |> S1" + (k > 2 ? "^" + num(k - 1) : "") : "");
                   return Built{s.spec, tp(Rational(1, 2), m) + " / P(1;1)",
                                BaileyRoute{chain, parse_product_term("P(-q^(3/2);1) / P(-q^(1/2);1)", d), 1}};
                 },
                 1});
    f.push_back({{"corgen13", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m", 1);
                   s.indices(k, [k](Z t) { return Rational(t == k ? 2 : 1); });
                   const Poly m = v("m");
                   s.spec.exponent = Poly(Rational(1, 2)) * m * m + m * s.n[k] + s.sum_sq() + s.tail(i, k);
                   const Rational mod = Rational(3, 2) + 2 * k;
                   return Built{s.spec, "P(-q^(1/2);1) * " + tp(i, mod) + " / P(1;1)",
                                BaileyRoute{chain_13(k, i), parse_product_term("P(-q^(1/2);1)", d), 1}};
                 },
                 1});
    f.push_back({{"corgen13last", "k >= 1", false}, [](Z k, Z) { return k >= 1; },
                 [](Z k, Z, int d) {
                   Sum s(d);
                   s.var("m", 1);
                   s.indices(k, [k](Z t) { return Rational(t == k ? 2 : 1); });
                   const Poly m = v("m");
                   s.spec.exponent = Poly(Rational(1, 2)) * m * m + m * s.n[k] + s.sum_sq() + m +
                                     s.tail(1, k);
                   const Rational mod = Rational(3, 2) + 2 * k;
                   const std::string chain =
                       "G2" + (k > 1 ? " |> S1" + (k > 2 ? "^" + num(k - 1) : "") : "");
                   return Built{s.spec,
                                "P(-q^(1/2);1) * " + tp(Rational(1, 2), mod) + " / P(1;1)",
                                BaileyRoute{chain, parse_product_term("P(-q^(3/2);1)", d), 1}};
                 },
                 1});

    // Generalizations built on the Andrews-Gordon identity.
    auto rhs_2 = [](Z k, Z i) { return tp(2 * i, 4 * k + 6) + " / P(1;1)"; };
    auto rhs_4 = [](Z k, Z i) { return tp(4 * i, 8 * k + 12) + " / P(1;1)"; };
    auto rhs_1 = [](Z k, Z i) { return tp(i, 2 * k + 3) + " / P(1;1)"; };

    f.push_back({{"gen5-8a", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_2](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m", 1);
                   s.indices(k, [](Z t) { return Rational(t == 1 ? 1 : 2); });
                   const Poly m = v("m");
                   s.spec.exponent = binom2(m + Poly(1)) + m * s.n[1] + Poly(2) * s.sum_sq() +
                                     Poly(2) * s.tail(i, k);
                   return Built{s.spec, rhs_2(k, i), {}};
                 },
                 1});
    f.push_back({{"gen5-8b", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_2](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m", 1);
                   s.indices(k, [k](Z t) { return Rational(t == k ? 1 : 2); });
                   const Poly m = v("m");
                   s.spec.exponent = binom2(m + Poly(1)) + m * s.n[k] + Poly(2) * s.sum_sq() +
                                     Poly(2) * s.tail(i, k);
                   return Built{s.spec, rhs_2(k, i), {}};
                 },
                 1});
    f.push_back({{"gen1", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_4](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m1", 1);
                   s.var("m2", 1);
                   s.indices(k, [](Z t) { return Rational(t == 1 ? 2 : 4); });
                   const Poly m1 = v("m1"), m2 = v("m2");
                   s.spec.exponent = binom2(m1 + Poly(1)) + m1 * m2 + Poly(2) * binom2(m2 + Poly(1)) +
                                     Poly(2) * m2 * s.n[1] + Poly(4) * s.sum_sq() +
                                     Poly(4) * s.tail(i, k);
                   return Built{s.spec, rhs_4(k, i), {}};
                 },
                 1});
    f.push_back({{"gen6", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_2](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m", 1);
                   s.indices(k, [](Z t) { return Rational(t == 1 ? 1 : 2); }, 1, 2, 2);
                   const Poly m = v("m");
                   s.spec.exponent = binom2(m + Poly(1)) + m * s.n[1] + binom2(v("n1_1")) +
                                     Poly(2) * s.sum_sq() + Poly(2) * s.tail(i, k);
                   return Built{s.spec, rhs_2(k, i), {}};
                 },
                 1});
    f.push_back({{"gen7", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_4](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m1", 1);
                   s.var("m2", 2);
                   s.indices(k, [](Z t) { return Rational(t == 1 ? 1 : 4); });
                   const Poly m1 = v("m1"), m2 = v("m2");
                   s.spec.exponent = binom2(m1 + Poly(1)) + m1 * s.n[1] +
                                     Poly(2) * binom2(m2 + Poly(1)) + Poly(2) * m2 * s.n[1] +
                                     Poly(4) * s.sum_sq() + Poly(4) * s.tail(i, k);
                   return Built{s.spec, rhs_4(k, i), {}};
                 },
                 1});
    f.push_back({{"gen10", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_2](Z k, Z i, int d) {
                   Sum s(d);
                   s.var("m1", 1);
                   s.var("m2", 2);
                   s.indices(k, [](Z t) { return Rational(t == 1 ? 1 : 2); });
                   const Poly m1 = v("m1"), m2 = v("m2");
                   const Poly M = m1 + Poly(2) * m2;
                   s.spec.exponent = binom2(m1) + binom2(M + Poly(1)) + M * s.n[1] +
                                     Poly(2) * s.sum_sq() + Poly(2) * s.tail(i, k);
                   return Built{s.spec, rhs_2(k, i), {}};
                 },
                 1});
    f.push_back({{"gen14", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_1, one](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k, one, k, 2, 2);
                   s.spec.exponent =
                       binom2(v("n" + num(k) + "_1")) + s.sum_sq() + s.tail(i, k);
                   return Built{s.spec, rhs_1(k, i), {}};
                 },
                 1});
    f.push_back({{"gen17", "k >= 1, 1 <= i <= k+1", true}, ik1,
                 [rhs_1, one](Z k, Z i, int d) {
                   Sum s(d);
                   s.indices(k, one, 1, 2, 2);
                   s.spec.exponent = binom2(v("n1_1")) + s.sum_sq() + s.tail(i, k);
                   return Built{s.spec, rhs_1(k, i), {}};
                 },
                 1});
    for (const bool second : {false, true}) {
      f.push_back({{second ? "gen15b" : "gen15a", "k >= 1, 1 <= i <= k+1", true}, ik1,
                   [rhs_1, one, second](Z k, Z i, int d) {
                     Sum s(d);
                     s.var("m", 1);
                     s.indices(k, one, 1, 1, 2);
                     const Poly m = v("m"), a = v("n1_1"), b = v("n1_2");
                     s.spec.exponent = binom2(m + Poly(1)) + m * a + a * a + b * b -
                                       (second ? b : a) - binom2(s.n[1]) + s.sum_sq() +
                                       s.tail(i, k);
                     return Built{s.spec, "P(-q;1) * " + rhs_1(k, i), {}};
                   },
                   1});
    }

    // Andrews' identities and their split forms; here i plays the role of a.
    auto and_rhs = [](Z k, Z a, bool second) {
      return std::string(second ? "P(-q^2;2)" : "P(-q;2)") + " * " + tp(a, 2 * k + 2) + " / P(2;2)";
    };
    auto and1_dom = [](Z k, Z a) { return k >= 2 && a >= 1 && a <= k && (k - a) % 2 == 0; };
    auto and2_dom = [](Z k, Z a) { return k >= 3 && k % 2 == 1 && a >= 2 && a <= k && a % 2 == 0; };
    // Linear part of the second identity over K partial sums: n1 + n3 + ... + n_{a-3} + N_{a-1} + ... + N_K.
    auto and2_lin = [](const Sum& s, Z a, Z K) {
      Poly p;
      for (Z t = 1; t <= a - 3; t += 2) p = p + s.n[t];
      return p + s.tail(a - 1, K);
    };
    auto two = [](Z) { return Rational(2); };

    f.push_back({{"And1", "k >= 2, 1 <= a <= k, k = a mod 2", true}, and1_dom,
                 [and_rhs, two](Z k, Z a, int d) {
                   Sum s(d);
                   s.indices(k - 1, two);
                   s.spec.exponent = s.sum_sq() + Poly(2) * s.tail(a, k - 2, 2);
                   return Built{s.spec, and_rhs(k, a, false), {}};
                 },
                 2});
    f.push_back({{"And2", "k odd >= 3, a even, 2 <= a <= k", true}, and2_dom,
                 [and_rhs, and2_lin, two](Z k, Z a, int d) {
                   Sum s(d);
                   s.indices(k - 1, two);
                   s.spec.exponent = s.sum_sq() + and2_lin(s, a, k - 1);
                   return Built{s.spec, and_rhs(k, a, true), {}};
                 },
                 3});
    f.push_back({{"exam3gen", "k >= 1, 1 <= a <= k+1, k+1 = a mod 2", true},
                 [](Z k, Z a) { return k >= 1 && a >= 1 && a <= k + 1 && (k + 1 - a) % 2 == 0; },
                 [and_rhs, two](Z k, Z a, int d) {
                   Sum s(d);
                   s.indices(k, two, k, 2, 4);
                   s.spec.exponent = Poly(2) * binom2(v("n" + num(k) + "_1")) + s.sum_sq() +
                                     Poly(2) * s.tail(a, k - 1, 2);
                   return Built{s.spec, and_rhs(k + 1, a, false), {}};
                 },
                 1});
    f.push_back({{"exam3gen-b", "k even >= 2, a even, 2 <= a <= k", true},
                 [](Z k, Z a) { return k >= 2 && k % 2 == 0 && a >= 2 && a <= k && a % 2 == 0; },
                 [and_rhs, and2_lin, two](Z k, Z a, int d) {
                   Sum s(d);
                   s.indices(k, two, k, 2, 4);
                   s.spec.exponent =
                       Poly(2) * binom2(v("n" + num(k) + "_1")) + s.sum_sq() + and2_lin(s, a, k);
                   return Built{s.spec, and_rhs(k + 1, a, true), {}};
                 },
                 2});
    f.push_back({{"exam9gen", "k >= 2, 1 <= a <= k, k = a mod 2", true}, and1_dom,
                 [and_rhs, two](Z k, Z a, int d) {
                   Sum s(d);
                   s.indices(k - 1, two, 1, 2, 4);
                   s.spec.exponent = Poly(2) * binom2(v("n1_1")) + s.sum_sq() +
                                     Poly(2) * s.tail(a, k - 2, 2);
                   return Built{s.spec, and_rhs(k, a, false), {}};
                 },
                 2});
    f.push_back({{"exam9gen-b", "k odd >= 3, a even, 2 <= a <= k", true}, and2_dom,
                 [and_rhs, and2_lin, two](Z k, Z a, int d) {
                   Sum s(d);
                   s.indices(k - 1, two, 1, 2, 4);
                   s.spec.exponent =
                       Poly(2) * binom2(v("n1_1")) + s.sum_sq() + and2_lin(s, a, k - 1);
                   return Built{s.spec, and_rhs(k, a, true), {}};
                 },
                 3});
    return f;
  }();
  return fams;
}

const Family& lookup(std::string_view name) {
  for (const auto& f : table()) {
    if (f.info.name == name) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

}  // namespace

const std::vector<FamilyInfo>& families() {
  static const std::vector<FamilyInfo> out = [] {
    std::vector<FamilyInfo> v;
    for (const auto& f : table()) v.push_back(f.info);
    return v;
  }();
  return out;
}

bool valid_family_params(std::string_view name, std::int64_t k, std::int64_t i) {
  const Family& f = lookup(name);
  return f.in_domain(k, f.info.uses_i ? i : 0);
}

Identity instantiate_family(std::string_view name, std::int64_t k, std::int64_t i, int denom) {
  const Family& f = lookup(name);
  if (!f.info.uses_i) i = 0;
  if (!f.in_domain(k, i)) {
    throw std::domain_error(std::string(name) + ": (k,i) = (" + num(k) + "," + num(i) +
                            ") outside " + f.info.domain);
  }
  Built b = f.build(k, i, denom);
  validate(b.lhs);
  Identity id;
  id.id = std::string(name) + "(" + num(k) + (f.info.uses_i ? "," + num(i) : "") + ")";
  id.family = f.info.name;
  id.tags = {f.info.name};
  id.lhs = std::move(b.lhs);
  id.rhs_text = b.rhs;
  id.rhs = parse_product(b.rhs, denom);
  id.quad = quadruple_of(id.lhs, 1);
  id.bailey = std::move(b.bailey);
  return id;
}

std::vector<std::pair<std::int64_t, std::int64_t>> family_params(std::string_view name,
                                                                 std::int64_t k_max) {
  const Family& f = lookup(name);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (Z k = f.k_min; k <= k_max; ++k) {
    if (!f.info.uses_i) {
      if (f.in_domain(k, 0)) out.emplace_back(k, 0);
      continue;
    }
    for (Z i = 0; i <= k + 1; ++i) {
      if (f.in_domain(k, i)) out.emplace_back(k, i);
    }
  }
  return out;
}

}  // namespace nahm
