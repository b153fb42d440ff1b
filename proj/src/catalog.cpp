#include "nahm/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nahm/bailey.hpp"

namespace nahm {

namespace {

// ---------------------------------------------------------------- products

// "1/2", "3", "q", "-q^(1/2)", "q^2" -> monomial; bare numbers mean q^number.
Monomial parse_arg(const std::string& text, int denom) {
  const std::string t = trim(text);
  if (t.find('q') == std::string::npos) {
    return Monomial::q_power(parse_rational(t), denom);
  }
  const auto terms = parse_qpoly(t);
  if (terms.size() != 1) throw ParseError("expected a monomial, got \"" + t + "\"");
  return to_monomial(terms.front(), denom);
}

QExponent parse_base(const std::string& text, int denom) {
  const Monomial m = parse_arg(text, denom);
  if (m.coeff != 1) throw ParseError("Pochhammer base must be a power of q: \"" + text + "\"");
  if (m.exp.units() <= 0) throw ParseError("Pochhammer base must be positive: \"" + text + "\"");
  return m.exp;
}

// True when s has a '+' or '-' at depth 0 that is not a leading sign or part of an exponent.
bool has_top_level_sum(std::string_view s) {
  int depth = 0;
  char prev = '\0';
  bool seen = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == '+' || c == '-') && seen && prev != '^') return true;
    prev = c;
    seen = true;
  }
  return false;
}

class ProductParser {
 public:
  ProductParser(std::string_view text, int denom) : text_(text), denom_(denom) {}

  ProductSum parse_sum() {
    ProductSum out;
    out.push_back(term());
    while (accept('+')) out.push_back(term());
    finish();
    return out;
  }

  ProductExpr parse_term() {
    ProductExpr e = term();
    finish();
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at column " + std::to_string(pos_ + 1) + " in \"" +
                     std::string(text_) + "\"");
  }

  void finish() {
    if (peek() != '\0') fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  char peek() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  // Text up to the parenthesis matching the one just consumed.
  std::string balanced() {
    int depth = 1;
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) return std::string(text_.substr(start, pos_ - 1 - start));
    }
    fail("unbalanced parentheses");
  }

  ProductExpr term() {
    ProductExpr e;
    if (accept('-')) e.prefactor.push_back({Rational(-1), QExponent(0, denom_)});
    e.times(power());
    while (true) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        e.times(power());
      } else if (c == '/') {
        ++pos_;
        e.times(power().inverse());
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '(') {
        e.times(power());
      } else {
        return e;
      }
    }
  }

  ProductExpr power() {
    ProductExpr base = atom();
    if (!accept('^')) return base;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer power");
    const int n = std::stoi(std::string(text_.substr(start, pos_ - start)));
    ProductExpr out;
    for (int i = 0; i < n; ++i) out.times(base);
    return out;
  }

  ProductExpr atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      const std::string inner = balanced();
      if (has_top_level_sum(inner)) {
        ProductExpr e;
        for (const auto& t : parse_qpoly(inner)) e.prefactor.push_back(to_monomial(t, denom_));
        return e;
      }
      return ProductParser(inner, denom_).parse_term();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      ProductExpr e;
      e.prefactor.push_back(
          {parse_rational(text_.substr(start, pos_ - start)), QExponent(0, denom_)});
      return e;
    }
    if (c == 'q') {
      ++pos_;
      Rational exp(1);
      if (accept('^')) {
        if (accept('(')) {
          exp = parse_rational(trim(balanced()));
        } else {
          const std::size_t start = pos_;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
          if (pos_ == start) fail("expected an exponent");
          exp = parse_rational(text_.substr(start, pos_ - start));
        }
      }
      ProductExpr e;
      e.prefactor.push_back(Monomial::q_power(exp, denom_));
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      expect('(');
      const std::string inner = balanced();
      try {
        return call(name, inner);
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception& e) {
        fail(name + "(" + inner + "): " + e.what());
      }
    }
    fail(c == '\0' ? "unexpected end of input" : "unexpected '" + std::string(1, c) + "'");
  }

  ProductExpr call(const std::string& name, const std::string& inner) {
    if (name == "TP" || name == "P") {
      const auto halves = split_top_level(inner, ';');
      if (halves.size() != 2) fail(name + " needs 'args; base'");
      const QExponent base = parse_base(halves[1], denom_);
      const auto args = split_top_level(halves[0], ',');
      if (name == "TP" && args.size() != 3) fail("TP needs three arguments");
      ProductExpr e;
      for (const auto& a : args) e.factors.push_back({parse_arg(a, denom_), base, 1});
      return e;
    }
    if (name == "J") {
      const auto args = split_top_level(inner, ',');
      auto whole = [&](const std::string& s) {
        const Rational v = parse_rational(trim(s));
        if (v.get_den() != 1) fail("J takes integer arguments");
        return v.get_num().get_si();
      };
      if (args.size() == 1) return J(whole(args[0]), OnLattice{denom_});
      if (args.size() == 2) return J(whole(args[0]), whole(args[1]), OnLattice{denom_});
      fail("J takes one or two arguments");
    }
    fail("unknown product '" + name + "'");
  }

  std::string_view text_;
  int denom_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- catalog file

struct RawRecord {
  std::string id;
  int line = 0;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, std::string>> lets;
};

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> parse_list(const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ParseError("unterminated list: " + s);
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  for (auto& item : split_top_level(s, ',')) out.push_back(unquote(item));
  return out;
}

Matrix parse_matrix(const std::string& text) {
  const std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ParseError("bad matrix: " + s);
  Matrix m;
  for (const auto& row : split_top_level(s.substr(1, s.size() - 2), ',')) {
    std::vector<Rational> r;
    for (const auto& x : parse_list(row)) r.push_back(parse_rational(x));
    m.push_back(std::move(r));
  }
  return m;
}

// "1/pochf(-q^(1/2); q; nk+1)" or "pochf(a; q^2; L)"
ExtraFactor parse_extra(const std::string& text, const Definitions& defs, int denom) {
  std::string s = trim(text);
  bool inverse = false;
  if (s.rfind("1/", 0) == 0) {
    inverse = true;
    s = trim(s.substr(2));
  }
  if (s.rfind("pochf(", 0) != 0 || s.back() != ')') {
    throw ParseError("expected pochf(arg; base; length): " + text);
  }
  const auto parts = split_top_level(s.substr(6, s.size() - 7), ';');
  if (parts.size() != 3) throw ParseError("pochf needs three ';'-separated fields: " + text);
  return {parse_arg(parts[0], denom), parse_base(parts[1], denom), parse_poly(parts[2], defs),
          inverse};
}

std::vector<std::string> split_route(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& step : split_top_level(text, ';')) {
    std::istringstream in(step);
    std::string word, joined;
    while (in >> word) joined += (joined.empty() ? "" : " ") + word;
    if (!joined.empty()) out.push_back(joined);
  }
  return out;
}

const std::vector<std::string> kKeys = {
    "tags", "lhs.kind", "base",   "vars",  "A",     "d",           "b",            "c",
    "denoms", "exponent", "extra", "prefactor", "rhs", "rhs.printed", "route", "bailey.chain", "bailey.outer",
    "bailey.subst"};

Identity assemble(const RawRecord& r, int denom) {
  auto has = [&](const char* k) { return r.values.count(k) > 0; };
  auto get = [&](const char* k) -> const std::string& {
    auto it = r.values.find(k);
    if (it == r.values.end()) throw ParseError(std::string("missing key '") + k + "'");
    return it->second;
  };

  Identity id;
  id.id = r.id;
  if (has("tags")) id.tags = parse_list(get("tags"));
  if (has("base")) {
    const Rational b = parse_rational(get("base"));
    if (b.get_den() != 1 || b <= 0) throw ParseError("base must be a positive integer");
    id.base = b.get_num().get_si();
  }
  const std::string kind = has("lhs.kind") ? get("lhs.kind") : "multisum";
  if (kind != "nahm" && kind != "multisum") throw ParseError("lhs.kind must be nahm or multisum");

  Definitions defs;
  for (const auto& [name, body] : r.lets) defs[name] = parse_poly(body, defs);

  MultiSumSpec& spec = id.lhs;
  spec.denom = denom;
  spec.vars = parse_list(get("vars"));
  if (has("denoms")) {
    for (const auto& x : parse_list(get("denoms"))) {
      spec.denom_bases.push_back(x == "1" ? QExponent(0, denom) : parse_base(x, denom));
    }
  } else if (has("d")) {
    for (const auto& x : parse_list(get("d"))) {
      spec.denom_bases.push_back(QExponent::from_rational(parse_rational(x) * id.base, denom));
    }
  }
  if (spec.denom_bases.size() != spec.vars.size()) {
    throw ParseError("need one denominator per variable");
  }
  if (has("extra")) {
    for (const auto& x : parse_list(get("extra"))) spec.extras.push_back(parse_extra(x, defs, denom));
  }
  if (has("prefactor")) spec.prefactor = parse_qpoly(get("prefactor"), defs);

  if (has("A")) {
    if (kind != "nahm") throw ParseError("A is only meaningful for lhs.kind = nahm");
    NahmQuadruple q;
    q.A = parse_matrix(get("A"));
    for (const auto& x : parse_list(get("b"))) q.b.push_back(parse_rational(x));
    if (has("c")) q.c = parse_rational(get("c"));
    for (const auto& x : parse_list(get("d"))) {
      const Rational v = parse_rational(x);
      if (v.get_den() != 1) throw ParseError("d must hold integers");
      q.d.push_back(v.get_num().get_si());
    }
    const MultiSumSpec built = to_multisum(q, spec.vars, id.base, denom);
    Poly e = built.exponent + Poly(q.c * id.base);
    if (has("exponent") && parse_poly(get("exponent"), defs) != e) {
      throw ParseError("exponent disagrees with A, b, c: expected " + e.str());
    }
    if (built.denom_bases != spec.denom_bases) throw ParseError("denoms disagree with d");
    spec.exponent = e;
    id.quad = q;
  } else {
    spec.exponent = parse_poly(get("exponent"), defs);
    id.quad = quadruple_of(spec, id.base);
    if (kind == "nahm" && !id.quad) throw ParseError("lhs is not a Nahm sum in base " +
                                                     std::to_string(id.base));
  }
  validate(spec);

  id.rhs_text = get("rhs");
  id.rhs = parse_product(id.rhs_text, denom);
  if (has("rhs.printed")) {
    id.printed_rhs_text = get("rhs.printed");
    parse_product(id.printed_rhs_text, denom);
  }
  if (has("route")) id.route = split_route(get("route"));
  if (has("bailey.chain")) {
    BaileyRoute b;
    b.chain = get("bailey.chain");
    if (has("bailey.outer")) b.outer = parse_product_term(get("bailey.outer"), denom);
    if (has("bailey.subst")) {
      const Rational s = parse_rational(get("bailey.subst"));
      if (s.get_den() != 1 || s <= 0) throw ParseError("bailey.subst must be a positive integer");
      b.subst = s.get_num().get_si();
    }
    parse_chain(b.chain, denom);  // reject bad chains at load time
    id.bailey = b;
  }
  return id;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a <= 0 ? 0 : (a + b - 1) / b; }

// Evaluates f at order ceil(U/k) and substitutes q -> q^k.
template <class F>
QSeries at_power(std::int64_t k, const QExponent& order, F f) {
  if (k == 1) return f(order).truncated(order.units());
  const QSeries s = f(QExponent(ceil_div(order.units(), k), order.denom()));
  return substitute_power(s, Rational(k)).truncated(order.units());
}

}  // namespace

ProductSum parse_product(std::string_view text, int denom) {
  return ProductParser(text, denom).parse_sum();
}

ProductExpr parse_product_term(std::string_view text, int denom) {
  return ProductParser(text, denom).parse_term();
}

bool Identity::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::optional<NahmQuadruple> quadruple_of(const MultiSumSpec& spec, std::int64_t base) {
  if (!spec.extras.empty() || !spec.prefactor.empty() || base <= 0) return std::nullopt;
  const std::int64_t step = base * spec.denom;
  NahmQuadruple q;
  for (const auto& b : spec.denom_bases) {
    if (b.units() <= 0 || b.units() % step != 0) return std::nullopt;
    q.d.push_back(b.units() / step);
  }
  const QuadraticForm f = quadratic_form(spec.exponent, spec.vars);
  const std::size_t r = spec.vars.size();
  q.A.assign(r, std::vector<Rational>(r));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) q.A[i][j] = f.M[i][j] / (Rational(base) * q.d[j]);
    q.b.push_back(f.l[i] / base);
  }
  q.c = f.c / base;
  if (!check_symmetrizable(q.A, q.d)) return std::nullopt;
  return q;
}

QSeries eval_lhs(const Identity& id, const QExponent& order, MultiSumStats* stats) {
  return multi_sum(id.lhs, order, stats);
}

QSeries eval_rhs(const Identity& id, const QExponent& order) {
  return eval_product(id.rhs, order);
}

VerificationReport verify(const Identity& id, const QExponent& order) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.id = id.id;
  rep.order = order;
  MultiSumStats stats;
  const QSeries lhs = eval_lhs(id, order, &stats);
  const QSeries rhs = eval_rhs(id, order);
  const EqualityReport eq = equal_up_to(lhs, rhs, order);
  rep.equal = eq.equal;
  rep.first_mismatch = eq.first_mismatch;
  rep.lhs_digest = digest(lhs);
  rep.rhs_digest = digest(rhs);
  rep.box = stats.box;
  rep.points = stats.points;
  rep.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

ReducedForm reduced_form(const Identity& id) {
  ReducedForm form;
  form.spec = id.lhs;
  std::string route;
  for (const auto& step : id.route) {
    std::istringstream in(step);
    std::string op, a, b;
    in >> op >> a >> b;
    std::optional<ReducedForm> next;
    if (op == "euler" && !a.empty() && b.empty()) {
      next = reduce_euler(form.spec, a);
    } else if (op == "lemma21" && !a.empty() && !b.empty()) {
      next = reduce_lemma21(form.spec, a, b);
    } else {
      throw std::invalid_argument(id.id + ": unknown route step '" + step + "'");
    }
    if (!next) throw std::domain_error(id.id + ": route step '" + step + "' does not apply");
    form.outer.times(next->outer);
    form.spec = std::move(next->spec);
    route += (route.empty() ? "" : "; ") + step;
  }
  form.route = route;
  return form;
}

CrossCheckReport cross_check_reduction(const Identity& id, const QExponent& order) {
  if (id.route.empty() && !id.bailey) {
    throw std::invalid_argument(id.id + ": no reduction route registered");
  }
  CrossCheckReport rep;
  rep.id = id.id;

  QSeries direct = id.quad ? at_power(id.base, order,
                                      [&](const QExponent& o) { return nahm_sum(*id.quad, o); })
                           : multi_sum(id.lhs, order);
  QSeries reduced(order.denom(), order.units());
  if (!id.route.empty()) {
    const ReducedForm form = reduced_form(id);
    rep.route = form.route;
    reduced = eval_reduced(form, order);
  } else {
    const BaileyRoute& b = *id.bailey;
    rep.route = "bailey " + b.chain;
    const BaileyPair pair = build_chain(b.chain, order.denom());
    const QSeries inner =
        at_power(b.subst, order, [&](const QExponent& o) { return limit_identity(pair, o).lhs; });
    reduced = mul(eval_product(b.outer, order), inner).truncated(order.units());
  }
  const QSeries rhs = eval_rhs(id, order);
  rep.direct_vs_reduced = equal_up_to(direct, reduced, order);
  rep.reduced_vs_rhs = equal_up_to(reduced, rhs, order);
  rep.direct_vs_rhs = equal_up_to(direct, rhs, order);
  return rep;
}

Catalog Catalog::parse(std::string_view text, int denom) {
  Catalog cat;
  cat.denom_ = denom;
  std::vector<RawRecord> raw;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw ParseError("catalog line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      const std::string head = "[identity ";
      if (t.rfind(head, 0) != 0 || t.back() != ']') fail("expected [identity <id>]");
      RawRecord r;
      r.id = trim(t.substr(head.size(), t.size() - head.size() - 1));
      r.line = lineno;
      if (r.id.empty()) fail("empty identity id");
      raw.push_back(std::move(r));
      continue;
    }
    if (raw.empty()) fail("key outside of an [identity] section");
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    RawRecord& r = raw.back();
    if (key == "let") {
      const auto e2 = value.find('=');
      if (e2 == std::string::npos) fail("let needs NAME = expression");
      r.lets.emplace_back(trim(value.substr(0, e2)), unquote(value.substr(e2 + 1)));
      continue;
    }
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail("unknown key '" + key + "'");
    if (r.values.count(key)) fail("duplicate key '" + key + "'");
    r.values[key] = key == "rhs" || key == "rhs.printed" || key == "exponent" || key == "prefactor" ||
                            key == "bailey.chain" || key == "bailey.outer"
                        ? unquote(value)
                        : value;
  }
  for (const auto& r : raw) {
    if (cat.find(r.id)) throw ParseError("catalog line " + std::to_string(r.line) +
                                         ": duplicate id '" + r.id + "'");
    try {
      cat.ids_.push_back(assemble(r, denom));
    } catch (const std::exception& e) {
      throw ParseError("catalog line " + std::to_string(r.line) + " [" + r.id + "]: " + e.what());
    }
  }
  std::sort(cat.ids_.begin(), cat.ids_.end(),
            [](const Identity& a, const Identity& b) { return a.id < b.id; });
  return cat;
}

Catalog Catalog::load(const std::string& path, int denom) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open catalog '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), denom);
}

Catalog Catalog::builtin(int denom) { return parse(builtin_catalog_text(), denom); }

std::vector<std::string> Catalog::list(std::string_view tag) const {
  std::vector<std::string> out;
  for (const auto& id : ids_) {
    if (tag.empty() || id.has_tag(tag)) out.push_back(id.id);
  }
  std::sort(out.begin(), out.end());
  if (tag.empty()) {
    for (const auto& f : families()) out.push_back(f.name);
  }
  return out;
}

const Identity* Catalog::find(std::string_view id) const {
  for (const auto& x : ids_) {
    if (x.id == id) return &x;
  }
  return nullptr;
}

Identity Catalog::resolve(std::string_view id) const {
  if (const Identity* x = find(id)) return *x;
  const auto open = id.find('(');
  if (open != std::string_view::npos && id.back() == ')') {
    const std::string name(id.substr(0, open));
    const auto args = split_top_level(id.substr(open + 1, id.size() - open - 2), ',');
    if (args.size() == 1 || args.size() == 2) {
      std::vector<std::int64_t> v;
      for (const auto& a : args) {
        const Rational r = parse_rational(trim(a));
        if (r.get_den() != 1) throw std::invalid_argument("family parameters must be integers");
        v.push_back(r.get_num().get_si());
      }
      return instantiate_family(name, v[0], v.size() == 2 ? v[1] : 0, denom_);
    }
  }
  throw std::invalid_argument("unknown identity '" + std::string(id) + "'");
}

}  // namespace nahm
