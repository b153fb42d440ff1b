#include "nahm/poly.hpp"

#include <algorithm>
#include <cctype>

namespace nahm {

Poly::Poly(Rational c) {
  if (c != 0) terms_.emplace(Mono{}, std::move(c));
}

Poly Poly::var(const std::string& name) {
  Poly p;
  p.terms_.emplace(Mono{{name, 1}}, Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_term() const { return coeff(Mono{}); }

int Poly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int md = 0;
    for (const auto& [v, p] : m) md += p;
    d = std::max(d, md);
  }
  return d;
}

std::set<std::string> Poly::variables() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, p] : m) out.insert(v);
  }
  return out;
}

Rational Poly::coeff(const Mono& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Poly::linear_coeff(const std::string& v) const { return coeff(Mono{{v, 1}}); }

Rational Poly::quadratic_coeff(const std::string& a, const std::string& b) const {
  if (a == b) return coeff(Mono{{a, 2}});
  return coeff(Mono{{a, 1}, {b, 1}});
}

void Poly::add_term(const Mono& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-() const {
  Poly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Mono m = ma;
      for (const auto& [v, p] : mb) m[v] += p;
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

Poly Poly::pow(int n) const {
  if (n < 0) throw ParseError("negative power of a polynomial");
  Poly r(1);
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

Rational Poly::eval(const std::map<std::string, Rational>& values) const {
  Rational total;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, p] : m) {
      auto it = values.find(v);
      if (it == values.end()) throw std::invalid_argument("unbound variable " + v);
      for (int i = 0; i < p; ++i) t *= it->second;
    }
    total += t;
  }
  return total;
}

Poly Poly::substitute(const std::map<std::string, Poly>& defs) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    Poly t(c);
    for (const auto& [v, p] : m) {
      auto it = defs.find(v);
      t = t * (it == defs.end() ? Poly::var(v) : it->second).pow(p);
    }
    r = r + t;
  }
  return r;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Mono, Rational>> sorted(terms_.begin(), terms_.end());
  auto deg = [](const Mono& m) {
    int d = 0;
    for (const auto& [v, p] : m) d += p;
    return d;
  };
  std::stable_sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
    if (deg(a.first) != deg(b.first)) return deg(a.first) > deg(b.first);
    return a.first < b.first;
  });
  std::string out;
  bool first = true;
  for (const auto& [m, c] : sorted) {
    Rational mag = c;
    if (first) {
      if (c < 0) {
        out += "-";
        mag = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) mag = -c;
    }
    first = false;
    std::string body;
    for (const auto& [v, p] : m) {
      if (!body.empty()) body += "*";
      body += v;
      if (p != 1) body += "^" + std::to_string(p);
    }
    if (body.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += body;
    } else {
      out += mag.get_str() + "*" + body;
    }
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(text.substr(start)));
  return out;
}

Rational parse_rational(std::string_view text) {
  const std::string t = trim(text);
  Rational r;
  if (t.empty() || r.set_str(t, 10) != 0) throw ParseError("bad rational literal '" + t + "'");
  if (r.get_den() == 0) throw ParseError("zero denominator in '" + t + "'");
  r.canonicalize();
  return r;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const Definitions& defs) : text_(text), defs_(defs) {}

  Poly parse_all() {
    Poly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at column " + std::to_string(pos_ + 1) + " in \"" +
                     std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
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

  Poly expr() {
    Poly p;
    bool neg = false;
    if (accept('-')) {
      neg = true;
    } else {
      accept('+');
    }
    p = term();
    if (neg) p = -p;
    while (true) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }

  bool starts_factor(char c) const {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '(';
  }

  Poly term() {
    Poly p = power();
    while (true) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        p = p * power();
      } else if (c == '/') {
        ++pos_;
        Poly d = power();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        p = p * Poly(Rational(1) / d.constant_term());
      } else if (starts_factor(c)) {
        p = p * power();  // juxtaposition
      } else {
        return p;
      }
    }
  }

  Poly power() {
    Poly base = atom();
    if (accept('^')) {
      Poly e = atom();
      if (!e.is_constant()) fail("non-constant power");
      const Rational v = e.constant_term();
      if (v.get_den() != 1 || v < 0) fail("power must be a nonnegative integer");
      base = base.pow(static_cast<int>(v.get_num().get_si()));
    }
    return base;
  }

  Poly atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      expect(')');
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      // Only integers here; a/b is handled by the division rule.
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Poly(parse_rational(text_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (text_.substr(pos_, 5) == "binom") {
        pos_ += 5;
        expect('(');
        Poly x = expr();
        expect(',');
        Poly k = expr();
        expect(')');
        if (!k.is_constant()) fail("binom needs a constant lower index");
        const Rational kv = k.constant_term();
        if (kv.get_den() != 1 || kv < 0) fail("binom lower index must be a nonnegative integer");
        Poly r(1);
        const long kk = kv.get_num().get_si();
        Rational fact(1);
        for (long j = 0; j < kk; ++j) {
          r = r * (x - Poly(Rational(j)));
          fact *= (j + 1);
        }
        return r * Poly(Rational(1) / fact);
      }
      std::size_t start = pos_++;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      auto it = defs_.find(name);
      return it == defs_.end() ? Poly::var(name) : it->second;
    }
    fail(c == '\0' ? "unexpected end of input" : "unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const Definitions& defs_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const Definitions& defs) {
  return PolyParser(text, defs).parse_all();
}

std::vector<QTerm> parse_qpoly(std::string_view text, const Definitions& defs) {
  // Split into signed terms at top-level + and -.
  std::vector<QTerm> out;
  const std::string src = trim(text);
  if (src.empty()) throw ParseError("empty q-polynomial");
  std::vector<std::pair<int, std::string>> pieces;
  int depth = 0;
  int sign = 1;
  std::string cur;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const char ch = src[i];
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth == 0 && (ch == '+' || ch == '-')) {
      // a sign directly after '^' belongs to the exponent
      const std::string t = trim(cur);
      if (!t.empty() && t.back() == '^') {
        cur += ch;
        continue;
      }
      if (!t.empty()) pieces.emplace_back(sign, t);
      sign = ch == '-' ? -1 : 1;
      cur.clear();
      continue;
    }
    cur += ch;
  }
  if (!trim(cur).empty()) pieces.emplace_back(sign, trim(cur));
  if (depth != 0) throw ParseError("unbalanced parentheses in \"" + src + "\"");

  for (const auto& [sg, piece] : pieces) {
    const auto qpos = piece.find('q');
    Rational coeff(1);
    Poly exponent;
    std::string head = trim(piece.substr(0, qpos == std::string::npos ? piece.size() : qpos));
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    if (!head.empty()) {
      Poly c = parse_poly(head, defs);
      if (!c.is_constant()) throw ParseError("non-constant coefficient \"" + head + "\"");
      coeff = c.constant_term();
    }
    if (qpos != std::string::npos) {
      std::string tail = trim(piece.substr(qpos + 1));
      if (tail.empty()) {
        exponent = Poly(1);
      } else {
        if (tail.front() != '^') throw ParseError("expected '^' after q in \"" + piece + "\"");
        tail = trim(tail.substr(1));
        if (tail.empty()) throw ParseError("missing exponent in \"" + piece + "\"");
        if (tail.front() == '(') {
          if (tail.back() != ')') throw ParseError("bad exponent in \"" + piece + "\"");
          exponent = parse_poly(tail.substr(1, tail.size() - 2), defs);
        } else {
          exponent = parse_poly(tail, defs);
          if (!exponent.is_constant()) {
            throw ParseError("compound exponent needs parentheses in \"" + piece + "\"");
          }
        }
      }
    }
    out.push_back({coeff * sg, exponent});
  }
  return out;
}

std::string qpoly_str(const std::vector<QTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    Rational c = t.coeff;
    if (i > 0) {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    } else if (c < 0 && !t.exponent.is_zero()) {
      out += "-";
      c = -c;
    }
    if (t.exponent.is_zero()) {
      out += c.get_str();
      continue;
    }
    if (c != 1) out += c.get_str() + "*";
    out += "q^(" + t.exponent.str() + ")";
  }
  return out;
}

Monomial to_monomial(const QTerm& t, int denom) {
  if (!t.exponent.is_constant()) throw ParseError("monomial exponent depends on indices");
  return {t.coeff, QExponent::from_rational(t.exponent.constant_term(), denom)};
}

}  // namespace nahm
