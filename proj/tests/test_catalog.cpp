#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "nahm/catalog.hpp"
#include "print.hpp"

using namespace nahm;

namespace {

QExponent W(std::int64_t v) { return QExponent::whole(v); }

const Catalog& builtin() {
  static const Catalog cat = Catalog::builtin();
  return cat;
}

std::string render(const ProductSum& s) {
  std::string out;
  for (const auto& e : s) out += (out.empty() ? "" : " + ") + ("[" + e.str() + "]");
  return out;
}

std::string parse_error(std::string_view text) {
  try {
    parse_product(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "(no error)";
}

std::string catalog_error(std::string_view text) {
  try {
    Catalog::parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "(no error)";
}

// Copy of a fixed identity with a different right side.
Identity with_rhs(const std::string& id, const std::string& rhs) {
  Identity x = *builtin().find(id);
  x.rhs_text = rhs;
  x.rhs = parse_product(rhs);
  return x;
}

const char* kMinimal = R"cat(# two records
[identity rr]
tags = [demo]
lhs.kind = nahm
vars = [n]
A = [[2]]
b = [0]
d = [1]
rhs = "1 / P(1,4;5)"

[identity rr-sum]
tags = [demo, other]
vars = [n]
exponent = "n^2+n"
denoms = [q]
rhs = "1 / P(2,3;5)"
)cat";

}  // namespace

TEST(ProductGrammar, Golden) {
  const std::map<std::string, std::string> golden = {
      {"TP(5,6,11;11) / ( P(1;2) * P(4;4) )",
       "[(q^5; q^11)_inf * (q^6; q^11)_inf * (q^11; q^11)_inf * (q; q^2)_inf^-1 * (q^4; q^4)_inf^-1]"},
      {"2 * TP(3,5,8;8) / P(1;1)",
       "[(2) * (q^3; q^8)_inf * (q^5; q^8)_inf * (q^8; q^8)_inf * (q; q)_inf^-1]"},
      {"J(4)*J(14)^2/J(2,28)",
       "[(q^4; q^4)_inf * (q^14; q^14)_inf * (q^14; q^14)_inf * (q^2; q^28)_inf^-1 * "
       "(q^26; q^28)_inf^-1 * (q^28; q^28)_inf^-1]"},
      {"(1+q^(1/2)) * P(-q^(1/2);1)", "[(1 + q^(1/2)) * (-q^(1/2); q)_inf]"},
      {"P(1;1) + q*P(2;2)", "[(q; q)_inf] + [(q) * (q^2; q^2)_inf]"},
      {"1 / P(1,4;5)", "[(q; q^5)_inf^-1 * (q^4; q^5)_inf^-1]"},
      {"q^2 P(1;2)", "[(q^2) * (q; q^2)_inf]"},
      {"-P(1;1)", "[(-1) * (q; q)_inf]"},
      {"TP(1/2,3,7/2;7/2)", "[(q^(1/2); q^(7/2))_inf * (q^3; q^(7/2))_inf * (q^(7/2); q^(7/2))_inf]"},
  };
  for (const auto& [text, want] : golden) EXPECT_EQ(render(parse_product(text)), want) << text;
}

TEST(ProductGrammar, Errors) {
  EXPECT_EQ(parse_error("TP(1,2;3)"), "TP needs three arguments at column 10 in \"TP(1,2;3)\"");
  EXPECT_EQ(parse_error("P(1;1"), "unbalanced parentheses at column 6 in \"P(1;1\"");
  EXPECT_EQ(parse_error("Q(1;1)"), "unknown product 'Q' at column 7 in \"Q(1;1)\"");
  EXPECT_EQ(parse_error("P(1;1) )"), "unexpected ')' at column 8 in \"P(1;1) )\"");
  EXPECT_EQ(parse_error("J(1/2)"), "J takes integer arguments at column 7 in \"J(1/2)\"");
  EXPECT_EQ(parse_error("P(1;0)"), "Pochhammer base must be positive: \"0\"");
  EXPECT_EQ(parse_error("P(1;-q)"), "Pochhammer base must be a power of q: \"-q\"");
  EXPECT_NE(parse_error("TP(1,2,3;q^(1/3))").find("not on the 1/4 lattice"), std::string::npos);
  EXPECT_NE(parse_error("J(28,28)").find("0 < a < m"), std::string::npos);
}

TEST(CatalogFormat, ParsesRecords) {
  const Catalog c = Catalog::parse(kMinimal);
  ASSERT_EQ(c.identities().size(), 2u);
  const Identity& rr = *c.find("rr");
  ASSERT_TRUE(rr.quad);
  EXPECT_EQ(rr.lhs.exponent, builtin().find("R.R.1")->lhs.exponent);
  EXPECT_TRUE(verify(rr, W(20)).equal);
  const Identity& sum = *c.find("rr-sum");
  ASSERT_TRUE(sum.quad);  // recognised from the exponent alone
  EXPECT_EQ(sum.quad->b, std::vector<Rational>{1});
  EXPECT_TRUE(verify(sum, W(20)).equal);
  EXPECT_EQ(c.list("other"), std::vector<std::string>{"rr-sum"});
}

TEST(CatalogFormat, ErrorsCarryLineNumbers) {
  EXPECT_EQ(catalog_error("tags = [x]\n"), "catalog line 1: key outside of an [identity] section");
  EXPECT_EQ(catalog_error("[identity a]\nfoo = 1\n"), "catalog line 2: unknown key 'foo'");
  EXPECT_EQ(catalog_error("[identity a]\nvars = [n]\nvars = [m]\n"), "catalog line 3: duplicate key 'vars'");
  EXPECT_EQ(catalog_error("[identity a]\njust text\n"), "catalog line 2: expected key = value");
  EXPECT_EQ(catalog_error("\n\n[ident a]\n"), "catalog line 3: expected [identity <id>]");
  EXPECT_EQ(catalog_error("[identity a]\nvars = [n]\nexponent = \"n^2\"\ndenoms = [q]\n"),
            "catalog line 1 [a]: missing key 'rhs'");
  EXPECT_EQ(catalog_error("[identity a]\nvars = [n]\nexponent = \"n^2\"\ndenoms = [q]\nrhs = \"1\"\n"
                          "[identity a]\nvars = [n]\nexponent = \"n^2\"\ndenoms = [q]\nrhs = \"1\"\n"),
            "catalog line 6: duplicate id 'a'");
  // A matrix that contradicts the displayed exponent.
  const std::string bad = std::string(kMinimal).replace(std::string(kMinimal).find("A = [[2]]"), 9,
                                                        "A = [[2]]\nexponent = \"n^2+n\"");
  EXPECT_NE(catalog_error(bad).find("catalog line 2 [rr]: exponent disagrees with A, b, c"),
            std::string::npos);
}

TEST(Manifest, FixedIdentities) {
  const std::map<std::string, std::size_t> per_tag = {
      {"rr", 2},         {"example1", 2},   {"example2", 3},   {"example3", 5},   {"example4", 5},
      {"example5", 3},   {"example6", 2},   {"example7", 2},   {"example8", 3},   {"example9", 5},
      {"example10", 2},  {"example11", 5},  {"example12", 4},  {"example13", 5},  {"example14", 3},
      {"example15", 4},  {"example16", 3},  {"example17", 3},  {"example18", 3},  {"example19", 3},
  };
  std::size_t total = 0;
  for (const auto& [tag, n] : per_tag) {
    EXPECT_EQ(builtin().list(tag).size(), n) << tag;
    total += n;
  }
  EXPECT_EQ(total, 67u);
  EXPECT_EQ(builtin().identities().size(), 67u);
  EXPECT_EQ(builtin().list("table2").size(), 65u);
  for (const auto& id : builtin().identities()) EXPECT_FALSE(id.tags.empty()) << id.id;
}

TEST(Manifest, Families) {
  std::vector<std::string> names;
  for (const auto& f : families()) names.push_back(f.name);
  const std::vector<std::string> want = {
      "AG",     "Bressoud", "Bressoud1980", "Warnaar", "thm1.1", "thm1.2",     "corgen13",
      "corgen13last", "gen5-8a", "gen5-8b", "gen1",   "gen6",   "gen7",       "gen10",
      "gen14",  "gen17",    "gen15a",       "gen15b",  "And1",   "And2",       "exam3gen",
      "exam3gen-b", "exam9gen", "exam9gen-b"};
  EXPECT_EQ(names, want);
  const auto all = builtin().list();
  EXPECT_EQ(all.size(), 67u + want.size());
  EXPECT_EQ(all.back(), "exam9gen-b");
}

TEST(Catalog, ListByTag) {
  EXPECT_EQ(builtin().list("example13"),
            (std::vector<std::string>{"eq-13-sum", "table2.13.1", "table2.13.2", "table2.13.3",
                                      "table2.13.4"}));
  EXPECT_TRUE(builtin().list("no-such-tag").empty());
  EXPECT_EQ(builtin().list("erratum"),
            (std::vector<std::string>{"table2.2.1", "table2.2.2", "table2.2.3", "table2.3.2",
                                      "table2.3.3"}));
}

TEST(Catalog, Resolve) {
  EXPECT_EQ(builtin().resolve("R.R.2").id, "R.R.2");
  EXPECT_EQ(builtin().resolve("AG(3,2)").id, "AG(3,2)");
  EXPECT_EQ(builtin().resolve("thm1.2(2)").family, "thm1.2");
  EXPECT_THROW(builtin().resolve("nosuch"), std::invalid_argument);
  EXPECT_THROW(builtin().resolve("And2(4,2)"), std::domain_error);
}

TEST(Verify, KnownIdentities) {
  const VerificationReport r = verify(*builtin().find("table2.13.1"), W(30));
  EXPECT_TRUE(r.equal);
  EXPECT_EQ(r.lhs_digest, r.rhs_digest);
  EXPECT_EQ(r.order, W(30));
  EXPECT_TRUE(verify(*builtin().find("R.R.1"), W(50)).equal);
}

TEST(NegativeControls, OffByOneExponents) {
  // Moving one factor (1 - q^e) to (1 - q^{e'}) changes the series first at q^{min(e, e')}
  // when the right side starts with 1; in a denominator the same holds.
  struct Control {
    const char* id;
    const char* rhs;
    std::int64_t at;
  };
  const std::vector<Control> controls = {
      {"table2.13.1", "TP(4,6,11;11) / (P(1;2)*P(4;4))", 4},
      {"R.R.1", "1 / P(1,3;5)", 3},
      {"table2.10.1", "TP(4,7,10;10) / P(1;1)", 6},
      {"exam12-1", "TP(4,6,9;9) / (P(1;2)*P(4;4))", 5},
      {"table2.4.2", "P(-q;1) / P(1,4,6;8)", 6},
  };
  for (const auto& c : controls) {
    const Identity& orig = *builtin().find(c.id);
    ASSERT_TRUE(verify(orig, W(30)).equal) << c.id;
    const VerificationReport r = verify(with_rhs(c.id, c.rhs), W(30));
    ASSERT_FALSE(r.equal) << c.id;
    ASSERT_TRUE(r.first_mismatch);
    EXPECT_EQ(r.first_mismatch->exponent, W(c.at)) << c.id;
  }
}

TEST(Errata, PrintedRightSidesFail) {
  // The published forms disagree with the sum sides; the catalog keeps both.
  const std::map<std::string, std::int64_t> first_bad = {
      {"table2.2.1", 14}, {"table2.2.2", 14}, {"table2.2.3", 14}, {"table2.3.2", 2}, {"table2.3.3", 2}};
  for (const auto& [id, at] : first_bad) {
    const Identity& x = *builtin().find(id);
    ASSERT_FALSE(x.printed_rhs_text.empty()) << id;
    EXPECT_TRUE(verify(x, W(30)).equal) << id;
    const VerificationReport r = verify(with_rhs(id, x.printed_rhs_text), W(30));
    ASSERT_FALSE(r.equal) << id;
    EXPECT_EQ(r.first_mismatch->exponent, W(at)) << id;
  }
  for (const auto& x : builtin().identities()) {
    EXPECT_EQ(x.has_tag("erratum"), !x.printed_rhs_text.empty()) << x.id;
  }
}

TEST(CrossClaims, CorollaryInstancesMatchExampleThirteen) {
  const QExponent order = W(40);
  const std::vector<std::pair<std::int64_t, std::string>> inst = {
      {3, "table2.13.1"}, {2, "table2.13.2"}, {1, "table2.13.3"}};
  for (const auto& [i, id] : inst) {
    const Identity c = instantiate_family("corgen13", 2, i);
    EXPECT_EQ(dump(substitute_power(eval_lhs(c, W(20)), 2)), dump(eval_lhs(*builtin().find(id), order)))
        << i;
  }
  const Identity last = instantiate_family("corgen13last", 2);
  EXPECT_EQ(dump(substitute_power(eval_lhs(last, W(20)), 2)),
            dump(eval_lhs(*builtin().find("table2.13.4"), order)));
  EXPECT_EQ(dump(eval_lhs(instantiate_family("AG", 2, 2), order)),
            dump(eval_lhs(*builtin().find("R.R.1"), order)));
  EXPECT_EQ(dump(eval_lhs(instantiate_family("AG", 2, 1), order)),
            dump(eval_lhs(*builtin().find("R.R.2"), order)));
}

TEST(Families, DomainChecks) {
  EXPECT_TRUE(valid_family_params("And2", 3, 2));
  EXPECT_FALSE(valid_family_params("And2", 4, 2));
  EXPECT_THROW(instantiate_family("And2", 4, 2), std::domain_error);
  EXPECT_THROW(instantiate_family("AG", 2, 3), std::domain_error);
  EXPECT_THROW(instantiate_family("nosuch", 2, 1), std::invalid_argument);
  EXPECT_EQ(family_params("AG", 3),
            (std::vector<std::pair<std::int64_t, std::int64_t>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 3}}));
  EXPECT_EQ(family_params("thm1.2", 3),
            (std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 0}, {2, 0}, {3, 0}}));
  EXPECT_EQ(instantiate_family("Bressoud", 2, 1).rhs_text, "TP(1,3,4;4) / P(1;1)");
}

TEST(Families, SmallInstancesVerify) {
  for (const auto& f : families()) {
    for (const auto& [k, i] : family_params(f.name, 2)) {
      EXPECT_TRUE(verify(instantiate_family(f.name, k, i), W(20)).equal) << f.name << " " << k << " " << i;
    }
  }
}

TEST(Families, WarnaarTailAgainstDirectLoop) {
  for (std::int64_t k = 2; k <= 5; ++k) {
    for (std::int64_t i = 1; i <= k; ++i) {
      const Identity w = instantiate_family("Warnaar", k, i);
      const QuadraticForm f = quadratic_form(w.lhs.exponent, w.lhs.vars);
      ASSERT_EQ(w.lhs.vars.size(), static_cast<std::size_t>(k));
      // Every point of {0,1,2}^k.
      std::vector<std::int64_t> n(static_cast<std::size_t>(k), 0);
      for (std::int64_t code = 0; code < static_cast<std::int64_t>(std::pow(3, k)); ++code) {
        std::int64_t c = code;
        for (auto& x : n) {
          x = c % 3;
          c /= 3;
        }
        std::vector<std::int64_t> N(static_cast<std::size_t>(k) + 2, 0);
        for (std::int64_t j = k; j >= 1; --j) N[j] = N[j + 1] + n[j - 1];
        Rational want;
        for (std::int64_t j = 1; j <= k; ++j) want += Rational(N[j] * N[j]) / 2;
        for (std::int64_t j = i; j <= k; j += 2) want += N[j];
        EXPECT_EQ(f.eval(n), want) << k << " " << i << " code " << code;
      }
    }
  }
}
