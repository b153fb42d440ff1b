#pragma once

// The identity database: fixed identities read from a small text format,
// parameterized families built in code, and the verification pipeline.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nahm/multisum.hpp"
#include "nahm/nahm_sum.hpp"
#include "nahm/products.hpp"

namespace nahm {

/// Product-side grammar (docs/catalog-grammar.md):
///   2 * TP(3,8,11;11) / (P(1;2) * P(4;4)),  J(4)*J(14)^2/J(2,28),  (1+q^(1/2)) * P(-q^(1/2);1)
/// Top-level '+' separates the terms of a ProductSum.
ProductSum parse_product(std::string_view text, int denom = kDefaultDenom);
ProductExpr parse_product_term(std::string_view text, int denom = kDefaultDenom);

/// Left side of a sum-product identity proved through a Bailey chain:
///   lhs = outer * (sum a^n q^{n^2} beta_n)|_{q -> q^subst}.
struct BaileyRoute {
  std::string chain;
  ProductExpr outer;
  std::int64_t subst = 1;
};

struct Identity {
  std::string id;
  std::vector<std::string> tags;
  std::string family;  // empty for fixed identities
  /// The display lives in q^base; quad (if any) is the base-q Nahm quadruple.
  std::int64_t base = 1;
  std::optional<NahmQuadruple> quad;
  MultiSumSpec lhs;
  ProductSum rhs;
  std::string rhs_text;
  /// Set when the published right side is wrong; rhs holds the corrected product.
  std::string printed_rhs_text;
  /// Reduction steps applied in order: "euler v" or "lemma21 j k".
  std::vector<std::string> route;
  std::optional<BaileyRoute> bailey;

  bool has_tag(std::string_view tag) const;
};

struct VerificationReport {
  std::string id;
  bool equal = false;
  std::optional<Mismatch> first_mismatch;
  std::string lhs_digest;
  std::string rhs_digest;
  QExponent order;
  std::vector<std::int64_t> box;
  std::uint64_t points = 0;
  double ms = 0;
};

/// Three-way agreement of direct Nahm enumeration, the reduced form and the product.
struct CrossCheckReport {
  std::string id;
  std::string route;
  EqualityReport direct_vs_reduced;
  EqualityReport reduced_vs_rhs;
  EqualityReport direct_vs_rhs;
  bool ok() const { return direct_vs_reduced.equal && reduced_vs_rhs.equal && direct_vs_rhs.equal; }
};

/// The base-q quadruple behind a display with no extras or prefactor, if it is one.
std::optional<NahmQuadruple> quadruple_of(const MultiSumSpec& spec, std::int64_t base);

QSeries eval_lhs(const Identity& id, const QExponent& order, MultiSumStats* stats = nullptr);
QSeries eval_rhs(const Identity& id, const QExponent& order);
VerificationReport verify(const Identity& id, const QExponent& order);

/// The reduced form after applying every step of id.route; throws if a step does not apply.
ReducedForm reduced_form(const Identity& id);
/// Throws std::invalid_argument when the identity has no route.
CrossCheckReport cross_check_reduction(const Identity& id, const QExponent& order);

struct FamilyInfo {
  std::string name;
  std::string domain;  // human-readable parameter range
  bool uses_i;
};
const std::vector<FamilyInfo>& families();
bool valid_family_params(std::string_view name, std::int64_t k, std::int64_t i);
/// Throws std::invalid_argument for an unknown name and std::domain_error outside the domain.
Identity instantiate_family(std::string_view name, std::int64_t k, std::int64_t i = 0,
                           int denom = kDefaultDenom);
/// Every in-domain (k, i) with k <= k_max.
std::vector<std::pair<std::int64_t, std::int64_t>> family_params(std::string_view name,
                                                                 std::int64_t k_max);

class Catalog {
 public:
  /// Throws ParseError with a line number.
  static Catalog parse(std::string_view text, int denom = kDefaultDenom);
  static Catalog load(const std::string& path, int denom = kDefaultDenom);
  static Catalog builtin(int denom = kDefaultDenom);

  /// Fixed ids carrying the tag (all of them when empty), sorted; with no tag the
  /// family names follow.
  std::vector<std::string> list(std::string_view tag = {}) const;
  const std::vector<Identity>& identities() const noexcept { return ids_; }
  const Identity* find(std::string_view id) const;
  /// Fixed id, or a family instance written "NAME(k,i)" / "NAME(k)".
  Identity resolve(std::string_view id) const;

 private:
  std::vector<Identity> ids_;
  int denom_ = kDefaultDenom;
};

/// The text compiled into the binary.
std::string_view builtin_catalog_text();

}  // namespace nahm
