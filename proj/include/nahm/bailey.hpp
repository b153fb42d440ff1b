#pragma once

// Bailey pairs relative to a monomial a:
//   beta_n = sum_{k=0}^n alpha_k / ((q;q)_{n-k} (aq;q)_{n+k}),
// the transforms that map pairs to pairs, and the limiting identity
//   sum a^n q^{n^2} beta_n = 1/(aq;q)_inf * sum a^n q^{n^2} alpha_n.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nahm/series.hpp"

namespace nahm {

/// n -> QSeries, memoized at the highest order requested so far.
/// Not safe for concurrent use; give each thread its own pairs.
class Sequence {
 public:
  /// gen(n, order_units) must return a series valid through order_units.
  using Generator = std::function<QSeries(std::int64_t, std::int64_t)>;

  Sequence(int denom, Generator gen) : denom_(denom), gen_(std::move(gen)) {}

  QSeries at(std::int64_t n, std::int64_t order_units) const;
  int denom() const noexcept { return denom_; }

 private:
  int denom_;
  Generator gen_;
  mutable std::map<std::int64_t, QSeries> memo_;
  mutable std::int64_t high_water_ = 0;
};

struct BaileyPair {
  std::string name;
  Monomial a;
  std::shared_ptr<const Sequence> alpha;
  std::shared_ptr<const Sequence> beta;

  int denom() const noexcept { return a.exp.denom(); }
  QSeries alpha_at(std::int64_t n, const QExponent& order) const {
    return alpha->at(n, order.units());
  }
  QSeries beta_at(std::int64_t n, const QExponent& order) const {
    return beta->at(n, order.units());
  }
};

struct TransformStep {
  enum class Kind { S1, S3, S5, General, DJK, DJKLimit };
  Kind kind;
  std::vector<Monomial> params;  // GENERAL: rho1, rho2; DJK: b; DJKLIM: u

  std::string str() const;
};

/// G1, G2, G3, G1star (also spelled G1*). Throws std::invalid_argument otherwise.
BaileyPair builtin_pair(std::string_view name, int denom = kDefaultDenom);
/// alpha = delta_{n,0}, so beta_n = 1/((q;q)_n (aq;q)_n).
BaileyPair unit_pair(const Monomial& a);

/// Throws std::invalid_argument when a is incompatible with the step, and
/// std::domain_error when a Pochhammer denominator vanishes.
BaileyPair apply_transform(const BaileyPair& p, const TransformStep& t);
BaileyPair chain(const BaileyPair& p0, const std::vector<TransformStep>& steps);

/// "G1star |> S3 |> S1^2 |> DJKLIM(q^(3/2)) |> GENERAL(q^2, q^3)".
struct ChainExpr {
  std::string seed;            // G1, G2, G3, G1star, or unit
  std::vector<Monomial> seed_params;
  std::vector<TransformStep> steps;
};
ChainExpr parse_chain(std::string_view text, int denom = kDefaultDenom);
BaileyPair build_chain(std::string_view text, int denom = kDefaultDenom);

struct PairCheck {
  std::int64_t n;
  EqualityReport report;
};

struct PairReport {
  bool ok = true;
  std::vector<PairCheck> checks;  // one per n, 0..n_max
};

/// Checks the defining relation for n = 0..n_max.
PairReport verify_pair(const BaileyPair& p, std::int64_t n_max, const QExponent& order);

struct Sides {
  QSeries lhs;
  QSeries rhs;
  EqualityReport report;
};

/// Both sides of the two-parameter form of Bailey's lemma at a fixed n, each multiplied
/// by (aq/rho1, aq/rho2; q)_n.
Sides general_bailey_check(const BaileyPair& p, const Monomial& rho1, const Monomial& rho2,
                           std::int64_t n, const QExponent& order);

/// sum a^n q^{n^2} beta_n against 1/(aq;q)_inf sum a^n q^{n^2} alpha_n.
/// Throws std::runtime_error if terms past n_cut = ceil(sqrt(order)) + 4 still reach the order.
Sides limit_identity(const BaileyPair& p, const QExponent& order);

/// sum_{i=0}^k (-1)^i q^{3i^2/4 - i/4} (1-q^{2i+1}) / ((1-q)(q^2;q)_{k+i}(q;q)_{k-i})
/// against 1/((-q^{1/2};q)_k (q^2;q^2)_k).
Sides lemma23_check(std::int64_t k, const QExponent& order);

}  // namespace nahm
