#pragma once

// Nahm sums f_{A,b,c,d}(q) = sum_n q^{1/2 n^T A D n + b^T n + c} / prod (q^{d_i}; q^{d_i})_{n_i},
// plus the two rank reductions used to collapse them to smaller sums.

#include <optional>
#include <string>
#include <vector>

#include "nahm/multisum.hpp"
#include "nahm/products.hpp"

namespace nahm {

using Matrix = std::vector<std::vector<Rational>>;

struct NahmQuadruple {
  Matrix A;
  std::vector<Rational> b;
  Rational c;
  std::vector<std::int64_t> d;

  std::size_t rank() const { return b.size(); }
  /// A * diag(d).
  Matrix symmetrized() const;
};

/// True iff A diag(d) is symmetric and positive definite. Throws on shape errors.
bool check_symmetrizable(const Matrix& A, const std::vector<std::int64_t>& d);

/// Direct lattice enumeration in base q, independent of multi_sum.
QSeries nahm_sum(const NahmQuadruple& quad, const QExponent& order, bool include_c = false);

/// The same sum as a MultiSumSpec over the given variable names, in q^base.
MultiSumSpec to_multisum(const NahmQuadruple& quad, const std::vector<std::string>& vars,
                         std::int64_t base = 1, int denom = kDefaultDenom);

/// outer * (reduced sum) equals the original sum.
struct ReducedForm {
  ProductExpr outer;
  MultiSumSpec spec;
  std::string route;
};

/// Sums out variable v with Euler's second identity, when
/// E = (b/2) n_v^2 + (stuff) n_v with integer multiples of b coupling to the others.
std::optional<ReducedForm> reduce_euler(const MultiSumSpec& spec, const std::string& v);

/// Merges j and k (denominator bases b and 2b) into m = n_j + 2 n_k when the exponent
/// minus b*binom(n_j, 2) depends on them only through m.
std::optional<ReducedForm> reduce_lemma21(const MultiSumSpec& spec, const std::string& j,
                                          const std::string& k);

/// First applicable reduction: Euler on each variable in order, then lemma21 pairs.
std::optional<ReducedForm> reduce_rank(const MultiSumSpec& spec);
std::optional<ReducedForm> reduce_rank(const NahmQuadruple& quad);

QSeries eval_reduced(const ReducedForm& form, const QExponent& order);

}  // namespace nahm
