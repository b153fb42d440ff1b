#include "nahm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "nahm/bailey.hpp"
#include "nahm/catalog.hpp"

namespace nahm {

namespace {

struct Options {
  std::string order = "30";
  int denom = kDefaultDenom;
  std::string catalog;
  std::string output = "human";
  int threads = 1;
  bool fail_fast = false;
  bool no_timing = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

QExponent order_of(const Options& o) {
  const Rational v = parse_rational(o.order);
  if (v < 0) throw UsageError("--order must be nonnegative");
  try {
    return QExponent::from_rational(v, o.denom);
  } catch (const LatticeError&) {
    throw UsageError("--order " + o.order + " is off the 1/" + std::to_string(o.denom) +
                     " lattice");
  }
}

std::string order_text(const QExponent& e) { return e.value().get_str(); }

Catalog load_catalog(const Options& o) {
  try {
    if (o.catalog.empty()) return Catalog::builtin(o.denom);
    return Catalog::load(o.catalog, o.denom);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::string fmt_ms(double ms) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << ms;
  return s.str();
}

std::string mismatch_text(const std::optional<Mismatch>& m) {
  if (!m) return "";
  return "first mismatch at q^" + m->exponent.value().get_str() + ": lhs " + m->lhs.get_str() +
         ", rhs " + m->rhs.get_str();
}

bool is_family(std::string_view name) {
  const auto& f = families();
  return std::any_of(f.begin(), f.end(), [&](const FamilyInfo& i) { return i.name == name; });
}

// Expands verify/crosscheck targets into concrete identities, in request order.
std::vector<Identity> resolve_targets(const Catalog& cat, const std::vector<std::string>& names,
                                      std::optional<std::int64_t> k,
                                      std::optional<std::int64_t> i, std::int64_t k_max,
                                      int denom) {
  std::vector<Identity> out;
  auto family_range = [&](const std::string& name) {
    if (k && i) {
      out.push_back(instantiate_family(name, *k, *i, denom));
      return;
    }
    const std::int64_t top = k ? *k : k_max;
    for (auto [kk, ii] : family_params(name, top)) {
      if (k && kk != *k) continue;
      out.push_back(instantiate_family(name, kk, ii, denom));
    }
  };
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& id : cat.identities()) out.push_back(id);
    } else if (n == "families") {
      for (const auto& f : families()) family_range(f.name);
    } else if (is_family(n)) {
      try {
        family_range(n);
      } catch (const std::domain_error& e) {
        throw UsageError(e.what());
      }
    } else {
      try {
        out.push_back(cat.resolve(n));
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }
  }
  return out;
}

struct JobResult {
  bool done = false;
  bool pass = false;
  double ms = 0;
  std::string detail;
};

// Runs fn over jobs with a small worker pool; with fail_fast, jobs not yet
// started after the first failure are skipped.
template <class Fn>
std::vector<JobResult> run_jobs(std::size_t n, int threads, bool fail_fast, Fn fn) {
  std::vector<JobResult> results(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    while (!stop) {
      const std::size_t j = next++;
      if (j >= n) return;
      const auto t0 = std::chrono::steady_clock::now();
      JobResult r;
      try {
        r = fn(j);
      } catch (const std::exception& e) {
        r.pass = false;
        r.detail = e.what();
      }
      r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                 .count();
      r.done = true;
      results[j] = std::move(r);
      if (!results[j].pass && fail_fast) stop = true;
    }
  };
  const int t = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int w = 1; w < t; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return results;
}

int report(const std::vector<Identity>& ids, const std::vector<JobResult>& results,
           const Options& o, const QExponent& order, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> idx(ids.size());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return ids[a].id < ids[b].id; });
  const bool machine = o.output == "machine";
  std::size_t failed = 0, run = 0;
  std::set<std::string> seen;
  for (std::size_t j : idx) {
    const auto& r = results[j];
    if (!r.done || !seen.insert(ids[j].id).second) continue;
    ++run;
    if (!r.pass) ++failed;
    const std::string ms = o.no_timing ? "-" : fmt_ms(r.ms);
    if (machine) {
      out << ids[j].id << '\t' << (r.pass ? "PASS" : "FAIL") << '\t' << order_text(order) << '\t'
          << ms << '\n';
      if (!r.pass) err << ids[j].id << ": " << r.detail << '\n';
    } else {
      out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(22) << ids[j].id
          << " order " << order_text(order);
      if (!o.no_timing) out << "  " << ms << " ms";
      if (!r.pass) out << "  " << r.detail;
      out << '\n';
    }
  }
  if (!machine) {
    const auto skipped = std::count_if(results.begin(), results.end(),
                                       [](const JobResult& r) { return !r.done; });
    out << run - failed << " passed, " << failed << " failed";
    if (skipped > 0) out << ", " << skipped << " skipped";
    out << '\n';
  }
  return failed == 0 ? kExitPass : kExitFail;
}

int cmd_verify(const Options& o, const std::vector<std::string>& names,
               std::optional<std::int64_t> k, std::optional<std::int64_t> i, std::int64_t k_max,
               std::ostream& out, std::ostream& err) {
  const QExponent order = order_of(o);
  const Catalog cat = load_catalog(o);
  const auto ids = resolve_targets(cat, names, k, i, k_max, o.denom);
  const auto results = run_jobs(ids.size(), o.threads, o.fail_fast, [&](std::size_t j) {
    const VerificationReport v = verify(ids[j], order);
    return JobResult{true, v.equal, 0, mismatch_text(v.first_mismatch)};
  });
  return report(ids, results, o, order, out, err);
}

int cmd_crosscheck(const Options& o, const std::vector<std::string>& names, std::ostream& out,
                   std::ostream& err) {
  const QExponent order = order_of(o);
  const Catalog cat = load_catalog(o);
  std::vector<Identity> ids;
  for (auto& id : resolve_targets(cat, names, std::nullopt, std::nullopt, 0, o.denom)) {
    const bool routed = !id.route.empty() || id.bailey;
    if (routed) {
      ids.push_back(std::move(id));
    } else if (names.size() == 1 && names[0] != "all") {
      throw UsageError("'" + id.id + "' has no reduction route");
    }
  }
  const auto results = run_jobs(ids.size(), o.threads, o.fail_fast, [&](std::size_t j) {
    const CrossCheckReport c = cross_check_reduction(ids[j], order);
    std::string detail = c.route;
    if (!c.direct_vs_reduced.equal) detail += "; direct vs reduced " + mismatch_text(c.direct_vs_reduced.first_mismatch);
    if (!c.reduced_vs_rhs.equal) detail += "; reduced vs rhs " + mismatch_text(c.reduced_vs_rhs.first_mismatch);
    if (!c.direct_vs_rhs.equal) detail += "; direct vs rhs " + mismatch_text(c.direct_vs_rhs.first_mismatch);
    return JobResult{true, c.ok(), 0, detail};
  });
  return report(ids, results, o, order, out, err);
}

int cmd_expand(const Options& o, const std::string& name, std::optional<std::int64_t> k,
               std::optional<std::int64_t> i, const std::string& side, std::ostream& out) {
  const QExponent order = order_of(o);
  const Catalog cat = load_catalog(o);
  Identity id;
  if (is_family(name)) {
    if (!k) throw UsageError("family '" + name + "' needs --k");
    try {
      id = instantiate_family(name, *k, i.value_or(0), o.denom);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  } else {
    try {
      id = cat.resolve(name);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  out << dump(side == "lhs" ? eval_lhs(id, order) : eval_rhs(id, order));
  return kExitPass;
}

int cmd_eval(const Options& o, const std::string& expr, std::ostream& out) {
  const QExponent order = order_of(o);
  ProductSum p;
  try {
    p = parse_product(expr, o.denom);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  out << dump(eval_product(p, order));
  return kExitPass;
}

BaileyPair chain_or_usage(const std::string& text, int denom) {
  try {
    return build_chain(text, denom);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

int cmd_bailey_verify(const Options& o, const std::string& chain, std::int64_t n,
                      std::ostream& out) {
  const QExponent order = order_of(o);
  const BaileyPair p = chain_or_usage(chain, o.denom);
  const PairReport r = verify_pair(p, n, order);
  out << (r.ok ? "PASS  " : "FAIL  ") << chain << "  n <= " << n << " order " << order_text(order);
  for (const auto& c : r.checks) {
    if (!c.report.equal) {
      out << "  n = " << c.n << " " << mismatch_text(c.report.first_mismatch);
      break;
    }
  }
  out << '\n';
  return r.ok ? kExitPass : kExitFail;
}

int cmd_bailey_chain(const Options& o, const std::string& chain, const std::string& equals,
                     const std::string& against, const std::string& show, std::int64_t n,
                     std::ostream& out) {
  const QExponent order = order_of(o);
  const BaileyPair p = chain_or_usage(chain, o.denom);
  const bool show_alpha = show.find("alpha") != std::string::npos;
  const bool show_beta = show.find("beta") != std::string::npos;
  for (std::int64_t j = 0; (show_alpha || show_beta) && j <= n; ++j) {
    if (show_alpha) out << "alpha " << j << '\n' << dump(p.alpha_at(j, order));
    if (show_beta) out << "beta " << j << '\n' << dump(p.beta_at(j, order));
  }
  bool ok = true;
  std::string what;
  if (!equals.empty()) {
    const BaileyPair q = chain_or_usage(equals, o.denom);
    what = "equals " + equals;
    if (p.a.coeff != q.a.coeff || p.a.exp != q.a.exp) {
      ok = false;
      what += "  (a differs: " + p.a.str() + " vs " + q.a.str() + ")";
    }
    for (std::int64_t j = 0; ok && j <= n; ++j) {
      const auto ra = equal_up_to(p.alpha_at(j, order), q.alpha_at(j, order), order);
      const auto rb = equal_up_to(p.beta_at(j, order), q.beta_at(j, order), order);
      if (!ra.equal || !rb.equal) {
        ok = false;
        what += "  n = " + std::to_string(j) + " " +
                mismatch_text(ra.equal ? rb.first_mismatch : ra.first_mismatch);
      }
    }
  } else if (!against.empty()) {
    const Catalog cat = load_catalog(o);
    Identity id;
    try {
      id = cat.resolve(against);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    if (!id.bailey) throw UsageError("'" + against + "' has no Bailey route");
    id.bailey->chain = chain;
    id.route.clear();
    const CrossCheckReport c = cross_check_reduction(id, order);
    ok = c.reduced_vs_rhs.equal && c.direct_vs_rhs.equal;
    what = "limit identity against " + against;
    if (!c.reduced_vs_rhs.equal) what += "  " + mismatch_text(c.reduced_vs_rhs.first_mismatch);
  } else {
    const PairReport r = verify_pair(p, n, order);
    const Sides s = limit_identity(p, order);
    ok = r.ok && s.report.equal;
    what = "pair relation n <= " + std::to_string(n) + " and limit identity";
    if (!s.report.equal) what += "  " + mismatch_text(s.report.first_mismatch);
  }
  out << (ok ? "PASS  " : "FAIL  ") << chain << "  " << what << '\n';
  return ok ? kExitPass : kExitFail;
}

int cmd_lemma23(const Options& o, std::int64_t k_max, std::ostream& out) {
  const QExponent order = order_of(o);
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const Sides s = lemma23_check(k, order);
    if (!s.report.equal) {
      out << "FAIL  lemma23 k = " << k << "  " << mismatch_text(s.report.first_mismatch) << '\n';
      return kExitFail;
    }
  }
  out << "PASS  lemma23 k <= " << k_max << " order " << order_text(order) << '\n';
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact q-series verification of Nahm sum identities", "nahm"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--order", o.order, "truncation order in powers of q (default 30)");
  app.add_option("--d-lattice", o.denom, "exponent lattice 1/D")->check(CLI::PositiveNumber);
  app.add_option("--catalog", o.catalog, "catalog file instead of the built-in one")
      ->envname("NAHM_CATALOG");
  app.add_option("--output", o.output, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--threads", o.threads, "parallel jobs")->check(CLI::PositiveNumber);
  app.add_flag("--fail-fast", o.fail_fast, "stop after the first failure");
  app.add_flag("--no-timing", o.no_timing, "print '-' instead of wall times");

  std::vector<std::string> names;
  std::optional<std::int64_t> k, i;
  std::int64_t k_max = 4;
  auto* verify_cmd = app.add_subcommand("verify", "check identities to the given order");
  verify_cmd->add_option("ids", names, "ids, 'all', 'families', or a family name")->required();
  verify_cmd->add_option("--k", k, "family parameter k");
  verify_cmd->add_option("--i", i, "family parameter i (or a)");
  verify_cmd->add_option("--k-max", k_max, "largest k when expanding families");

  std::vector<std::string> cross_names;
  auto* cross_cmd =
      app.add_subcommand("crosscheck", "direct sum, reduced sum and product must agree");
  cross_cmd->add_option("ids", cross_names, "ids or 'all'")->required();

  std::string expand_id, side = "lhs";
  std::optional<std::int64_t> ek, ei;
  auto* expand_cmd = app.add_subcommand("expand", "print one side as a series dump");
  expand_cmd->add_option("id", expand_id)->required();
  expand_cmd->add_option("--side", side)->check(CLI::IsMember({"lhs", "rhs"}));
  expand_cmd->add_option("--k", ek);
  expand_cmd->add_option("--i", ei);

  std::string expr;
  auto* eval_cmd = app.add_subcommand("eval", "expand a product expression");
  eval_cmd->add_option("expr", expr)->required();

  auto* bailey_cmd = app.add_subcommand("bailey", "Bailey pairs and chains");
  bailey_cmd->require_subcommand(1);
  std::string chain, equals, against;
  std::int64_t n = 10;
  std::string show;
  auto* bverify = bailey_cmd->add_subcommand("verify", "check the defining relation");
  bverify->add_option("chain", chain)->required();
  bverify->add_option("--n", n, "largest index checked");
  auto* bchain = bailey_cmd->add_subcommand("chain", "build a chain and check it");
  bchain->add_option("chain", chain)->required();
  bchain->add_option("--equals", equals, "compare with another chain or pair");
  bchain->add_option("--against", against, "limit identity against a catalog id");
  bchain->add_option("--show", show, "print alpha, beta or both (alpha,beta)")
      ->expected(0, 1)
      ->default_str("alpha,beta");
  bchain->add_option("--n", n, "largest index");
  std::int64_t lemma_k = 40;
  auto* blemma = bailey_cmd->add_subcommand("lemma23", "the terminating pair sum");
  blemma->add_option("--k", lemma_k);

  std::string tag;
  auto* list_cmd = app.add_subcommand("list", "fixed ids (and family names)");
  list_cmd->add_option("--tag", tag);
  auto* fam_cmd = app.add_subcommand("families", "family names and parameter ranges");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify_cmd) return cmd_verify(o, names, k, i, k_max, out, err);
    if (*cross_cmd) return cmd_crosscheck(o, cross_names, out, err);
    if (*expand_cmd) return cmd_expand(o, expand_id, ek, ei, side, out);
    if (*eval_cmd) return cmd_eval(o, expr, out);
    if (*bverify) return cmd_bailey_verify(o, chain, n, out);
    if (*bchain) {
      if (bchain->count("--show") > 0 && show.empty()) show = "alpha,beta";
      return cmd_bailey_chain(o, chain, equals, against, show, n, out);
    }
    if (*blemma) return cmd_lemma23(o, lemma_k, out);
    if (*list_cmd) {
      for (const auto& id : load_catalog(o).list(tag)) out << id << '\n';
      return kExitPass;
    }
    if (*fam_cmd) {
      for (const auto& f : families()) out << f.name << "\t" << f.domain << '\n';
      return kExitPass;
    }
  } catch (const UsageError& e) {
    err << "nahm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "nahm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "nahm: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace nahm
