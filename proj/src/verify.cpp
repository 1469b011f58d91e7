#include "subring/verify.hpp"

#include "subring/symbolic.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>

namespace subring {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

bool stated_form_known_to_differ(int n, int k, int e) {
  if (n < 5) return false;
  return (k == 2 && e >= 3) || (k == 3 && e >= 4);
}

namespace {

std::string str(const Int& v) { return v.str(); }

Check check(std::string id, std::string anchor, std::string lhs, std::string rhs, bool ok, std::string note = {}) {
  return {std::move(id), std::move(anchor), std::move(lhs), std::move(rhs),
          ok ? CheckStatus::pass : CheckStatus::fail, std::move(note)};
}

std::string key_id(int n, Entry p, int e) {
  return "n=" + std::to_string(n) + "/p=" + std::to_string(p) + "/e=" + std::to_string(e);
}

std::vector<Entry> primes_or(const VerifyScope& s, std::vector<Entry> fallback) {
  return s.primes.empty() ? fallback : s.primes;
}

struct Range {
  int lo, hi;
};

// Ranges shared between the suites and enumerated_keys().
struct Plan {
  Range cocyclic_n, cocyclic_e;
  std::vector<Entry> cocyclic_p;
  Range corank_n, corank_e;
  std::vector<Entry> corank_p;
  int local_e3, local_e4;
  std::vector<Entry> local_p;
  std::vector<std::pair<Entry, int>> cotype;  // (p, largest total exponent)
  int series_e;
  int oracle_e;
  int random_trials;
  std::int64_t bijection_x;
};

int floor_log(std::int64_t x, Entry p) {
  int t = 0;
  for (std::int64_t q = p; q <= x; q *= p) ++t;
  return t;
}

Plan plan_for(const VerifyScope& s) {
  Plan pl;
  pl.cocyclic_n = {2, s.small ? 5 : 6};
  pl.cocyclic_e = {1, s.small ? 4 : 6};
  pl.cocyclic_p = primes_or(s, s.small ? std::vector<Entry>{2, 3} : std::vector<Entry>{2, 3, 5});
  pl.corank_n = {3, s.small ? 5 : 6};
  pl.corank_e = {2, s.small ? 4 : 6};
  pl.corank_p = primes_or(s, s.small ? std::vector<Entry>{2} : std::vector<Entry>{2, 3});
  pl.local_e3 = s.small ? 5 : 8;
  pl.local_e4 = s.small ? 4 : 6;
  pl.local_p = primes_or(s, s.small ? std::vector<Entry>{2, 3} : std::vector<Entry>{2, 3, 5});
  for (Entry p : primes_or(s, {2, 3})) {
    std::int64_t cap = s.max_index ? *s.max_index
                       : p == 2    ? (s.small ? 64 : 1024)
                       : p == 3    ? (s.small ? 81 : 729)
                                   : ipow64(p, s.small ? 2 : 4);
    if (s.stretch && p == 2) cap = std::max<std::int64_t>(cap, 1 << 14);
    pl.cotype.emplace_back(p, floor_log(cap, p));
  }
  pl.series_e = s.small ? 6 : 8;
  pl.oracle_e = s.small ? 3 : 5;
  pl.random_trials = s.small ? 1000 : 10000;
  pl.bijection_x = s.small ? 100 : 200;
  return pl;
}

class Runner {
 public:
  Runner(const VerifyScope& s, CountLedger& l) : scope_(s), ledger_(l), plan_(plan_for(s)) {}

  std::vector<Check> run(const std::string& suite) {
    dispatch(suite);
    return std::move(out_);
  }

 private:
  void dispatch(const std::string& suite) {
    if (suite == "cocyclic") cocyclic();
    else if (suite == "corank23") corank23();
    else if (suite == "local-factors") local_factors();
    else if (suite == "cotype-z4") cotype_z4();
    else if (suite == "identities") identities();
    else if (suite == "structure") structure();
    else if (suite == "oracle") oracle();
    else if (suite == "constants") constants();
    else if (suite == "rpstar") rpstar();
    else if (suite == "stretch") stretch();
    else if (suite == "all")
      for (const auto& s : suite_names()) dispatch(s);
    else throw std::invalid_argument("unknown suite: " + suite);
  }

  CensusRecord rec(int n, Entry p, int e) { return census({n, p, e, std::nullopt}, ledger_, scope_.census); }

  void cocyclic() {
    for (int n = plan_.cocyclic_n.lo; n <= plan_.cocyclic_n.hi; ++n)
      for (Entry p : plan_.cocyclic_p)
        for (int e = plan_.cocyclic_e.lo; e <= plan_.cocyclic_e.hi; ++e) {
          Int h = rec(n, p, e).h[1];
          Int want = binomial(static_cast<unsigned>(n), 2);
          out_.push_back(check("cocyclic/" + key_id(n, p, e), "corank-1 subrings of index p^e number n choose 2",
                               str(h), str(want), h == want));
        }
  }

  void corank23() {
    for (int k : {2, 3})
      for (int n = std::max(plan_.corank_n.lo, k + 1); n <= plan_.corank_n.hi; ++n)
        for (Entry p : plan_.corank_p)
          for (int e = std::max(plan_.corank_e.lo, k); e <= plan_.corank_e.hi; ++e) {
            Int h = rec(n, p, e).h[static_cast<std::size_t>(k)];
            Int stated = formula_h(n, k, p, e);
            Int direct = formula_h_direct_sum(n, k, p, e);
            std::string tail = "k=" + std::to_string(k) + "/" + key_id(n, p, e);
            out_.push_back(check("corank23/stated/" + tail,
                                 k == 2 ? "corank-2 count equals a(n) g_3(p^e) + b(n)(e-1)"
                                        : "corank-3 count equals c(n) g_4(p^e) + d(n) sum (j-1) g_3(p^j)",
                                 str(h), str(stated), h == stated,
                                 h == stated ? "" : "census differs from the stated closed form"));
            out_.push_back(check("corank23/direct-sum/" + tail,
                                 "corank count assembled from irreducible direct summands", str(h), str(direct),
                                 h == direct));
          }
  }

  void local_factors() {
    for (int n : {3, 4}) {
      int top = n == 3 ? plan_.local_e3 : plan_.local_e4;
      SeriesTable s = expand(catalog("zeta_Z" + std::to_string(n)), SeriesBounds::univariate(top));
      for (Entry p : plan_.local_p)
        for (int e = 0; e <= top; ++e) {
          Int f = rec(n, p, e).f;
          Int want = s.at_prime(e, Int(p));
          out_.push_back(check("local-factors/" + key_id(n, p, e),
                               "subring count of index p^e equals the local zeta factor coefficient", str(f),
                               str(want), f == want));
        }
    }
  }

  void cotype_z4() {
    int top = 0;
    for (const auto& [p, t] : plan_.cotype) top = std::max(top, t);
    SeriesBounds b{{top, top, top}, top};
    SeriesTable f4 = expand(catalog("F_4"), b);
    // Census values per exponent tuple, for the cross-prime comparison.
    std::map<std::array<int, 3>, std::map<Entry, Int>> seen;
    for (const auto& [p, t_max] : plan_.cotype)
      for (int t = 0; t <= t_max; ++t) {
        CensusRecord r = rec(4, p, t);
        Int total = 0;
        for (const Composition& c : compositions(t, 3, false)) {
          std::array<int, 3> a{c[0], c[1], c[2]};
          // Tuples that are not a divisibility chain are not cotypes; F_4 must vanish there.
          Int got = 0;
          if (a[0] >= a[1] && a[1] >= a[2])
            got = r.cotype_count(Cotype({ipow(Int(p), static_cast<unsigned>(a[0])),
                                         ipow(Int(p), static_cast<unsigned>(a[1])),
                                         ipow(Int(p), static_cast<unsigned>(a[2]))}));
          Int want = f4.at_prime(a, Int(p));
          total += want;
          seen[a][p] = got;
          out_.push_back(check("cotype-z4/p=" + std::to_string(p) + "/" + c.str(),
                               "cotype census of Z^4 equals the F_4 coefficient", str(got), str(want), got == want));
        }
        out_.push_back(check("cotype-z4/p=" + std::to_string(p) + "/total=" + std::to_string(t),
                             "F_4 coefficients of total degree e sum to f_4(p^e)", str(total), str(r.f),
                             total == r.f));
      }
    // Where the coefficient has degree <= 1 in p, the line through the
    // census values at p = 2 and p = 3 is that polynomial.
    for (const auto& [a, by_prime] : seen) {
      if (!by_prime.count(2) || !by_prime.count(3)) continue;
      MPoly poly = f4.at(a);
      if (!poly.is_zero() && (poly.max_degree(Var::p) > 1 || poly.min_degree(Var::p) < 0)) continue;
      Int slope = by_prime.at(3) - by_prime.at(2);
      MPoly line = MPoly(slope) * MPoly::var(Var::p) + MPoly(Int(by_prime.at(2) - 2 * slope));
      Composition c(std::vector<int>{a[0], a[1], a[2]});
      out_.push_back(check("cotype-z4/linear/" + c.str(), "census values at p = 2, 3 fit the F_4 coefficient",
                           line.str(), poly.str(), line == poly));
    }
  }

  void identities() {
    auto fe = [&](const std::string& id, const std::string& mult) {
      bool ok = functional_equation_check(catalog(id), parse_poly(mult));
      out_.push_back(check("identities/functional-equation/" + id,
                           "local factor at reciprocal variables equals multiplier times itself",
                           id + "(1/p;1/x,1/y,1/z)", "(" + mult + ")*" + id, ok));
    };
    fe("F_2", "-x");
    fe("F_3", "p*x*y");
    fe("F_4", "-p^3*x*y*z");

    auto sp = [&](const std::string& id, const std::string& what, const std::string& src, Specialization s,
                  const RatFunc& target, const std::string& target_name) {
      RatFunc lhs = specialize(catalog(src), s);
      out_.push_back(check("identities/" + id, what, lhs.str(), target_name, lhs == target));
    };
    sp("F_3-diagonal", "F_3(p;x,x) equals the Z^3 local factor", "F_3", {Target::keep, Target::to_x, Target::keep},
       catalog("zeta_Z3"), "zeta_Z3");
    sp("F_4-diagonal", "F_4(p;x,x,x) equals the Z^4 local factor", "F_4",
       {Target::keep, Target::to_x, Target::to_x}, catalog("zeta_Z4"), "zeta_Z4");
    sp("F_4-corank1", "F_4(p;x,0,0) equals (1+5x)/(1-x)", "F_4", {Target::keep, Target::zero, Target::zero},
       RatFunc(parse_poly("1 + 5*x"), parse_poly("1 - x")), "(1+5x)/(1-x)");
    sp("F_4-corank2", "F_4(p;x,x,0) equals the corank <= 2 factor of Z^4", "F_4",
       {Target::keep, Target::to_x, Target::zero}, catalog("corank2_Z4"), "corank2_Z4");
    out_.push_back(check("identities/corank2-limit-form", "corank <= 2 factor of Z^4 in both stored forms",
                         catalog("corank2_Z4").str(), catalog("corank2_Z4_limit").str(),
                         catalog("corank2_Z4") == catalog("corank2_Z4_limit")));

    int top = plan_.series_e;
    SeriesTable g = expand(catalog("B_2"), SeriesBounds::univariate(top));
    for (int n = 3; n <= 6; ++n) {
      SeriesTable s = expand(catalog("corank2(" + std::to_string(n) + ")"), SeriesBounds::univariate(top));
      MPoly m(binomial(static_cast<unsigned>(n), 2));
      int bad = -1;
      for (int e = 0; e <= top && bad < 0; ++e) {
        MPoly want = e == 0 ? MPoly(1) : e == 1 ? m : m + MPoly(coeff_a(n)) * g.at(e) + MPoly(coeff_b(n) * (e - 1));
        if (!(s.at(e) == want)) bad = e;
      }
      out_.push_back(check("identities/corank2-series/n=" + std::to_string(n),
                           "corank <= 2 local factor coefficients are 1, n choose 2, then the corank-2 closed form "
                           "plus n choose 2",
                           bad < 0 ? "coefficients 0.." + std::to_string(top) + " agree"
                                   : "first disagreement at e=" + std::to_string(bad),
                           "closed form", bad < 0));
    }
  }

  void structure() {
    for (const CensusKey& k : enumerated_keys(scope_)) {
      CensusRecord r = rec(k.n, k.p, k.e);
      auto errs = r.consistency_errors();
      const Violations& v = r.violations;
      char buf[160];
      std::snprintf(buf, sizeof buf, "support=%llu zero-one=%llu exactly-one=%llu last-column=%llu divisibility=%llu",
                    static_cast<unsigned long long>(v.support_corank), static_cast<unsigned long long>(v.zero_one),
                    static_cast<unsigned long long>(v.exactly_one), static_cast<unsigned long long>(v.last_column),
                    static_cast<unsigned long long>(v.divisibility));
      out_.push_back(check("structure/violations/" + key_id(k.n, k.p, k.e),
                           "every emitted matrix obeys the support, 0/1, exactly-one-1, last-column and "
                           "divisibility rules",
                           buf, "all zero", v.total() == 0 && errs.empty(), errs.empty() ? "" : errs.front()));
      std::string worst;
      for (int c = 1; c < k.n; ++c) {
        Int g = rec(c + 1, k.p, k.e).g;
        Int base = binomial(static_cast<unsigned>(k.n - 1), static_cast<unsigned>(c)) * g;
        Int h = r.h[static_cast<std::size_t>(c)];
        if (h < base || h > ipow(Int(k.n - c), static_cast<unsigned>(c)) * base)
          worst += (worst.empty() ? "" : ", ") + ("k=" + std::to_string(c));
      }
      out_.push_back(check("structure/sandwich/" + key_id(k.n, k.p, k.e),
                           "C(n-1,k) g_{k+1} <= h_{n,k} <= (n-k)^k C(n-1,k) g_{k+1}",
                           worst.empty() ? "within bounds for every k" : "outside for " + worst, "within bounds",
                           worst.empty()));
    }
  }

  void oracle() {
    for (int n = 2; n <= 4; ++n)
      for (Entry p : primes_or(scope_, {2, 3}))
        for (int e = 0; e <= plan_.oracle_e; ++e) {
          EnumSpec s;
          s.n = n;
          s.p = p;
          s.e = e;
          s.mode = EnumMode::naive;
          auto naive = enumerate_all(s, scope_.census.enumeration);
          s.mode = EnumMode::pruned;
          auto pruned = enumerate_all(s, scope_.census.enumeration);
          out_.push_back(check("oracle/naive-vs-pruned/" + key_id(n, p, e),
                               "pruned search emits exactly the subring matrices found by exhaustive search",
                               std::to_string(pruned.size()) + " matrices", std::to_string(naive.size()) + " matrices",
                               naive == pruned));
        }
    std::mt19937_64 rng(20240611);
    int agree = 0;
    for (int trial = 0; trial < plan_.random_trials; ++trial) {
      Index n = 1 + trial % 5;
      Matrix<std::int64_t> m = Matrix<std::int64_t>::Zero(n, n);
      for (Index i = 0; i < n; ++i) {
        m(i, i) = std::uniform_int_distribution<std::int64_t>(1, 15)(rng);
        for (Index j = i + 1; j < n; ++j)
          m(i, j) = std::uniform_int_distribution<std::int64_t>(0, m(i, i) - 1)(rng);
      }
      HnfMatrix<std::int64_t> h(m);
      if (smith_normal_form(h) == snf_oracle_minor_gcds(h)) ++agree;
    }
    out_.push_back(check("oracle/snf-vs-minor-gcds", "Smith form by elimination equals the minor-gcd quotients",
                         std::to_string(agree) + " agree", std::to_string(plan_.random_trials) + " random HNF matrices",
                         agree == plan_.random_trials));
  }

  void constants() {
    for (const auto& id : constant_ids()) {
      ConstantCheck c = compute_constant(id, scope_.constants);
      char rhs[96];
      std::snprintf(rhs, sizeof rhs, "%.10g (%s tolerance %g)", c.expected, c.relative ? "relative" : "absolute",
                    c.tolerance);
      out_.push_back(check("constants/" + id, c.description, c.computed.str(), rhs, c.passed()));
    }
  }

  void rpstar() {
    for (int n : {3, 4, 5})
      for (Entry p : primes_or(scope_, {2, 3})) {
        CensusRecord r = rec(n, p, n - 1);
        Cotype star(std::vector<Int>(static_cast<std::size_t>(n - 1), Int(p)));
        Int c = r.cotype_count(star);
        out_.push_back(check("rpstar/" + key_id(n, p, n - 1), "exactly one subring has cotype (p,...,p)", str(c), "1",
                             c == 1));
      }
  }

  void stretch() {
    CensusOptions o = scope_.census;
    o.enumeration.node_budget = scope_.stretch_budget;
    try {
      Int f = census({6, 2, 7, std::nullopt}, ledger_, o).f;
      out_.push_back(check("stretch/z6-lower", "at least p^6 subrings of Z^6 have index p^7 (p = 2)", str(f), ">= 64",
                           f >= 64));
    } catch (const BudgetExceeded& ex) {
      out_.push_back({"stretch/z6-lower", "at least p^6 subrings of Z^6 have index p^7 (p = 2)", "-", ">= 64",
                      CheckStatus::skipped, ex.what()});
    }

    std::int64_t X = plan_.bijection_x;
    CensusOptions fill = scope_.census;
    ExtendedTable t = multiplicative_extend(3, X, ledger_, &fill);
    Cotype klein({Int(2), Int(2)});
    Int lhs = 0, rhs = 0;
    // Index k = 2^a m with m odd; the 2-part of Z^3/R is (Z/2)^2 exactly when
    // the 2-local subring has cotype (2,2), which forces a = 2.
    for (std::int64_t k = 1; k <= X; ++k) {
      std::int64_t m = k;
      int a = 0;
      while (m % 2 == 0) {
        m /= 2;
        ++a;
      }
      Int local = rec(3, 2, a).cotype_count(klein);
      lhs += local * t.f[static_cast<std::size_t>(m)];
    }
    for (std::int64_t k = 1; k <= X / 4; k += 2) rhs += t.f[static_cast<std::size_t>(k)];
    out_.push_back(check("stretch/sylow-bijection/X=" + std::to_string(X),
                         "subrings of Z^3 with 2-part (Z/2)^2 and index <= X match odd-index subrings of index <= X/4",
                         str(lhs), str(rhs), lhs == rhs && t.complete()));
  }

  const VerifyScope& scope_;
  CountLedger& ledger_;
  Plan plan_;
  std::vector<Check> out_;
};

}  // namespace

std::vector<std::string> suite_names() {
  return {"cocyclic", "corank23", "local-factors", "cotype-z4", "identities",
          "structure", "oracle",  "constants",     "rpstar",    "stretch"};
}

std::vector<CensusKey> enumerated_keys(const VerifyScope& scope) {
  Plan pl = plan_for(scope);
  std::set<CensusKey> keys;
  auto add = [&](int n, Entry p, int e) { keys.insert({n, p, e, std::nullopt}); };
  for (int n = pl.cocyclic_n.lo; n <= pl.cocyclic_n.hi; ++n)
    for (Entry p : pl.cocyclic_p)
      for (int e = pl.cocyclic_e.lo; e <= pl.cocyclic_e.hi; ++e) add(n, p, e);
  for (int n = pl.corank_n.lo; n <= pl.corank_n.hi; ++n)
    for (Entry p : pl.corank_p)
      for (int e = pl.corank_e.lo; e <= pl.corank_e.hi; ++e) add(n, p, e);
  for (Entry p : pl.local_p) {
    for (int e = 0; e <= pl.local_e3; ++e) add(3, p, e);
    for (int e = 0; e <= pl.local_e4; ++e) add(4, p, e);
  }
  for (const auto& [p, t] : pl.cotype)
    for (int e = 0; e <= t; ++e) add(4, p, e);
  return {keys.begin(), keys.end()};
}

std::vector<Check> run_suite(const std::string& suite, const VerifyScope& scope, CountLedger& ledger) {
  return Runner(scope, ledger).run(suite);
}

}  // namespace subring
