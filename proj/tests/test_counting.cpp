#include "subring/counting.hpp"
#include "subring/symbolic.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>

using namespace subring;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("subring_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  return d;
}

// Cotype census from naive enumeration with cotypes taken from minor gcds.
std::map<Cotype, Int> oracle_cotypes(int n, Entry p, int e) {
  EnumSpec s;
  s.n = n;
  s.p = p;
  s.e = e;
  s.mode = EnumMode::naive;
  std::map<Cotype, Int> out;
  enumerate(s, [&](const EnumMatrix& m) { out[cotype_from_snf(snf_oracle_minor_gcds(m.hnf().cast<Int>()))] += 1; });
  return out;
}

Int sigma(std::int64_t k) {
  Int s = 0;
  for (std::int64_t d = 1; d <= k; ++d)
    if (k % d == 0) s += d;
  return s;
}

}  // namespace

TEST_CASE("census basics") {
  for (Entry p : {2, 3, 5}) {
    const auto r = compute_census({4, p, 1, std::nullopt});
    CHECK(r.f == 6);
    CHECK(r.h[1] == 6);
    CHECK(r.h_tilde(1) == 6);
    CHECK(r.consistency_errors().empty());
  }
  for (int n = 1; n <= 5; ++n) {
    const auto r = compute_census({n, 3, 0, std::nullopt});
    CHECK(r.f == 1);
    REQUIRE(r.cotypes.size() == 1);
    for (const auto& a : r.cotypes.begin()->first.alphas) CHECK(a == 1);
    CHECK(r.consistency_errors().empty());
  }
  const auto z3 = expand(catalog("zeta_Z3"), SeriesBounds::univariate(3));
  CHECK(compute_census({3, 2, 3, std::nullopt}).f == z3.at_prime(3, 2));
}

TEST_CASE("cotype census matches the naive minor-gcd oracle") {
  for (int n = 2; n <= 4; ++n)
    for (Entry p : {2, 3})
      for (int e = 0; e <= (n == 4 ? 4 : 5); ++e) {
        const auto r = compute_census({n, p, e, std::nullopt});
        CHECK(r.cotypes == oracle_cotypes(n, p, e));
        CHECK(r.violations.total() == 0);
        CHECK(r.consistency_errors().empty());
      }
}

TEST_CASE("corank-restricted census agrees with the full census") {
  for (int e = 1; e <= 5; ++e) {
    const auto full = compute_census({5, 2, e, std::nullopt});
    for (int k = 0; k < 5; ++k) {
      const auto r = compute_census({5, 2, e, k});
      CHECK(r.f == full.h[static_cast<std::size_t>(k)]);
      CHECK(r.consistency_errors().empty());
    }
  }
}

TEST_CASE("census invariants") {
  for (int n = 3; n <= 5; ++n)
    for (Entry p : {2, 3}) {
      const auto r = compute_census({n, p, n - 1, std::nullopt});
      CHECK(r.h_tilde(n - 1) == r.f);
      CHECK(r.cotype_count(Cotype(std::vector<Int>(static_cast<std::size_t>(n - 1), Int(p)))) == 1);
      CHECK(r.g <= r.h[static_cast<std::size_t>(n - 1)]);
    }
}

TEST_CASE("irreducible tallies agree with g3 and g4") {
  for (Entry p : {2, 3})
    for (int e = 0; e <= 6; ++e) {
      CHECK(compute_census({3, p, e, std::nullopt}).g == g3(p, e));
      if (e <= 5) CHECK(compute_census({4, p, e, std::nullopt}).g == g4(p, e));
    }
}

TEST_CASE("closed forms") {
  CHECK(formula_h(5, 1, 7, 3) == 10);
  CHECK(formula_h(4, 2, 2, 2) == 7);
  CHECK(formula_h(4, 2, 3, 2) == 7);
  CHECK(formula_h(4, 3, 2, 3) == g4(2, 3));
  CHECK(g4(5, 3) == 1);
  CHECK(g3(2, 4) == 7);
  CHECK_THROWS_AS(formula_h(4, 2, 2, 1), std::domain_error);
  CHECK_THROWS_AS(formula_h(3, 3, 2, 4), std::domain_error);
  CHECK_THROWS_AS(formula_h(4, 4, 2, 4), std::domain_error);
  CHECK_THROWS_AS(formula_h(4, 1, 4, 4), std::domain_error);
  for (int n = 2; n <= 4; ++n)
    for (Entry p : {2, 3})
      for (int e = 1; e <= 5; ++e) {
        const auto r = compute_census({n, p, e, std::nullopt});
        for (int k = 1; k <= 3; ++k)
          if (n > k && e >= k) CHECK(r.h[static_cast<std::size_t>(k)] == formula_h(n, k, p, e));
      }
}

TEST_CASE("stated corank-two and corank-three forms overcount from n = 5") {
  const auto r = compute_census({5, 2, 3, std::nullopt});
  CHECK(r.h[2] == 60);
  CHECK(formula_h(5, 2, 2, 3) == 63);
  CHECK(compute_census({5, 3, 2, std::nullopt}).h[2] == formula_h(5, 2, 3, 2));
  CHECK(compute_census({6, 2, 4, std::nullopt}).h[3] == 390);
  CHECK(formula_h(6, 3, 2, 4) == 630);
}

TEST_CASE("direct-sum closed forms match the census") {
  for (int n = 1; n <= 6; ++n)
    for (Entry p : {2, 3, 5})
      for (int e = 0; e <= (n <= 4 ? 6 : 5); ++e) {
        const auto r = compute_census({n, p, e, std::nullopt});
        for (int k = 1; k <= 3; ++k) {
          const Int expect = k < n ? r.h[static_cast<std::size_t>(k)] : Int(0);
          CHECK(formula_h_direct_sum(n, k, p, e) == expect);
        }
      }
  for (int n = 3; n <= 8; ++n)
    for (int e = 3; e <= 7; ++e) {
      CHECK((formula_h(n, 2, 2, e) == formula_h_direct_sum(n, 2, 2, e)) == (n <= 4));
      if (n >= 4) CHECK((formula_h(n, 3, 2, e) == formula_h_direct_sum(n, 3, 2, e)) == (n == 4 || e == 3));
    }
}

TEST_CASE("sandwich bounds hold") {
  for (int n = 3; n <= 5; ++n)
    for (int e = 1; e <= 4; ++e) {
      const auto r = compute_census({n, 2, e, std::nullopt});
      for (int k = 1; k < n; ++k) {
        const Int g = compute_census({k + 1, 2, e, std::nullopt}).g;
        const Int base = binomial(static_cast<unsigned>(n - 1), static_cast<unsigned>(k)) * g;
        CHECK(base <= r.h[static_cast<std::size_t>(k)]);
        CHECK(r.h[static_cast<std::size_t>(k)] <= ipow(Int(n - k), static_cast<unsigned>(k)) * base);
      }
    }
}

TEST_CASE("record serialization round-trips") {
  const auto r = compute_census({4, 3, 3, std::nullopt});
  const auto back = record_from_json(record_to_json(r));
  CHECK(back.same_counts(r));
  CHECK(back.rules == r.rules);
  CHECK(back.nodes == r.nodes);
  CHECK(checksum(back) == checksum(r));
  std::string tampered = record_to_json(r);
  tampered.replace(tampered.find("\"f\": \""), 7, "\"f\": \"9");
  CHECK_THROWS_AS(record_from_json(tampered), std::invalid_argument);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("ledger persists, reloads and rejects tampering") {
  const auto dir = scratch_dir("ledger");
  {
    CountLedger ledger(dir);
    const auto r = census({3, 2, 4, std::nullopt}, ledger);
    CHECK(r.f == compute_census({3, 2, 4, std::nullopt}).f);
    census({3, 2, 2, std::nullopt}, ledger);
    CHECK(std::filesystem::exists(ledger.file_for(3, 2)));
  }
  {
    CountLedger ledger(dir);
    const auto hit = ledger.find({3, 2, 4, std::nullopt});
    REQUIRE(hit);
    CHECK(hit->same_counts(compute_census({3, 2, 4, std::nullopt})));
    const auto restricted = ledger.find({3, 2, 4, 2});
    REQUIRE(restricted);
    CHECK(restricted->same_counts(compute_census({3, 2, 4, 2})));
    CensusOptions recheck;
    recheck.recheck = true;
    CHECK_NOTHROW(census({3, 2, 4, std::nullopt}, ledger, recheck));
    CHECK(ledger.rejected().empty());
  }
  {
    const auto path = CountLedger(dir).file_for(3, 2);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    in.close();
    const auto pos = text.find("\"f\": \"");
    text.insert(pos + 6, "1");
    std::ofstream(path) << text;
    CountLedger ledger(dir);
    CHECK_FALSE(ledger.find({3, 2, 2, std::nullopt}));
    CHECK(ledger.rejected().size() == 1);
    CHECK(ledger.find({3, 2, 4, std::nullopt}));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("recheck detects a stale cache entry") {
  const auto dir = scratch_dir("stale");
  CountLedger ledger(dir);
  auto r = compute_census({3, 3, 2, std::nullopt});
  r.f += 1;
  r.h[2] += 1;
  ledger.commit(r);
  CensusOptions opt;
  CHECK(census({3, 3, 2, std::nullopt}, ledger, opt).f == r.f);
  opt.recheck = true;
  CHECK_THROWS_AS(census({3, 3, 2, std::nullopt}, ledger, opt), CacheMismatch);
  std::filesystem::remove_all(dir);
}

TEST_CASE("budget exhaustion commits nothing") {
  CountLedger ledger;
  CensusOptions opt;
  opt.enumeration.node_budget = 10;
  CHECK_THROWS_AS(census({5, 2, 5, std::nullopt}, ledger, opt), BudgetExceeded);
  CHECK(ledger.keys().empty());
}

TEST_CASE("cache directory comes from the environment") {
  ::setenv("SUBRING_CACHE_DIR", "/tmp/somewhere", 1);
  CHECK(CountLedger::default_dir() == "/tmp/somewhere");
  ::unsetenv("SUBRING_CACHE_DIR");
  CHECK(CountLedger::default_dir() == ".subring-cache");
}

TEST_CASE("multiplicative extension") {
  CountLedger ledger;
  CensusOptions fill;
  const auto t2 = multiplicative_extend(2, 60, ledger, &fill);
  CHECK(t2.complete());
  for (int k = 1; k <= 60; ++k) CHECK(t2.f[static_cast<std::size_t>(k)] == 1);
  Int lsum = 0;
  for (int k = 1; k < 10; ++k) lsum += sigma(k);
  CHECK(t2.L(10) == lsum);
  CHECK(t2.L(10) == 69);

  const auto t3 = multiplicative_extend(3, 100, ledger, &fill);
  CHECK(t3.f[6] == 9);
  CHECK(t3.f[12] == t3.f[4] * t3.f[3]);
  const auto z3 = expand(catalog("zeta_Z3"), SeriesBounds::univariate(6));
  for (Entry p : {2, 3, 5, 7})
    for (int e = 1; ipow64(p, e) <= 100; ++e) CHECK(t3.f[static_cast<std::size_t>(ipow64(p, e))] == z3.at_prime(e, p));
  Int n_sum = 0;
  for (int j = 1; j < 50; ++j) n_sum += t3.f[static_cast<std::size_t>(j)];
  CHECK(t3.N(50) == n_sum);
  CHECK(t3.H(2, 100) == t3.N(101));
  CHECK(t3.H(0, 100) == 1);

  CountLedger empty;
  const auto partial = multiplicative_extend(3, 12, empty);
  CHECK_FALSE(partial.complete());
  CHECK(partial.missing.size() == 8);
}

TEST_CASE("lattice counts match the closed form per prime power") {
  for (int n = 1; n <= 5; ++n) {
    const auto a = lattice_counts(n, 64);
    CHECK(a[1] == 1);
    for (Entry p : {2, 3, 5, 7})
      for (int e = 1; ipow64(p, e) <= 64; ++e) {
        Int num = 1, den = 1;
        for (int i = 1; i < n; ++i) {
          num *= ipow(Int(p), static_cast<unsigned>(e + i)) - 1;
          den *= ipow(Int(p), static_cast<unsigned>(i)) - 1;
        }
        CHECK(a[static_cast<std::size_t>(ipow64(p, e))] == num / den);
      }
  }
}

TEST_CASE("rank n-1 Sylow part corresponds to coprime index") {
  CountLedger ledger;
  CensusOptions fill;
  const std::int64_t X = 200;
  const auto t = multiplicative_extend(3, X, ledger, &fill);
  const auto local2 = census({3, 2, 2, std::nullopt}, ledger, fill);
  const Int star = local2.cotype_count(Cotype({Int(2), Int(2)}));
  Int lhs = 0, rhs = 0;
  for (std::int64_t k = 1; k <= X; ++k)
    if (k % 4 == 0 && (k / 4) % 2 == 1) lhs += star * t.f[static_cast<std::size_t>(k / 4)];
  for (std::int64_t k = 1; k <= X / 4; k += 2) rhs += t.f[static_cast<std::size_t>(k)];
  CHECK(star == 1);
  CHECK(lhs == rhs);
}

TEST_CASE("prime sieve") {
  CHECK(primes_up_to(1).empty());
  CHECK(primes_up_to(30) == std::vector<std::int64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(primes_up_to(100000).size() == 9592);
}
