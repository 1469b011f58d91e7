#include "subring/verify.hpp"

#include <doctest.h>

#include <cstdio>
#include <set>

using namespace subring;

namespace {

// "corank23/stated/k=2/n=5/p=2/e=3" -> (k, n, e)
std::array<int, 3> parse_stated(const std::string& id) {
  int k = 0, n = 0, p = 0, e = 0;
  std::sscanf(id.c_str(), "corank23/stated/k=%d/n=%d/p=%d/e=%d", &k, &n, &p, &e);
  return {k, n, e};
}

}  // namespace

TEST_CASE("small verification run touches every check once") {
  CountLedger ledger;
  VerifyScope scope;
  scope.small = true;
  const auto checks = run_suite("all", scope, ledger);
  std::set<std::string> ids, suites;
  int stated_failures = 0;
  for (const auto& c : checks) {
    CHECK_MESSAGE(ids.insert(c.id).second, c.id);
    suites.insert(c.id.substr(0, c.id.find('/')));
    CHECK_FALSE(c.anchor.empty());
    if (c.status != CheckStatus::fail) continue;
    REQUIRE_MESSAGE(c.id.rfind("corank23/stated/", 0) == 0, c.id);
    auto [k, n, e] = parse_stated(c.id);
    CHECK(stated_form_known_to_differ(n, k, e));
    ++stated_failures;
  }
  const auto names = suite_names();
  CHECK(suites == std::set<std::string>(names.begin(), names.end()));
  // n = 5, e = 3, 4 at p = 2 for k = 2 and e = 4 for k = 3
  CHECK(stated_failures == 3);
}

TEST_CASE("every predicted stated-form mismatch is a failure") {
  CountLedger ledger;
  VerifyScope scope;
  scope.small = true;
  for (const auto& c : run_suite("corank23", scope, ledger)) {
    if (c.id.rfind("corank23/stated/", 0) != 0) {
      CHECK(c.status == CheckStatus::pass);
      continue;
    }
    auto [k, n, e] = parse_stated(c.id);
    CHECK((c.status == CheckStatus::fail) == stated_form_known_to_differ(n, k, e));
  }
}

TEST_CASE("cotype suite honours the prime and index restriction") {
  CountLedger ledger;
  VerifyScope scope;
  scope.primes = {3};
  scope.max_index = 27;
  const auto checks = run_suite("cotype-z4", scope, ledger);
  // totals 0..3: 1 + 3 + 6 + 10 tuples plus one sum check per total
  CHECK(checks.size() == 24);
  for (const auto& c : checks) CHECK(c.status == CheckStatus::pass);
}

TEST_CASE("budget-gated check is skipped, not failed") {
  CountLedger ledger;
  VerifyScope scope;
  scope.small = true;
  scope.stretch_budget = 10;
  const auto checks = run_suite("stretch", scope, ledger);
  REQUIRE(checks.size() == 2);
  CHECK(checks[0].status == CheckStatus::skipped);
  CHECK(checks[1].status == CheckStatus::pass);
  CHECK(ledger.keys().size() > 0);
  for (const auto& k : ledger.keys()) CHECK(k.n == 3);
  CHECK_THROWS_AS(run_suite("bogus", scope, ledger), std::invalid_argument);
}
