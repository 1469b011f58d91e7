#pragma once

#include "subring/analytics.hpp"
#include "subring/counting.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subring {

enum class CheckStatus { pass, fail, skipped };
const char* to_string(CheckStatus s);

/// One cross-check: a computed left side against the value it should equal.
struct Check {
  std::string id;
  std::string anchor;  // the claim being checked, in words
  std::string lhs;
  std::string rhs;
  CheckStatus status = CheckStatus::pass;
  std::string note;
};

/// Ranges for the verification suites. Unset fields take the suite defaults,
/// which shrink under `small`.
struct VerifyScope {
  bool small = false;
  /// Restricts the primes of every prime-dependent suite.
  std::vector<Entry> primes;
  /// Largest total index for the cotype suite (per prime).
  std::optional<std::int64_t> max_index;
  /// Extends the cotype suite at p = 2 to index 2^14.
  bool stretch = false;
  CensusOptions census;
  /// Node budget for the budget-gated checks.
  std::uint64_t stretch_budget = 50'000'000;
  EulerProductOptions constants;
};

std::vector<std::string> suite_names();

/// Runs one suite ("all" runs each once). Unknown names throw
/// std::invalid_argument; check failures are report entries, not errors.
std::vector<Check> run_suite(const std::string& suite, const VerifyScope& scope, CountLedger& ledger);

/// Census keys touched by the enumeration-backed suites, for the structural
/// sweep over everything they emitted.
std::vector<CensusKey> enumerated_keys(const VerifyScope& scope);

/// Stated corank-2/3 closed forms disagree with the census exactly when this
/// holds (n >= 5, e >= 3 for k = 2; n >= 5, e >= 4 for k = 3).
bool stated_form_known_to_differ(int n, int k, int e);

}  // namespace subring
