// Acceptance run: one line per criterion. Exit status is nonzero when any
// criterion deviates from its expected outcome; the stated corank-2/3 closed
// forms are expected to fail exactly where stated_form_known_to_differ says.

#include "subring/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

using namespace subring;

namespace {

struct Tally {
  int pass = 0, fail = 0, skipped = 0;
  std::vector<Check> failures;

  explicit Tally(const std::vector<Check>& checks) {
    for (const auto& c : checks) {
      if (c.status == CheckStatus::pass) ++pass;
      else if (c.status == CheckStatus::skipped) ++skipped;
      else {
        ++fail;
        failures.push_back(c);
      }
    }
  }
  int total() const { return pass + fail + skipped; }
};

enum class Verdict { pass, fail, skipped };

struct Line {
  Verdict verdict;
  std::string detail;
  bool expected = true;  // matches the documented outcome
};

int unexpected = 0;

void report(int number, const std::string& title, double limit_s, const std::function<Line()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Line l = body();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s && l.verdict == Verdict::pass) {
    l.verdict = Verdict::fail;
    l.expected = false;
    l.detail += "; over the time limit";
  }
  const char* tag = l.verdict == Verdict::pass ? "PASS" : l.verdict == Verdict::fail ? "FAIL" : "SKIPPED";
  std::printf("criterion %2d [%s] %s: %s (%.2f s", number, tag, title.c_str(), l.detail.c_str(), secs);
  if (limit_s > 0) std::printf(", limit %.0f s", limit_s);
  std::printf(")\n");
  std::fflush(stdout);
  if (!l.expected) ++unexpected;
}

Line from_tally(const Tally& t, const std::string& what) {
  Line l;
  l.verdict = t.fail == 0 ? Verdict::pass : Verdict::fail;
  l.expected = t.fail == 0;
  l.detail = std::to_string(t.pass) + "/" + std::to_string(t.total()) + " " + what;
  for (std::size_t i = 0; i < t.failures.size() && i < 3; ++i)
    l.detail += "; " + t.failures[i].id + " " + t.failures[i].lhs + " vs " + t.failures[i].rhs;
  return l;
}

std::vector<Check> only(const std::vector<Check>& all, const std::string& prefix) {
  std::vector<Check> out;
  for (const auto& c : all)
    if (c.id.rfind(prefix, 0) == 0) out.push_back(c);
  return out;
}

}  // namespace

int main() {
  CountLedger ledger;
  VerifyScope scope;
  VerifyScope stretched = scope;
  stretched.stretch = true;

  report(1, "cocyclic counts equal n choose 2 (n 2..6, p 2,3,5, e 1..6)", 300, [&] {
    return from_tally(Tally(run_suite("cocyclic", scope, ledger)), "exact");
  });

  report(2, "corank-2/3 closed forms against enumeration (p 2,3)", 1800, [&] {
    auto checks = run_suite("corank23", scope, ledger);
    Tally stated(only(checks, "corank23/stated/")), direct(only(checks, "corank23/direct-sum/"));
    int predicted = 0, surprises = 0;
    for (const auto& c : only(checks, "corank23/stated/")) {
      int k = 0, n = 0, p = 0, e = 0;
      std::sscanf(c.id.c_str(), "corank23/stated/k=%d/n=%d/p=%d/e=%d", &k, &n, &p, &e);
      bool differs = stated_form_known_to_differ(n, k, e);
      predicted += differs;
      if ((c.status == CheckStatus::fail) != differs) ++surprises;
    }
    Line l;
    l.verdict = stated.fail == 0 ? Verdict::pass : Verdict::fail;
    l.detail = "stated forms agree at " + std::to_string(stated.pass) + "/" + std::to_string(stated.total()) +
               " points";
    if (stated.fail)
      l.detail += ", enumeration is smaller at the " + std::to_string(stated.fail) +
                  " points with n >= 5 beyond the domain edge (e.g. " + stated.failures.front().id + ": " +
                  stated.failures.front().lhs + " vs " + stated.failures.front().rhs + ")";
    l.detail += "; direct-sum forms agree at " + std::to_string(direct.pass) + "/" + std::to_string(direct.total());
    l.expected = surprises == 0 && stated.fail == predicted && direct.fail == 0;
    if (l.verdict == Verdict::fail && l.expected) l.detail += "; documented discrepancy, see README";
    return l;
  });

  report(3, "local factors of Z^3 (e <= 8) and Z^4 (e <= 6) at p 2,3,5", 1800, [&] {
    return from_tally(Tally(run_suite("local-factors", scope, ledger)), "coefficients exact");
  });

  report(4, "cotype census of Z^4 against F_4 (p=2 to 2^10, p=3 to 3^6, stretch p=2 to 2^14)", 0, [&] {
    Tally base(run_suite("cotype-z4", scope, ledger));
    Tally more(run_suite("cotype-z4", stretched, ledger));
    Line l = from_tally(base, "checks");
    auto linear = only(run_suite("cotype-z4", scope, ledger), "cotype-z4/linear/");
    l.detail += " (" + std::to_string(linear.size()) + " degree <= 1 forms matched across primes)";
    l.detail += "; stretch " + std::to_string(more.pass) + "/" + std::to_string(more.total());
    if (more.fail) {
      l.verdict = Verdict::fail;
      l.expected = false;
    }
    return l;
  });

  report(5, "rational-function identities", 60, [&] {
    return from_tally(Tally(run_suite("identities", scope, ledger)), "exact by cross-multiplication");
  });

  report(6, "structural invariants over every matrix emitted for criteria 1-4", 0, [&] {
    return from_tally(Tally(run_suite("structure", stretched, ledger)), "records with zero violations / in sandwich");
  });

  report(7, "naive vs pruned enumeration, Smith form vs minor gcds", 0, [&] {
    return from_tally(Tally(run_suite("oracle", scope, ledger)), "checks");
  });

  report(8, "numeric constants inside their enclosures", 600, [&] {
    return from_tally(Tally(run_suite("constants", scope, ledger)), "constants");
  });

  report(9, "unique subring of cotype (p,...,p) (n 3,4,5; p 2,3)", 0, [&] {
    return from_tally(Tally(run_suite("rpstar", scope, ledger)), "exact");
  });

  report(10, "stretch: f_6(2^7) >= 64 and the Sylow bijection up to 200", 0, [&] {
    Tally t(run_suite("stretch", scope, ledger));
    Line l = from_tally(t, "checks");
    if (t.fail == 0 && t.skipped > 0) {
      l.verdict = Verdict::skipped;
      l.detail += " (" + std::to_string(t.skipped) + " skipped on budget)";
    }
    return l;
  });

  std::printf("acceptance: %s\n", unexpected == 0 ? "all criteria match their expected outcome"
                                                  : (std::to_string(unexpected) + " unexpected result(s)").c_str());
  return unexpected == 0 ? 0 : 1;
}
