#pragma once

#include "subring/exact.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace subring {

/// A double with an absolute error bound; arithmetic propagates bounds and
/// adds a rounding allowance.
struct BoundedValue {
  double value = 0;
  double bound = 0;

  double lo() const { return value - bound; }
  double hi() const { return value + bound; }
  bool contains(double q, double tolerance = 0) const;
  std::string str() const;
};

BoundedValue operator+(const BoundedValue& a, const BoundedValue& b);
BoundedValue operator-(const BoundedValue& a, const BoundedValue& b);
BoundedValue operator*(const BoundedValue& a, const BoundedValue& b);
BoundedValue operator/(const BoundedValue& a, const BoundedValue& b);
BoundedValue exact_value(const Rat& r);

/// Integer polynomial in u = 1/p, lowest degree first.
using UPoly = std::vector<Int>;
UPoly upoly(std::initializer_list<long long> coeffs);
UPoly operator*(const UPoly& a, const UPoly& b);
UPoly pow(const UPoly& a, unsigned k);

/// Local factor num(u) / den(u).
struct EulerFactor {
  UPoly num{Int(1)};
  UPoly den{Int(1)};

  /// Product of the given polynomials raised to (possibly negative) powers.
  static EulerFactor product(const std::vector<std::pair<UPoly, int>>& parts);
  Rat at(const Int& p) const;
};

/// Per-prime deviation of the local factor from 1, with the tail model
/// |deviation(p)| <= tail_constant * p^-tail_exponent for every prime p > valid_from.
struct EulerProductSpec {
  std::string id;
  std::function<double(std::int64_t)> deviation;
  int tail_exponent = 2;
  double tail_constant = 0;
  std::int64_t valid_from = 2;
  /// Deviation vanishes identically.
  bool trivial = false;
};

/// Exact per-prime evaluation; the tail constant is derived from the
/// coefficients and holds for every p > valid_from.
EulerProductSpec rational_spec(const std::string& id, const EulerFactor& f, std::int64_t valid_from = 1'000'000);

struct EulerProductOptions {
  std::int64_t cutoff = 1'000'000;
  /// Doubles the cutoff until the bound is at most this (0: no refinement).
  double target_bound = 0;
  std::int64_t max_cutoff = 1LL << 25;
};

class TailModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bound on the sum of p^-t over primes p > cutoff (t >= 2).
double prime_tail_sum_bound(std::int64_t cutoff, int t);

/// Product over all primes, enclosing the truncated tail.
BoundedValue euler_product(const EulerProductSpec& spec, const EulerProductOptions& opt = {});

/// Riemann zeta at an integer s >= 2.
BoundedValue zeta(int s);

/// Limiting proportion of subrings of Z^n with corank exactly k, n <= 4.
BoundedValue corank_probability(int n, int k, const EulerProductOptions& opt = {});

/// Leading constant of the count of corank <= k subrings of index <= X,
/// C X (log X)^{m-1} with m = n choose 2; k in {1,2,3}, n > k.
BoundedValue tauberian_constant(int n, int k, const EulerProductOptions& opt = {});

/// Limiting proportion of sublattices of Z^n with corank at most k; n = 0 is
/// the large-n limit.
BoundedValue lattice_baseline(int n, int k);

/// zeta(n) zeta(n-1) ... zeta(2) / n.
BoundedValue lattice_count_constant(int n);

/// #Aut of the abelian p-group with the given partition (parts in any order).
Int automorphism_count(std::vector<int> partition, const Int& p);

/// Cohen-Lenstra type mass of the group among p-groups of rank <= n.
Rat cohen_lenstra_mass_exact(int n, const std::vector<int>& partition, const Int& p);
BoundedValue cohen_lenstra_mass(int n, const std::vector<int>& partition, const Int& p);

/// Limiting proportion of subrings of Z^n with index prime to p (n <= 4).
Rat coprime_index_proportion(int n, std::int64_t p);

/// max over integers 0 <= d <= n-1 of (d(n-1-d) + 1) / (n-1+d); 0 for n = 1.
Rat a_lower(int n);

/// One numeric constant, its computed enclosure and the value it should match.
struct ConstantCheck {
  std::string id;
  std::string description;
  BoundedValue computed;
  double expected = 0;
  double tolerance = 0;
  bool relative = false;

  bool passed() const;
};

std::vector<std::string> constant_ids();
ConstantCheck compute_constant(const std::string& id, const EulerProductOptions& opt = {});

}  // namespace subring
