#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace subring {

/// Arbitrary-precision signed integer. Expression templates are disabled so
/// the type behaves like a plain value inside Eigen expressions.
using Int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                          boost::multiprecision::et_off>;

/// Exact rational, always kept in lowest terms with a positive denominator.
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;

Int binomial(unsigned n, unsigned k);

/// b^e for small exponents.
Int ipow(const Int& b, unsigned e);

/// Ordered tuple of nonnegative parts. `strict` means every part is >= 1.
struct Composition {
  std::vector<int> parts;
  int total = 0;
  bool strict = false;

  Composition() = default;
  explicit Composition(std::vector<int> p);

  std::size_t size() const { return parts.size(); }
  int operator[](std::size_t i) const { return parts[i]; }
  /// Number of nonzero parts.
  int support() const;
  std::string str() const;

  friend bool operator==(const Composition& a, const Composition& b) {
    return a.parts == b.parts;
  }
  friend auto operator<=>(const Composition& a, const Composition& b) {
    return a.parts <=> b.parts;
  }
};

/// All compositions of `e` into `parts` parts (each >= 1 when strict),
/// in lexicographic order of the part vectors.
std::vector<Composition> compositions(int e, int parts, bool strict);

// Checked machine arithmetic. The int64 overloads throw std::overflow_error
// instead of wrapping; the Int overloads are plain arithmetic. Generic code in
// lattice_core is written against these so one template serves both scalars.

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 add overflow");
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("int64 sub overflow");
  return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 mul overflow");
  return r;
}
inline Int checked_add(const Int& a, const Int& b) { return a + b; }
inline Int checked_sub(const Int& a, const Int& b) { return a - b; }
inline Int checked_mul(const Int& a, const Int& b) { return a * b; }

/// Floor division and the matching nonnegative-for-positive-divisor remainder.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw std::domain_error("division by zero");
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
    throw std::overflow_error("int64 div overflow");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline Int floor_div(const Int& a, const Int& b) {
  if (b == 0) throw std::domain_error("division by zero");
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t abs_value(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("int64 abs overflow");
  return a < 0 ? -a : a;
}
inline Int abs_value(const Int& a) { return boost::multiprecision::abs(a); }

inline bool divides(std::int64_t d, std::int64_t a) { return d != 0 && a % d == 0; }
inline bool divides(const Int& d, const Int& a) { return d != 0 && a % d == 0; }

std::int64_t gcd_value(std::int64_t a, std::int64_t b);
Int gcd_value(const Int& a, const Int& b);

/// Exact conversion; throws std::overflow_error if out of range.
std::int64_t to_int64(const Int& a);

bool is_prime(std::uint64_t n);

/// p^e as int64, throwing std::overflow_error when it does not fit.
std::int64_t ipow64(std::int64_t b, int e);

/// Primes <= limit, ascending (sieve of Eratosthenes).
std::vector<std::int64_t> primes_up_to(std::int64_t limit);

}  // namespace subring
