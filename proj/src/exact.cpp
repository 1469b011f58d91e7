#include "subring/exact.hpp"

#include <numeric>
#include <sstream>

namespace subring {

Int binomial(unsigned n, unsigned k) {
  if (k > n) return Int(0);
  k = std::min(k, n - k);
  Int r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

Int ipow(const Int& b, unsigned e) { return boost::multiprecision::pow(b, e); }

Composition::Composition(std::vector<int> p) : parts(std::move(p)) {
  total = 0;
  strict = true;
  for (int v : parts) {
    if (v < 0) throw std::invalid_argument("composition parts must be nonnegative");
    total += v;
    if (v == 0) strict = false;
  }
}

int Composition::support() const {
  int s = 0;
  for (int v : parts) s += (v != 0);
  return s;
}

std::string Composition::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i];
  os << ')';
  return os.str();
}

namespace {

void compose(int remaining, int slots, int lo, std::vector<int>& cur,
             std::vector<Composition>& out) {
  if (slots == 1) {
    if (remaining >= lo) {
      cur.push_back(remaining);
      out.emplace_back(cur);
      cur.pop_back();
    }
    return;
  }
  // Leave at least lo for each of the remaining slots.
  for (int v = lo; v <= remaining - lo * (slots - 1); ++v) {
    cur.push_back(v);
    compose(remaining - v, slots - 1, lo, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Composition> compositions(int e, int parts, bool strict) {
  std::vector<Composition> out;
  if (e < 0 || parts < 0) return out;
  if (parts == 0) {
    if (e == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  std::vector<int> cur;
  compose(e, parts, strict ? 1 : 0, cur, out);
  return out;
}

std::int64_t gcd_value(std::int64_t a, std::int64_t b) {
  return std::gcd(abs_value(a), abs_value(b));
}

Int gcd_value(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }

std::int64_t to_int64(const Int& a) {
  if (a > std::numeric_limits<std::int64_t>::max() ||
      a < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer does not fit in int64");
  return a.convert_to<std::int64_t>();
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t ipow64(std::int64_t b, int e) {
  if (e < 0) throw std::invalid_argument("negative exponent");
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, b);
  return r;
}

std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
  std::vector<std::int64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

}  // namespace subring
