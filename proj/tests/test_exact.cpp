#include "subring/exact.hpp"

#include <doctest.h>

#include <set>

using namespace subring;

TEST_CASE("binomial values and symmetry") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(6, 2) == 15);
  CHECK(binomial(3, 5) == 0);
  for (unsigned n = 0; n <= 30; ++n) {
    CHECK(binomial(n, 0) == 1);
    for (unsigned k = 0; k <= n; ++k) CHECK(binomial(n, k) == binomial(n, n - k));
  }
  CHECK(binomial(100, 50) == Int("100891344545564193334812497256"));
}

TEST_CASE("compositions enumerate in lex order") {
  auto two = compositions(2, 2, true);
  REQUIRE(two.size() == 1);
  CHECK(two[0].parts == std::vector<int>{1, 1});

  auto weak = compositions(3, 2, false);
  REQUIRE(weak.size() == 4);
  CHECK(weak[0].parts == std::vector<int>{0, 3});
  CHECK(weak[1].parts == std::vector<int>{1, 2});
  CHECK(weak[2].parts == std::vector<int>{2, 1});
  CHECK(weak[3].parts == std::vector<int>{3, 0});

  CHECK(compositions(0, 0, false).size() == 1);
  CHECK(compositions(1, 0, false).empty());
  CHECK(compositions(1, 2, true).empty());
}

TEST_CASE("composition counts match stars and bars") {
  for (int e = 0; e <= 9; ++e)
    for (int m = 1; m <= 5; ++m) {
      auto w = compositions(e, m, false);
      CHECK(Int(w.size()) == binomial(e + m - 1, m - 1));
      if (e >= 1) {
        auto s = compositions(e, m, true);
        CHECK(Int(s.size()) == binomial(e - 1, m - 1));
        for (const auto& c : s) CHECK(c.strict);
      }
      CHECK(std::is_sorted(w.begin(), w.end()));
      std::set<std::vector<int>> uniq;
      for (const auto& c : w) {
        CHECK(c.total == e);
        uniq.insert(c.parts);
      }
      CHECK(uniq.size() == w.size());
    }
}

TEST_CASE("composition of e into two strict parts has e-1 members") {
  for (int e = 2; e <= 12; ++e) CHECK(compositions(e, 2, true).size() == static_cast<std::size_t>(e - 1));
}

TEST_CASE("checked int64 arithmetic throws instead of wrapping") {
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  CHECK_THROWS_AS(checked_add(big, 1), std::overflow_error);
  CHECK_THROWS_AS(checked_mul(big, 2), std::overflow_error);
  CHECK_THROWS_AS(checked_sub(-big - 1, 1), std::overflow_error);
  CHECK(checked_mul(std::int64_t{3}, std::int64_t{-4}) == -12);
  CHECK_THROWS_AS(ipow64(2, 63), std::overflow_error);
  CHECK(ipow64(3, 4) == 81);
}

TEST_CASE("floor division and rationals") {
  CHECK(floor_div(std::int64_t{-7}, std::int64_t{2}) == -4);
  CHECK(floor_div(std::int64_t{7}, std::int64_t{-2}) == -4);
  CHECK(floor_div(Int(-7), Int(2)) == -4);
  Rat r = Rat(6) / Rat(-4);
  CHECK(numerator(r) == -3);
  CHECK(denominator(r) == 2);
  CHECK(to_int64(Int(42)) == 42);
  CHECK_THROWS_AS(to_int64(Int("99999999999999999999")), std::overflow_error);
}

TEST_CASE("primality") {
  CHECK_FALSE(is_prime(1));
  CHECK(is_prime(2));
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(91));
}
