#include "subring/symbolic.hpp"

#include <doctest.h>

using namespace subring;

namespace {

MPoly P(const char* s) { return parse_poly(s); }
const MPoly X = MPoly::var(Var::x);

}  // namespace

TEST_CASE("polynomial parsing and printing") {
  CHECK(P("(1 - x)^2") == P("1 - 2*x + x^2"));
  CHECK(P("-x*(2 - p)") == P("p*x - 2*x"));
  CHECK(P("p^-2*p^2") == MPoly(1));
  CHECK(P("3*p - 2").str() == "3*p - 2");
  CHECK(P("0").is_zero());
  CHECK(parse_poly(P("-x^3*y + 2*p^2 - 7").str()) == P("-x^3*y + 2*p^2 - 7"));
  CHECK_THROWS_AS(P("1 +"), std::invalid_argument);
  CHECK_THROWS_AS(P("q"), std::invalid_argument);
  CHECK_THROWS_AS(P("(1 - x"), std::invalid_argument);
  CHECK_THROWS_AS(P("(1 - x)^-1"), std::invalid_argument);
}

TEST_CASE("MPoly arithmetic") {
  const MPoly a = P("1 + x*y - p"), b = P("2 - z");
  CHECK(a * b == b * a);
  CHECK((a + b) * (a - b) == a * a - b * b);
  CHECK(a.pow(3) == a * a * a);
  CHECK((a - a).is_zero());
  CHECK(P("x^3*y^2").derivative(Var::x) == P("3*x^2*y^2"));
  CHECK(P("p*x").reciprocal() == P("p^-1*x^-1"));
  CHECK(P("1 + x").substitute(Var::x, P("y^2")) == P("1 + y^2"));
  CHECK(P("x^-1").substitute(Var::x, P("-y")) == P("-y^-1"));
  CHECK_THROWS_AS(P("x^-1").substitute(Var::x, P("1 + y")), std::domain_error);
  CHECK(P("p^2*x + p").at_p(3) == P("9*x + 3"));
  CHECK(P("p^2*x").evaluate({Rat(2), Rat(1) / 3, 0, 0}) == Rat(4) / 3);
  CHECK(P("x^2*y*z + p^5").total_degree_xyz() == 4);
}

TEST_CASE("RatFunc equality is an equivalence on sample functions") {
  const RatFunc f(P("1 + x"), P("1 - x")), g(P("(1 + x)*(2 + p)"), P("(1 - x)*(2 + p)")),
      h(P("(1 + x)*(1 - y)"), P("(1 - x)*(1 - y)"));
  CHECK(f == f);
  CHECK(f == g);
  CHECK(g == f);
  CHECK(g == h);
  CHECK(f == h);
  CHECK_FALSE(f == RatFunc(P("1 + x"), P("1 + x")));
  CHECK(f * RatFunc(P("1 - x"), P("1 + x")) == RatFunc(1));
  CHECK((f + f) / f == RatFunc(2));
  CHECK_THROWS_AS(RatFunc(P("1"), P("0")), std::domain_error);
}

TEST_CASE("catalog contents") {
  CHECK(catalog("F_2") == RatFunc(1, P("1 - x")));
  const RatFunc f4 = catalog("F_4");
  CHECK(f4.num().coeff({1, 2, 1, 0}) == 3);
  CHECK(f4.num().coeff({0, 2, 1, 0}) == -2);
  CHECK(f4.num().size() > 40);
  CHECK(f4.num().total_degree_xyz() == 21);
  CHECK(catalog_terms("F_4").size() == 40);
  CHECK(catalog_version() == "1");
  CHECK_THROWS_AS(catalog("F_9"), std::invalid_argument);
  CHECK_THROWS_AS(catalog("corank2(2)"), std::invalid_argument);
  const auto ids = catalog_ids();
  CHECK(std::find(ids.begin(), ids.end(), "B_3") != ids.end());
  CHECK(catalog("corank1(4)") == catalog("corank1_Z4"));
}

TEST_CASE("F_4 numerator terms match the stored table") {
  MPoly rebuilt;
  for (const auto& [mono, coeff] : catalog_terms("F_4")) rebuilt += P(mono.c_str()) * P(coeff.c_str());
  CHECK(rebuilt == catalog("F_4").num());
}

TEST_CASE("series expansion") {
  // B_2 by hand: (x^2 + p x^3 + 2p x^4)(1 + x + x^2 + ...)(1 + p x^3 + ...)
  const auto b2 = expand(catalog("B_2"), SeriesBounds::univariate(4));
  CHECK(b2.at(0).is_zero());
  CHECK(b2.at(1).is_zero());
  CHECK(b2.at(2) == MPoly(1));
  CHECK(b2.at(3) == P("1 + p"));
  CHECK(b2.at(4) == P("1 + 3*p"));
  CHECK_THROWS_AS(b2.at(5), std::out_of_range);

  const auto f4 = expand(catalog("F_4"), {{1, 1, 1}, 1});
  CHECK(f4.at({1, 0, 0}) == MPoly(6));
  CHECK(f4.at({0, 0, 0}) == MPoly(1));
  CHECK(expand(catalog("zeta_Z3"), SeriesBounds::univariate(1)).at(1) == MPoly(3));

  const auto b3 = expand(catalog("B_3"), SeriesBounds::univariate(4));
  CHECK(b3.at(3) == MPoly(1));
  CHECK(b3.at_prime(3, 2) == 1);

  CHECK_THROWS_AS(expand(RatFunc(1, X), SeriesBounds::univariate(2)), std::domain_error);
  CHECK_THROWS_AS(expand(RatFunc(1, P("2 - x")), SeriesBounds::univariate(2)), std::domain_error);
  CHECK_THROWS_AS(expand(RatFunc(P("x^-1"), 1), SeriesBounds::univariate(2)), std::domain_error);
  const auto unit = expand(RatFunc(1, P("p - p^2*x")), SeriesBounds::univariate(2));
  CHECK(unit.at(2) == P("p^1"));
}

TEST_CASE("series of a product is the convolution of the series") {
  const std::vector<std::string> ids{"F_2", "B_2", "zeta_Z3", "zeta_Z4", "corank2_Z4", "B_3"};
  const int e = 7;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i; j < ids.size(); ++j) {
      const auto f = catalog(ids[i]), g = catalog(ids[j]);
      const auto sf = expand(f, SeriesBounds::univariate(e));
      const auto sg = expand(g, SeriesBounds::univariate(e));
      const auto sfg = expand(f * g, SeriesBounds::univariate(e));
      for (int k = 0; k <= e; ++k) {
        MPoly conv;
        for (int t = 0; t <= k; ++t) conv += sf.at(t) * sg.at(k - t);
        CHECK(sfg.at(k) == conv);
      }
    }
}

TEST_CASE("multivariate expansion respects bounds") {
  const auto s = expand(catalog("F_3"), {{3, 2, 0}, 4});
  CHECK(s.at({1, 0, 0}) == MPoly(3));
  CHECK_THROWS_AS(s.at({3, 2, 0}), std::out_of_range);
  for (const auto& [k, c] : s.coefficients()) CHECK(s.bounds().contains(k));
}

TEST_CASE("derivative") {
  CHECK(derivative(RatFunc(P("5 + p")), Var::x) == RatFunc(0));
  CHECK(derivative(catalog("B_2"), Var::x) == catalog("dB_2"));
  const int e = 8;
  const auto g = expand(catalog("B_2"), SeriesBounds::univariate(e));
  const auto xd = expand(RatFunc(X) * derivative(catalog("B_2"), Var::x), SeriesBounds::univariate(e));
  for (int k = 0; k <= e; ++k) CHECK(xd.at(k) == MPoly(k) * g.at(k));
}

TEST_CASE("functional equations") {
  CHECK(functional_equation_check(catalog("F_2"), P("-x")));
  CHECK(functional_equation_check(catalog("F_3"), P("p*x*y")));
  CHECK(functional_equation_check(catalog("F_4"), P("-p^3*x*y*z")));
  CHECK_FALSE(functional_equation_check(catalog("F_4"), P("p^3*x*y*z")));
  CHECK_FALSE(functional_equation_check(catalog("F_3"), P("-p*x*y")));
}

TEST_CASE("specializations") {
  const Specialization diag2{Target::keep, Target::to_x, Target::keep};
  CHECK(specialize(catalog("F_3"), diag2) == RatFunc(P("(1 + x)^2"), P("(1 - x)*(1 - p*x^3)")));
  CHECK(specialize(catalog("F_3"), diag2) == catalog("zeta_Z3"));
  const Specialization diag3{Target::keep, Target::to_x, Target::to_x};
  CHECK(specialize(catalog("F_4"), diag3) == catalog("zeta_Z4"));
  const Specialization first{Target::keep, Target::zero, Target::zero};
  CHECK(specialize(catalog("F_4"), first) == RatFunc(P("1 + 5*x"), P("1 - x")));
  CHECK(specialize(catalog("F_4"), first) == catalog("corank1(4)"));
  const Specialization two{Target::keep, Target::to_x, Target::zero};
  CHECK(specialize(catalog("F_4"), two) == catalog("corank2_Z4"));
  CHECK(catalog("corank2_Z4") == catalog("corank2_Z4_limit"));
  CHECK(catalog("corank2(4)") == catalog("corank2_Z4"));
  CHECK_FALSE(specialize(catalog("F_4"), two) == catalog("zeta_Z4"));
}

TEST_CASE("corank formula coefficients") {
  CHECK(coeff_a(4) == 4);
  CHECK(coeff_b(4) == 3);
  CHECK(coeff_c(4) == 1);
  CHECK(coeff_d(4) == 0);
  CHECK(coeff_a(3) == 1);
  CHECK(coeff_b(3) == 0);
  for (int n = 3; n <= 12; ++n) {
    CHECK(Int(3 * n * n - 17 * n + 36) * binomial(static_cast<unsigned>(n - 1), 2) % 12 == 0);
    CHECK(Int(n * n * n - 11 * n * n + 40 * n - 40) * binomial(static_cast<unsigned>(n - 1), 3) % 8 == 0);
  }
}

TEST_CASE("corank-two factor series matches the closed-form counts") {
  const int e = 8;
  const auto g3 = expand(catalog("B_2"), SeriesBounds::univariate(e));
  for (int n : {4, 5, 6}) {
    const auto s = expand(catalog("corank2(" + std::to_string(n) + ")"), SeriesBounds::univariate(e));
    const Int m = binomial(static_cast<unsigned>(n), 2);
    CHECK(s.at(0) == MPoly(1));
    CHECK(s.at(1) == MPoly(m));
    for (int k = 2; k <= e; ++k) CHECK(s.at(k) == MPoly(m) + MPoly(coeff_a(n)) * g3.at(k) + MPoly(coeff_b(n) * (k - 1)));
  }
}
