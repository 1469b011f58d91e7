#pragma once

#include "subring/exact.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subring {

enum class Var { p = 0, x = 1, y = 2, z = 3 };

/// Exponents of (p, x, y, z). Negative exponents are allowed, so reciprocal
/// substitution stays inside the ring.
using Exponent = std::array<int, 4>;

/// Sparse Laurent polynomial in p, x, y, z with Int coefficients. No zero
/// coefficient is ever stored.
class MPoly {
 public:
  MPoly() = default;
  MPoly(Int c);  // NOLINT: constants convert implicitly
  MPoly(long long c) : MPoly(Int(c)) {}  // NOLINT
  static MPoly var(Var v, int power = 1);
  static MPoly monomial(const Exponent& e, const Int& c = 1);

  const std::map<Exponent, Int>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Int coeff(const Exponent& e) const;
  /// Single term c * m with c = +-1.
  bool is_signed_monomial() const;

  int max_degree(Var v) const;
  int min_degree(Var v) const;
  /// Largest x+y+z degree among the terms.
  int total_degree_xyz() const;

  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly& operator*=(const MPoly& o);
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  MPoly operator-() const;
  MPoly pow(unsigned k) const;
  friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

  MPoly derivative(Var v) const;
  /// Replaces every variable by its reciprocal.
  MPoly reciprocal() const;
  /// Substitutes v -> image. Needs nonnegative exponents of v unless image
  /// is a signed monomial.
  MPoly substitute(Var v, const MPoly& image) const;
  /// Substitutes p by an integer; p-exponents must be nonnegative.
  MPoly at_p(const Int& p) const;
  /// Exact value at rational points for (p, x, y, z).
  Rat evaluate(const std::array<Rat, 4>& point) const;
  /// Multiplies by the monomial with the given exponents.
  MPoly shifted(const Exponent& by) const;

  std::string str() const;

 private:
  void add_term(const Exponent& e, const Int& c);
  std::map<Exponent, Int> terms_;
};

/// Parses sums of products of integers, p, x, y, z, parentheses and integer
/// powers, e.g. "(1 - x)*(1 - p^2*x^2*y*z) + 3*p - 2".
MPoly parse_poly(const std::string& text);

/// Ratio of MPolys; equality is by cross-multiplication.
class RatFunc {
 public:
  RatFunc() : num_(0), den_(1) {}
  RatFunc(MPoly num, MPoly den = MPoly(1));

  const MPoly& num() const { return num_; }
  const MPoly& den() const { return den_; }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
  friend bool operator==(const RatFunc& a, const RatFunc& b);

  /// Every variable replaced by its reciprocal, then numerator and
  /// denominator multiplied by a common monomial so no exponent is negative.
  RatFunc reciprocal() const;
  RatFunc at_p(const Int& p) const;
  Rat evaluate(const std::array<Rat, 4>& point) const;

  std::string str() const;

 private:
  MPoly num_, den_;
};

/// Quotient-rule derivative, not simplified.
RatFunc derivative(const RatFunc& f, Var v);

/// True iff f(1/p; 1/x, 1/y, 1/z) = multiplier * f(p; x, y, z).
bool functional_equation_check(const RatFunc& f, const MPoly& multiplier);

/// Image of each of x, y, z under a specialization.
enum class Target { keep, to_x, zero };
struct Specialization {
  Target x = Target::keep;
  Target y = Target::keep;
  Target z = Target::keep;
};
RatFunc specialize(const RatFunc& f, const Specialization& s);

struct SeriesBounds {
  std::array<int, 3> max{0, 0, 0};
  std::optional<int> total;

  static SeriesBounds univariate(int e) { return {{e, 0, 0}, std::nullopt}; }
  bool contains(const std::array<int, 3>& a) const;
};

/// Power-series coefficients in x, y, z; each coefficient is a Laurent
/// polynomial in p alone.
class SeriesTable {
 public:
  SeriesTable(SeriesBounds b, std::map<std::array<int, 3>, MPoly> c)
      : bounds_(b), coeffs_(std::move(c)) {}

  const SeriesBounds& bounds() const { return bounds_; }
  const std::map<std::array<int, 3>, MPoly>& coefficients() const { return coeffs_; }
  /// Throws std::out_of_range outside the bounds.
  MPoly at(const std::array<int, 3>& a) const;
  MPoly at(int e) const { return at({e, 0, 0}); }
  /// Coefficient with p replaced by an integer.
  Int at_prime(const std::array<int, 3>& a, const Int& p) const;
  Int at_prime(int e, const Int& p) const { return at_prime({e, 0, 0}, p); }

 private:
  SeriesBounds bounds_;
  std::map<std::array<int, 3>, MPoly> coeffs_;
};

/// Expands f as a power series in x, y, z by recursive division. The
/// denominator's constant term (in x, y, z) must be +-p^k; throws
/// std::domain_error otherwise.
SeriesTable expand(const RatFunc& f, const SeriesBounds& bounds);

/// Catalog of generating functions; see data/catalog.txt for the stored
/// entries. Parameterized ids: "corank1(n)" and "corank2(n)".
RatFunc catalog(const std::string& id);
std::vector<std::string> catalog_ids();
/// Version string recorded in the catalog file.
std::string catalog_version();
/// Raw `term` lines (monomial text, coefficient text) of a stored entry, in
/// file order.
std::vector<std::pair<std::string, std::string>> catalog_terms(const std::string& id);

/// Coefficient helpers used by the corank formulas.
Int coeff_a(int n);
Int coeff_b(int n);
Int coeff_c(int n);
Int coeff_d(int n);

}  // namespace subring
