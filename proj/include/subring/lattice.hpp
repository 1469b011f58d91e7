#pragma once

#include "subring/exact.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

#include <algorithm>
#include <compare>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subring {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

/// Upper triangular, positive diagonal, 0 <= a_ij < a_ii for i < j.
template <typename Scalar>
bool is_hnf(const Matrix<Scalar>& a) {
  if (a.rows() != a.cols()) return false;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    if (!(a(i, i) > 0)) return false;
    for (Index j = 0; j < i; ++j)
      if (a(i, j) != 0) return false;
    for (Index j = i + 1; j < n; ++j)
      if (a(i, j) < 0 || !(a(i, j) < a(i, i))) return false;
  }
  return true;
}

/// Square integer matrix in Hermite normal form; the canonical basis of a
/// finite-index sublattice of Z^n (columns span the lattice).
template <typename Scalar>
class HnfMatrix {
 public:
  explicit HnfMatrix(Matrix<Scalar> a) : a_(std::move(a)) {
    if (!is_hnf<Scalar>(a_)) throw std::invalid_argument("matrix is not in Hermite normal form");
  }

  static HnfMatrix identity(Index n) {
    return HnfMatrix(Matrix<Scalar>::Identity(n, n));
  }

  Index dim() const { return a_.rows(); }
  const Matrix<Scalar>& matrix() const { return a_; }
  const Scalar& operator()(Index i, Index j) const { return a_(i, j); }
  auto col(Index j) const { return a_.col(j); }

  /// Equals the lattice index [Z^n : col(A)].
  Scalar determinant() const {
    Scalar d = 1;
    for (Index i = 0; i < dim(); ++i) d = checked_mul(d, a_(i, i));
    return d;
  }

  template <typename Other>
  HnfMatrix<Other> cast() const {
    Matrix<Other> b(dim(), dim());
    for (Index i = 0; i < dim(); ++i)
      for (Index j = 0; j < dim(); ++j) b(i, j) = Other(a_(i, j));
    return HnfMatrix<Other>(std::move(b));
  }

  friend bool operator==(const HnfMatrix& x, const HnfMatrix& y) {
    return x.dim() == y.dim() && x.a_ == y.a_;
  }

  /// Column-major lexicographic comparison of the entries (dimension first).
  friend bool operator<(const HnfMatrix& x, const HnfMatrix& y) {
    if (x.dim() != y.dim()) return x.dim() < y.dim();
    return std::lexicographical_compare(x.a_.data(), x.a_.data() + x.a_.size(), y.a_.data(),
                                        y.a_.data() + y.a_.size());
  }

 private:
  Matrix<Scalar> a_;
};

/// Solves A c = w by bottom-up back-substitution. Returns the unique integer
/// solution, or nothing if some pivot fails to divide its residual.
template <typename Scalar>
std::optional<Vector<Scalar>> membership(const HnfMatrix<Scalar>& a, const Vector<Scalar>& w) {
  const Index n = a.dim();
  if (w.size() != n) throw std::invalid_argument("membership: dimension mismatch");
  Vector<Scalar> c(n);
  for (Index r = n - 1; r >= 0; --r) {
    Scalar residual = w(r);
    for (Index l = r + 1; l < n; ++l)
      if (a(r, l) != 0 && c(l) != 0) residual = checked_sub(residual, checked_mul(a(r, l), c(l)));
    if (residual % a(r, r) != 0) return std::nullopt;
    c(r) = residual / a(r, r);
  }
  return c;
}

template <typename Scalar>
Vector<Scalar> hadamard(const Vector<Scalar>& u, const Vector<Scalar>& v) {
  Vector<Scalar> r(u.size());
  for (Index i = 0; i < u.size(); ++i) r(i) = checked_mul(u(i), v(i));
  return r;
}

/// Column span contains (1,...,1) and is closed under componentwise product.
template <typename Scalar>
bool is_subring_matrix(const HnfMatrix<Scalar>& a) {
  const Index n = a.dim();
  if (!membership(a, Vector<Scalar>::Ones(n).eval())) return false;
  for (Index i = 0; i < n; ++i) {
    const Vector<Scalar> vi = a.col(i);
    for (Index j = i; j < n; ++j) {
      const Vector<Scalar> vj = a.col(j);
      if (!membership(a, hadamard<Scalar>(vi, vj))) return false;
    }
  }
  return true;
}

/// An HNF matrix whose column span is a subring of Z^n.
template <typename Scalar>
class SubringMatrix {
 public:
  static std::optional<SubringMatrix> certify(HnfMatrix<Scalar> a) {
    if (!is_subring_matrix(a)) return std::nullopt;
    return SubringMatrix(std::move(a));
  }

  const HnfMatrix<Scalar>& hnf() const { return a_; }
  Index dim() const { return a_.dim(); }
  const Scalar& operator()(Index i, Index j) const { return a_(i, j); }
  Scalar determinant() const { return a_.determinant(); }

  friend bool operator==(const SubringMatrix& x, const SubringMatrix& y) { return x.a_ == y.a_; }
  friend bool operator<(const SubringMatrix& x, const SubringMatrix& y) { return x.a_ < y.a_; }

 private:
  explicit SubringMatrix(HnfMatrix<Scalar> a) : a_(std::move(a)) {}
  HnfMatrix<Scalar> a_;
};

namespace detail {

template <typename Scalar>
void add_row_multiple(Matrix<Scalar>& m, Index dst, Index src, const Scalar& q) {
  for (Index j = 0; j < m.cols(); ++j)
    if (m(src, j) != 0) m(dst, j) = checked_sub(m(dst, j), checked_mul(q, m(src, j)));
}

template <typename Scalar>
void add_col_multiple(Matrix<Scalar>& m, Index dst, Index src, const Scalar& q) {
  for (Index i = 0; i < m.rows(); ++i)
    if (m(i, src) != 0) m(i, dst) = checked_sub(m(i, dst), checked_mul(q, m(i, src)));
}

/// Fraction-free (Bareiss) determinant.
template <typename Scalar>
Scalar bareiss_determinant(Matrix<Scalar> m) {
  const Index n = m.rows();
  if (n == 0) return Scalar(1);
  Scalar sign = 1;
  Scalar prev = 1;
  for (Index k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      Index swap_row = -1;
      for (Index i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          swap_row = i;
          break;
        }
      if (swap_row < 0) return Scalar(0);
      m.row(k).swap(m.row(swap_row));
      sign = -sign;
    }
    for (Index i = k + 1; i < n; ++i)
      for (Index j = k + 1; j < n; ++j)
        m(i, j) = checked_sub(checked_mul(m(i, j), m(k, k)), checked_mul(m(i, k), m(k, j))) / prev;
    prev = m(k, k);
  }
  return checked_mul(sign, m(n - 1, n - 1));
}

inline void subsets(Index n, Index k, Index start, std::vector<Index>& cur,
                    std::vector<std::vector<Index>>& out) {
  if (static_cast<Index>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (Index i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Smith normal form diagonal s_1 | s_2 | ... | s_n by gcd-based row/column
/// elimination. Pivot is the nonzero entry of smallest absolute value in the
/// trailing block; ties go to the lowest (row, col) in row-major order.
template <typename Scalar>
std::vector<Scalar> smith_normal_form(const HnfMatrix<Scalar>& h) {
  Matrix<Scalar> m = h.matrix();
  const Index n = m.rows();
  std::vector<Scalar> s;
  s.reserve(n);
  for (Index t = 0; t < n; ++t) {
    while (true) {
      Index pi = -1, pj = -1;
      Scalar best = 0;
      for (Index i = t; i < n; ++i)
        for (Index j = t; j < n; ++j) {
          if (m(i, j) == 0) continue;
          Scalar v = abs_value(m(i, j));
          if (pi < 0 || v < best) {
            best = v;
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) throw std::domain_error("smith_normal_form: singular matrix");
      if (pi != t) m.row(t).swap(m.row(pi));
      if (pj != t) m.col(t).swap(m.col(pj));

      bool clean = true;
      for (Index i = t + 1; i < n; ++i) {
        if (m(i, t) == 0) continue;
        detail::add_row_multiple<Scalar>(m, i, t, floor_div(m(i, t), m(t, t)));
        if (m(i, t) != 0) clean = false;
      }
      for (Index j = t + 1; j < n; ++j) {
        if (m(t, j) == 0) continue;
        detail::add_col_multiple<Scalar>(m, j, t, floor_div(m(t, j), m(t, t)));
        if (m(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      Index bad_row = -1;
      for (Index i = t + 1; i < n && bad_row < 0; ++i)
        for (Index j = t + 1; j < n; ++j)
          if (m(i, j) % m(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (bad_row < 0) break;
      detail::add_row_multiple<Scalar>(m, t, bad_row, Scalar(-1));
    }
    s.push_back(abs_value(m(t, t)));
  }
  return s;
}

/// Independent route: s_1 ... s_i = gcd of the i x i minors. Exponential in n.
template <typename Scalar>
std::vector<Scalar> snf_oracle_minor_gcds(const HnfMatrix<Scalar>& h) {
  const Index n = h.dim();
  if (n > 6) throw std::invalid_argument("snf_oracle_minor_gcds: dimension too large (n > 6)");
  std::vector<Scalar> s;
  Scalar prev = 1;
  for (Index k = 1; k <= n; ++k) {
    std::vector<std::vector<Index>> idx;
    std::vector<Index> cur;
    detail::subsets(n, k, 0, cur, idx);
    Scalar g = 0;
    Matrix<Scalar> sub(k, k);
    for (const auto& rows : idx)
      for (const auto& cols : idx) {
        for (Index a = 0; a < k; ++a)
          for (Index b = 0; b < k; ++b) sub(a, b) = h(rows[a], cols[b]);
        g = gcd_value(g, detail::bareiss_determinant<Scalar>(sub));
      }
    s.push_back(g / prev);
    prev = g;
  }
  return s;
}

/// Invariant factors in decreasing-divisibility order (a_{i+1} | a_i), one slot
/// per nontrivial position of a subring cokernel: alpha_i = s_{n+1-i}.
struct Cotype {
  std::vector<Int> alphas;

  Cotype() = default;
  explicit Cotype(std::vector<Int> a);

  /// Number of alphas greater than one.
  int corank() const;
  Int product() const;
  std::size_t size() const { return alphas.size(); }
  /// Exponents (a_1, a_2, ...) with alpha_i = p^{a_i}; throws if not p-powers.
  std::vector<int> exponents(const Int& p) const;
  std::string str() const;

  friend bool operator==(const Cotype& x, const Cotype& y) { return x.alphas == y.alphas; }
  friend bool operator<(const Cotype& x, const Cotype& y) { return x.alphas < y.alphas; }
};

/// Cotype from an ascending Smith diagonal (drops the trivial s_1 slot).
template <typename Scalar>
Cotype cotype_from_snf(const std::vector<Scalar>& snf) {
  std::vector<Int> alphas;
  for (std::size_t i = snf.size(); i-- > 1;) alphas.emplace_back(Int(snf[i]));
  return Cotype(std::move(alphas));
}

/// Smith diagonal, computed in the native scalar when it fits and in Int
/// otherwise.
template <typename Scalar>
std::vector<Int> invariant_factors(const HnfMatrix<Scalar>& h) {
  try {
    auto s = smith_normal_form(h);
    return std::vector<Int>(s.begin(), s.end());
  } catch (const std::overflow_error&) {
    return smith_normal_form(h.template cast<Int>());
  }
}

template <typename Scalar>
Cotype cotype(const SubringMatrix<Scalar>& a) {
  return cotype_from_snf(invariant_factors(a.hnf()));
}

template <typename Scalar>
int corank(const SubringMatrix<Scalar>& a) {
  return cotype(a).corank();
}

/// Number of diagonal entries that are positive powers of p, where p^e is the
/// determinant. Throws if the determinant is not a prime power.
template <typename Scalar>
int diagonal_support_corank(const SubringMatrix<Scalar>& a) {
  Int det = Int(a.determinant());
  if (det != 1) {
    Int p = 2;
    while (det % p != 0) ++p;
    Int d = det;
    while (d % p == 0) d /= p;
    if (d != 1) throw std::invalid_argument("diagonal_support_corank: determinant is not a prime power");
  }
  int k = 0;
  for (Index i = 0; i < a.dim(); ++i) k += (a(i, i) != 1);
  return k;
}

/// The subring generated by p e_1, ..., p e_{n-1}, e_1 + ... + e_n.
template <typename Scalar = Int>
SubringMatrix<Scalar> canonical_rpstar(Index n, const Scalar& p) {
  if (n < 2) throw std::invalid_argument("canonical_rpstar: n must be >= 2");
  if (!is_prime(static_cast<std::uint64_t>(to_int64(Int(p)))))
    throw std::invalid_argument("canonical_rpstar: p must be prime");
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    m(i, i) = p;
    m(i, n - 1) = 1;
  }
  m(n - 1, n - 1) = 1;
  auto r = SubringMatrix<Scalar>::certify(HnfMatrix<Scalar>(std::move(m)));
  if (!r) throw std::logic_error("canonical_rpstar failed certification");
  return *r;
}

/// Matrix text format: a header line `n p` then n rows of space-separated
/// integers. `p` is 0 when the record is not tied to a prime.
void write_matrix(std::ostream& os, const HnfMatrix<Int>& a, const Int& p);
void write_matrix(std::ostream& os, const HnfMatrix<std::int64_t>& a, std::int64_t p);

struct MatrixRecord {
  HnfMatrix<Int> matrix;
  Int p;
};

/// Reads every record in the stream; throws std::runtime_error on malformed
/// input.
std::vector<MatrixRecord> read_matrices(std::istream& is);

}  // namespace subring
