#include "subring/lattice.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace subring {

Cotype::Cotype(std::vector<Int> a) : alphas(std::move(a)) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] < 1) throw std::invalid_argument("cotype entries must be positive");
    if (i > 0 && alphas[i - 1] % alphas[i] != 0)
      throw std::invalid_argument("cotype entries must form a divisibility chain");
  }
}

int Cotype::corank() const {
  int k = 0;
  for (const auto& a : alphas) k += (a > 1);
  return k;
}

Int Cotype::product() const {
  Int r = 1;
  for (const auto& a : alphas) r *= a;
  return r;
}

std::vector<int> Cotype::exponents(const Int& p) const {
  std::vector<int> out;
  for (Int a : alphas) {
    int e = 0;
    while (a % p == 0) {
      a /= p;
      ++e;
    }
    if (a != 1) throw std::invalid_argument("cotype entry is not a power of p");
    out.push_back(e);
  }
  return out;
}

std::string Cotype::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < alphas.size(); ++i) os << (i ? "," : "") << alphas[i];
  os << ')';
  return os.str();
}

namespace {

template <typename Scalar>
void write_impl(std::ostream& os, const HnfMatrix<Scalar>& a, const Scalar& p) {
  os << a.dim() << ' ' << p << '\n';
  for (Index i = 0; i < a.dim(); ++i) {
    for (Index j = 0; j < a.dim(); ++j) os << (j ? " " : "") << a(i, j);
    os << '\n';
  }
}

}  // namespace

void write_matrix(std::ostream& os, const HnfMatrix<Int>& a, const Int& p) { write_impl(os, a, p); }

void write_matrix(std::ostream& os, const HnfMatrix<std::int64_t>& a, std::int64_t p) {
  write_impl(os, a, p);
}

std::vector<MatrixRecord> read_matrices(std::istream& is) {
  std::vector<MatrixRecord> out;
  std::string tok;
  while (is >> tok) {
    long n = 0;
    try {
      n = std::stol(tok);
    } catch (const std::exception&) {
      throw std::runtime_error("matrix text: bad header token '" + tok + "'");
    }
    if (n < 1) throw std::runtime_error("matrix text: dimension must be positive");
    std::string ptok;
    if (!(is >> ptok)) throw std::runtime_error("matrix text: missing prime in header");
    Matrix<Int> m(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        std::string v;
        if (!(is >> v)) throw std::runtime_error("matrix text: truncated record");
        try {
          m(i, j) = Int(v);
        } catch (const std::exception&) {
          throw std::runtime_error("matrix text: bad entry '" + v + "'");
        }
      }
    try {
      out.push_back(MatrixRecord{HnfMatrix<Int>(std::move(m)), Int(ptok)});
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("matrix text: ") + e.what());
    }
  }
  return out;
}

}  // namespace subring
