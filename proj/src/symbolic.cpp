#include "subring/symbolic.hpp"

#include "catalog_data.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace subring {

namespace {

constexpr const char* kVarNames[4] = {"p", "x", "y", "z"};

Exponent add(const Exponent& a, const Exponent& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

Rat rat_pow(const Rat& b, int e) {
  if (e < 0) {
    if (b == 0) throw std::domain_error("evaluation at a pole (zero to a negative power)");
    return Rat(1) / rat_pow(b, -e);
  }
  Rat r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// MPoly

MPoly::MPoly(Int c) {
  if (c != 0) terms_.emplace(Exponent{0, 0, 0, 0}, std::move(c));
}

MPoly MPoly::var(Var v, int power) {
  Exponent e{0, 0, 0, 0};
  e[static_cast<int>(v)] = power;
  return monomial(e);
}

MPoly MPoly::monomial(const Exponent& e, const Int& c) {
  MPoly m;
  m.add_term(e, c);
  return m;
}

void MPoly::add_term(const Exponent& e, const Int& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Int MPoly::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Int(0) : it->second;
}

bool MPoly::is_signed_monomial() const {
  return terms_.size() == 1 && abs_value(terms_.begin()->second) == 1;
}

int MPoly::max_degree(Var v) const {
  if (terms_.empty()) return 0;
  int d = terms_.begin()->first[static_cast<int>(v)];
  for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<int>(v)]);
  return d;
}

int MPoly::min_degree(Var v) const {
  if (terms_.empty()) return 0;
  int d = terms_.begin()->first[static_cast<int>(v)];
  for (const auto& [e, c] : terms_) d = std::min(d, e[static_cast<int>(v)]);
  return d;
}

int MPoly::total_degree_xyz() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[1] + e[2] + e[3]);
  return d;
}

MPoly& MPoly::operator+=(const MPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  MPoly r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) r.add_term(add(ea, eb), ca * cb);
  return r;
}

MPoly& MPoly::operator*=(const MPoly& o) { return *this = *this * o; }

MPoly MPoly::operator-() const {
  MPoly r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

MPoly MPoly::pow(unsigned k) const {
  MPoly r(1), b = *this;
  while (k) {
    if (k & 1u) r *= b;
    k >>= 1u;
    if (k) b *= b;
  }
  return r;
}

MPoly MPoly::derivative(Var v) const {
  const int i = static_cast<int>(v);
  MPoly r;
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponent f = e;
    --f[i];
    r.add_term(f, c * e[i]);
  }
  return r;
}

MPoly MPoly::reciprocal() const {
  MPoly r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(Exponent{-e[0], -e[1], -e[2], -e[3]}, c);
  return r;
}

MPoly MPoly::substitute(Var v, const MPoly& image) const {
  const int i = static_cast<int>(v);
  const bool monomial_image = image.is_signed_monomial();
  MPoly r;
  std::map<int, MPoly> powers;
  for (const auto& [e, c] : terms_) {
    const int k = e[i];
    if (k < 0 && !monomial_image)
      throw std::domain_error("substitution of a negative power by a non-monomial");
    Exponent rest = e;
    rest[i] = 0;
    auto it = powers.find(k);
    if (it == powers.end()) {
      MPoly pk = k >= 0 ? image.pow(static_cast<unsigned>(k)) : image.reciprocal().pow(static_cast<unsigned>(-k));
      it = powers.emplace(k, std::move(pk)).first;
    }
    r += MPoly::monomial(rest, c) * it->second;
  }
  return r;
}

MPoly MPoly::at_p(const Int& p) const {
  MPoly r;
  for (const auto& [e, c] : terms_) {
    if (e[0] < 0) throw std::domain_error("at_p: negative power of p");
    r.add_term({0, e[1], e[2], e[3]}, c * ipow(p, static_cast<unsigned>(e[0])));
  }
  return r;
}

Rat MPoly::evaluate(const std::array<Rat, 4>& point) const {
  Rat r = 0;
  for (const auto& [e, c] : terms_) {
    Rat t = Rat(c);
    for (int i = 0; i < 4; ++i)
      if (e[i] != 0) t *= rat_pow(point[static_cast<std::size_t>(i)], e[i]);
    r += t;
  }
  return r;
}

MPoly MPoly::shifted(const Exponent& by) const {
  MPoly r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(add(e, by), c);
  return r;
}

std::string MPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Int mag = abs_value(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool any = false;
    if (mag != 1) {
      os << mag;
      any = true;
    }
    for (int i = 0; i < 4; ++i) {
      if (e[i] == 0) continue;
      if (any) os << '*';
      os << kVarNames[i];
      if (e[i] != 1) os << '^' << e[i];
      any = true;
    }
    if (!any) os << mag;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  MPoly parse() {
    MPoly r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("polynomial parse error at offset " + std::to_string(pos_) + ": " +
                                what + " in \"" + s_ + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  MPoly expr() {
    MPoly r;
    bool negate = false;
    if (eat('-'))
      negate = true;
    else
      eat('+');
    r = term();
    if (negate) r = -r;
    while (true) {
      if (eat('+'))
        r += term();
      else if (eat('-'))
        r -= term();
      else
        return r;
    }
  }

  MPoly term() {
    MPoly r = factor();
    while (eat('*')) r *= factor();
    return r;
  }

  MPoly factor() {
    MPoly base = primary();
    if (eat('^')) {
      skip();
      bool neg = eat('-');
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      const int k = std::stoi(s_.substr(start, pos_ - start));
      if (neg) {
        if (!base.is_signed_monomial()) fail("negative exponent on a non-monomial");
        return base.reciprocal().pow(static_cast<unsigned>(k));
      }
      return base.pow(static_cast<unsigned>(k));
    }
    return base;
  }

  MPoly primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MPoly r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return MPoly(Int(s_.substr(start, pos_ - start)));
    }
    for (int i = 0; i < 4; ++i)
      if (c == kVarNames[i][0]) {
        ++pos_;
        if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) fail("unknown identifier");
        return MPoly::var(static_cast<Var>(i));
      }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

MPoly parse_poly(const std::string& text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// RatFunc

RatFunc::RatFunc(MPoly num, MPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) {
  return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.num_.is_zero()) throw std::domain_error("division by the zero rational function");
  return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
}

bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ * b.den_ == b.num_ * a.den_; }

RatFunc RatFunc::reciprocal() const {
  MPoly n = num_.reciprocal(), d = den_.reciprocal();
  Exponent shift{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    const Var v = static_cast<Var>(i);
    shift[static_cast<std::size_t>(i)] = std::max(0, -std::min(n.is_zero() ? 0 : n.min_degree(v), d.min_degree(v)));
  }
  return RatFunc(n.shifted(shift), d.shifted(shift));
}

RatFunc RatFunc::at_p(const Int& p) const { return RatFunc(num_.at_p(p), den_.at_p(p)); }

Rat RatFunc::evaluate(const std::array<Rat, 4>& point) const {
  const Rat d = den_.evaluate(point);
  if (d == 0) throw std::domain_error("evaluation at a pole");
  return num_.evaluate(point) / d;
}

std::string RatFunc::str() const { return "(" + num_.str() + ") / (" + den_.str() + ")"; }

RatFunc derivative(const RatFunc& f, Var v) {
  return RatFunc(f.num().derivative(v) * f.den() - f.num() * f.den().derivative(v), f.den() * f.den());
}

bool functional_equation_check(const RatFunc& f, const MPoly& multiplier) {
  const RatFunc r = f.reciprocal();
  return r == RatFunc(multiplier) * f;
}

RatFunc specialize(const RatFunc& f, const Specialization& s) {
  auto apply = [&](const MPoly& m) {
    MPoly r = m;
    const std::array<std::pair<Var, Target>, 3> subs{
        {{Var::x, s.x}, {Var::y, s.y}, {Var::z, s.z}}};
    for (const auto& [v, t] : subs) {
      if (t == Target::keep) continue;
      r = r.substitute(v, t == Target::zero ? MPoly(0) : MPoly::var(Var::x));
    }
    return r;
  };
  if (s.x == Target::zero && s.y == Target::to_x) throw std::invalid_argument("specialize: y -> x after x -> 0");
  MPoly d = apply(f.den());
  if (d.is_zero()) throw std::domain_error("specialize: denominator vanishes");
  return RatFunc(apply(f.num()), std::move(d));
}

// ---------------------------------------------------------------------------
// Series

bool SeriesBounds::contains(const std::array<int, 3>& a) const {
  for (int i = 0; i < 3; ++i)
    if (a[static_cast<std::size_t>(i)] < 0 || a[static_cast<std::size_t>(i)] > max[static_cast<std::size_t>(i)]) return false;
  return !total || a[0] + a[1] + a[2] <= *total;
}

MPoly SeriesTable::at(const std::array<int, 3>& a) const {
  if (!bounds_.contains(a)) throw std::out_of_range("series coefficient outside the truncation bounds");
  auto it = coeffs_.find(a);
  return it == coeffs_.end() ? MPoly(0) : it->second;
}

Int SeriesTable::at_prime(const std::array<int, 3>& a, const Int& p) const {
  return at(a).at_p(p).coeff({0, 0, 0, 0});
}

namespace {

using Key = std::array<int, 3>;

std::map<Key, MPoly> split_xyz(const MPoly& m) {
  std::map<Key, MPoly> out;
  for (const auto& [e, c] : m.terms()) {
    if (e[1] < 0 || e[2] < 0 || e[3] < 0)
      throw std::domain_error("expand: negative power of x, y or z");
    out[{e[1], e[2], e[3]}] += MPoly::monomial({e[0], 0, 0, 0}, c);
  }
  return out;
}

}  // namespace

SeriesTable expand(const RatFunc& f, const SeriesBounds& bounds) {
  const auto num = split_xyz(f.num());
  const auto den = split_xyz(f.den());
  auto d0 = den.find(Key{0, 0, 0});
  if (d0 == den.end()) throw std::domain_error("expand: denominator has zero constant term");
  if (!d0->second.is_signed_monomial())
    throw std::domain_error("expand: denominator constant term is not a unit");
  const auto& [d0e, d0c] = *d0->second.terms().begin();
  const MPoly d0_inverse = MPoly::monomial({-d0e[0], 0, 0, 0}, d0c);

  std::map<Key, MPoly> s;
  Key m{0, 0, 0};
  for (m[0] = 0; m[0] <= bounds.max[0]; ++m[0])
    for (m[1] = 0; m[1] <= bounds.max[1]; ++m[1])
      for (m[2] = 0; m[2] <= bounds.max[2]; ++m[2]) {
        if (!bounds.contains(m)) continue;
        MPoly acc;
        if (auto it = num.find(m); it != num.end()) acc = it->second;
        for (const auto& [d, dc] : den) {
          if (d == Key{0, 0, 0} || d[0] > m[0] || d[1] > m[1] || d[2] > m[2]) continue;
          auto prev = s.find({m[0] - d[0], m[1] - d[1], m[2] - d[2]});
          if (prev != s.end()) acc -= dc * prev->second;
        }
        acc *= d0_inverse;
        if (!acc.is_zero()) s.emplace(m, std::move(acc));
      }
  return SeriesTable(bounds, std::move(s));
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

struct StoredEntry {
  std::string num_text, den_text;
  std::vector<std::pair<std::string, std::string>> terms;
};

struct Catalog {
  std::string version;
  std::vector<std::string> order;
  std::map<std::string, StoredEntry> entries;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Catalog load_catalog() {
  Catalog cat;
  std::istringstream in(detail::kCatalogText);
  std::string line;
  StoredEntry* cur = nullptr;
  std::string cur_id;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("catalog line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
    if (key == "catalog_version") {
      cat.version = rest;
    } else if (key == "entry") {
      if (cur) fail("nested entry");
      if (cat.entries.count(rest)) fail("duplicate entry " + rest);
      cur_id = rest;
      cur = &cat.entries[rest];
      cat.order.push_back(rest);
    } else if (key == "end") {
      if (!cur) fail("end outside entry");
      if (!cur->terms.empty() && !cur->num_text.empty()) fail("entry mixes num and term lines");
      cur = nullptr;
    } else if (!cur) {
      fail("unexpected '" + key + "' outside entry");
    } else if (key == "num") {
      cur->num_text += " " + rest;
    } else if (key == "den") {
      cur->den_text += " " + rest;
    } else if (key == "term") {
      const auto colon = rest.find(':');
      if (colon == std::string::npos) fail("term line without ':'");
      cur->terms.emplace_back(trim(rest.substr(0, colon)), trim(rest.substr(colon + 1)));
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (cur) throw std::runtime_error("catalog: unterminated entry " + cur_id);
  return cat;
}

const Catalog& stored_catalog() {
  static const Catalog cat = load_catalog();
  return cat;
}

RatFunc build(const StoredEntry& e) {
  MPoly num;
  if (!e.terms.empty()) {
    for (const auto& [mono, coeff] : e.terms) {
      const MPoly m = parse_poly(mono);
      if (m.size() != 1 || m.terms().begin()->second != 1 || m.terms().begin()->first[0] != 0)
        throw std::runtime_error("catalog: term key '" + mono + "' is not a monomial in x, y, z");
      const MPoly c = parse_poly(coeff);
      if (c.max_degree(Var::x) || c.max_degree(Var::y) || c.max_degree(Var::z))
        throw std::runtime_error("catalog: coefficient '" + coeff + "' is not a polynomial in p");
      num += m * c;
    }
  } else {
    num = parse_poly(e.num_text.empty() ? "1" : e.num_text);
  }
  return RatFunc(num, parse_poly(e.den_text.empty() ? "1" : e.den_text));
}

std::optional<int> parameter(const std::string& id, const std::string& name) {
  static const std::regex pattern(R"(^([a-z0-9_]+)\((\d+)\)$)");
  std::smatch m;
  if (!std::regex_match(id, m, pattern) || m[1] != name) return std::nullopt;
  return std::stoi(m[2]);
}

}  // namespace

Int coeff_a(int n) {
  const Int t = Int(3 * n * n - 17 * n + 36) * binomial(static_cast<unsigned>(n - 1), 2);
  return t / 12;
}

Int coeff_b(int n) { return 3 * binomial(static_cast<unsigned>(n - 1), 3); }

Int coeff_c(int n) {
  const Int t = Int(n * n * n - 11 * n * n + 40 * n - 40) * binomial(static_cast<unsigned>(n - 1), 3);
  return t / 8;
}

Int coeff_d(int n) { return Int(3 * n - 5) * binomial(static_cast<unsigned>(n - 1), 4); }

RatFunc catalog(const std::string& id) {
  if (auto n = parameter(id, "corank1")) {
    if (*n < 2) throw std::invalid_argument("catalog: corank1(n) needs n >= 2");
    const Int m = binomial(static_cast<unsigned>(*n), 2);
    const MPoly x = MPoly::var(Var::x);
    return RatFunc(MPoly(1) + MPoly(m - 1) * x, MPoly(1) - x);
  }
  if (auto n = parameter(id, "corank2")) {
    if (*n < 3) throw std::invalid_argument("catalog: corank2(n) needs n >= 3");
    const Int m = binomial(static_cast<unsigned>(*n), 2);
    const Int a = coeff_a(*n), b = coeff_b(*n);
    const MPoly x = MPoly::var(Var::x), p = MPoly::var(Var::p);
    const MPoly num = MPoly(1) + MPoly(m - 2) * x + MPoly(a + b - m + 1) * x.pow(2) -
                      MPoly(a) * x.pow(3) + MPoly(a - 1) * p * x.pow(3) +
                      MPoly(a - m + 2) * p * x.pow(4) - MPoly(2 * a + b - m + 1) * p * x.pow(5);
    const MPoly den = (MPoly(1) - x).pow(2) * (MPoly(1) - p * x.pow(3));
    return RatFunc(num, den);
  }
  const auto& cat = stored_catalog();
  auto it = cat.entries.find(id);
  if (it == cat.entries.end()) throw std::invalid_argument("catalog: unknown id '" + id + "'");
  return build(it->second);
}

std::vector<std::string> catalog_ids() {
  auto ids = stored_catalog().order;
  ids.push_back("corank1(n)");
  ids.push_back("corank2(n)");
  return ids;
}

std::string catalog_version() { return stored_catalog().version; }

std::vector<std::pair<std::string, std::string>> catalog_terms(const std::string& id) {
  const auto& cat = stored_catalog();
  auto it = cat.entries.find(id);
  if (it == cat.entries.end()) throw std::invalid_argument("catalog: unknown id '" + id + "'");
  return it->second.terms;
}

}  // namespace subring
