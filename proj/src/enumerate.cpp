#include "subring/enumerate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace subring {

std::string to_string(EnumMode m) { return m == EnumMode::naive ? "naive" : "pruned"; }

EnumMode parse_mode(const std::string& s) {
  if (s == "naive") return EnumMode::naive;
  if (s == "pruned") return EnumMode::pruned;
  throw std::invalid_argument("unknown enumeration mode '" + s + "'");
}

std::string PruneRuleSet::fingerprint() const {
  std::string f;
  auto put = [&](char c, bool on) {
    f += c;
    f += on ? '1' : '0';
  };
  put('Z', zero_one);
  put('E', exactly_one);
  put('D', divisibility_block);
  put('L', last_column);
  put('B', irreducible_block);
  put('C', closure);
  return f;
}

PruneRuleSet PruneRuleSet::from_fingerprint(const std::string& s) {
  PruneRuleSet r = none();
  if (s.size() != 12) throw std::invalid_argument("bad rule fingerprint '" + s + "'");
  for (std::size_t k = 0; k < s.size(); k += 2) {
    if (s[k + 1] != '0' && s[k + 1] != '1')
      throw std::invalid_argument("bad rule fingerprint '" + s + "'");
    const bool on = s[k + 1] == '1';
    switch (s[k]) {
      case 'Z': r.zero_one = on; break;
      case 'E': r.exactly_one = on; break;
      case 'D': r.divisibility_block = on; break;
      case 'L': r.last_column = on; break;
      case 'B': r.irreducible_block = on; break;
      case 'C': r.closure = on; break;
      default: throw std::invalid_argument("bad rule fingerprint '" + s + "'");
    }
  }
  return r;
}

void EnumSpec::validate() const {
  if (n < 1 || n > kMaxEnumDim)
    throw std::invalid_argument("n must be in [1, " + std::to_string(kMaxEnumDim) + "]");
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) throw std::invalid_argument("p must be prime");
  if (e < 0) throw std::invalid_argument("e must be nonnegative");
  Entry index = 1;
  for (int k = 0; k < e; ++k) {
    index = checked_mul(index, p);
    if (index >= (Entry{1} << 31)) throw std::invalid_argument("index p^e must be below 2^31");
  }
  if (corank && (*corank < 0 || *corank >= n))
    throw std::invalid_argument("corank filter must satisfy 0 <= k < n");
  if (diagonal) {
    if (static_cast<int>(diagonal->size()) != n - 1)
      throw std::invalid_argument("diagonal filter must have n-1 parts");
    if (diagonal->total != e) throw std::invalid_argument("diagonal filter must sum to e");
  }
}

BudgetExceeded::BudgetExceeded(std::uint64_t nodes, std::uint64_t budget)
    : std::runtime_error("enumeration node budget exceeded (" + std::to_string(nodes) + " > " +
                         std::to_string(budget) + ")"),
      nodes_(nodes),
      budget_(budget) {}

std::vector<Composition> diagonals(const EnumSpec& spec) {
  const bool pruned = spec.mode == EnumMode::pruned;
  std::vector<Composition> out;
  if (spec.diagonal) {
    out.push_back(*spec.diagonal);
  } else {
    out = compositions(spec.e, spec.n - 1, pruned && spec.irreducible_only);
  }
  if (pruned) {
    std::erase_if(out, [&](const Composition& c) {
      if (spec.irreducible_only && !c.strict) return true;
      return spec.corank && c.support() != *spec.corank;
    });
  }
  return out;
}

// ---------------------------------------------------------------------------

PartialAssignment::PartialAssignment(const Composition& diagonal, Entry p) : p_(p) {
  const Index n = static_cast<Index>(diagonal.size()) + 1;
  if (n > kMaxEnumDim) throw std::invalid_argument("dimension too large");
  a_ = Matrix<Entry>::Zero(n, n);
  support_.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i + 1 < n; ++i) {
    a_(i, i) = ipow64(p, diagonal[static_cast<std::size_t>(i)]);
    support_[static_cast<std::size_t>(i)] = diagonal[static_cast<std::size_t>(i)] > 0;
  }
  a_(n - 1, n - 1) = 1;
  rank_ = Matrix<int>::Constant(n, n, -1);
  for (Index j = 1; j < n; ++j)
    for (Index i = j - 1; i >= 0; --i)
      if (in_support(i)) {
        rank_(i, j) = static_cast<int>(order_.size());
        order_.emplace_back(i, j);
      }
}

int PartialAssignment::support_size() const {
  return static_cast<int>(std::count(support_.begin(), support_.end(), true));
}

bool PartialAssignment::is_assigned(Index i, Index j) const {
  const int r = rank_(i, j);
  return r < 0 || static_cast<std::size_t>(r) < assigned_;
}

void PartialAssignment::push(Entry v) {
  if (complete()) throw std::logic_error("PartialAssignment::push on a complete assignment");
  const auto [i, j] = order_[assigned_];
  if (v < 0 || v >= a_(i, i)) throw std::invalid_argument("entry outside HNF range");
  a_(i, j) = v;
  ++assigned_;
}

void PartialAssignment::pop() {
  if (assigned_ == 0) throw std::logic_error("PartialAssignment::pop on an empty assignment");
  --assigned_;
  const auto [i, j] = order_[assigned_];
  a_(i, j) = 0;
}

// ---------------------------------------------------------------------------

namespace {

/// Back-substitutes the vector w (rows above `top` are zero) through rows
/// top, top-1, ..., lo of the upper-triangular matrix a. False as soon as a
/// pivot does not divide its residual.
template <typename W>
bool back_substitute(const Matrix<Entry>& a, Index top, Index lo, W w) {
  std::array<Entry, kMaxEnumDim> c{};
  for (Index r = top; r >= lo; --r) {
    Entry res = w(r);
    for (Index l = r + 1; l <= top; ++l)
      if (a(r, l) != 0 && c[static_cast<std::size_t>(l)] != 0)
        res = checked_sub(res, checked_mul(a(r, l), c[static_cast<std::size_t>(l)]));
    if (res % a(r, r) != 0) return false;
    c[static_cast<std::size_t>(r)] = res / a(r, r);
  }
  return true;
}

/// The definition, straight: ones vector and every pairwise column product lie
/// in the column span.
bool spans_subring(const Matrix<Entry>& a) {
  const Index n = a.rows();
  if (!back_substitute(a, n - 1, 0, [](Index) { return Entry{1}; })) return false;
  for (Index j = 0; j < n; ++j)
    for (Index c = 0; c <= j; ++c)
      if (!back_substitute(a, c, 0, [&](Index r) { return checked_mul(a(r, c), a(r, j)); }))
        return false;
  return true;
}

}  // namespace

bool is_irreducible_form(const Matrix<Entry>& a, Entry p) {
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    if (a(i, n - 1) != 1) return false;
    for (Index j = 0; j + 1 < n; ++j)
      if (a(i, j) % p != 0) return false;
  }
  return true;
}

namespace rules {

bool zero_one(const PartialAssignment& s, Index i, Index j) {
  if (!s.in_support(i) || s.in_support(j)) return true;
  return s(i, j) == 0 || s(i, j) == 1;
}

bool exactly_one(const PartialAssignment& s, Index i, Index j) {
  if (!s.in_support(i) || s.in_support(j)) return true;
  const Index n = s.dim();
  int nonzero = 0;
  Entry seen = 0;
  for (Index c = i + 1; c < n; ++c) {
    if (s.in_support(c) || !s.is_assigned(i, c) || s(i, c) == 0) continue;
    ++nonzero;
    seen = s(i, c);
  }
  if (nonzero > 1) return false;
  if (s.is_assigned(i, n - 1)) return nonzero == 1 && seen == 1;
  return true;
}

bool divisibility_block(const PartialAssignment& s, Index i, Index j) {
  if (!s.in_support(i) || !s.in_support(j)) return true;
  return s(i, j) % s.p() == 0;
}

bool last_column(const PartialAssignment& s, Index i, Index j) {
  const Index n = s.dim();
  if (j != n - 1) return true;
  const Entry v = s(i, n - 1);
  if (v != 0 && v != 1) return false;
  for (Index r = 0; r + 1 < n; ++r) {
    if (r == i || !s.is_assigned(r, n - 1) || s(r, n - 1) == v) continue;
    const Index lo = std::min(i, r), hi = std::max(i, r);
    if (s.is_assigned(lo, hi) && s(lo, hi) != 0) return false;
  }
  return true;
}

bool irreducible_block(const PartialAssignment& s, Index i, Index j) {
  if (!s.in_support(i) || !s.in_support(j)) return true;
  std::vector<Index> idx;
  for (Index r = 0; r < s.dim(); ++r)
    if (s.in_support(r)) idx.push_back(r);
  if (idx.size() < 2 || i != idx.front() || j != idx.back()) return true;

  const Index k = static_cast<Index>(idx.size());
  Matrix<Entry> b = Matrix<Entry>::Zero(k + 1, k + 1);
  for (Index r = 0; r < k; ++r) {
    for (Index c = r; c < k; ++c) {
      b(r, c) = s(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      if (b(r, c) % s.p() != 0) return false;
    }
    b(r, k) = 1;
  }
  b(k, k) = 1;
  return spans_subring(b);
}

bool closure(const PartialAssignment& s, Index i, Index j) {
  const auto& a = s.matrix();
  for (Index c = i; c <= j; ++c)
    if (!back_substitute(a, c, i, [&](Index r) { return checked_mul(a(r, c), a(r, j)); }))
      return false;
  if (j == s.dim() - 1 && !back_substitute(a, j, i, [](Index) { return Entry{1}; })) return false;
  return true;
}

bool holds(const PartialAssignment& s, Rule rule) {
  for (std::size_t t = 0; t < s.assigned(); ++t) {
    const auto [i, j] = s.order()[t];
    if (!rule(s, i, j)) return false;
  }
  return true;
}

}  // namespace rules

// ---------------------------------------------------------------------------

namespace {

struct Cancelled {};

struct Budget {
  std::atomic<std::uint64_t> used{0};
  std::uint64_t limit = 0;
  std::atomic<bool> stop{false};
};

class Search {
 public:
  Search(const EnumSpec& spec, const Composition& diag, Budget& budget,
         const std::function<void(const EnumMatrix&)>& emit)
      : spec_(spec), s_(diag, spec.p), budget_(budget), emit_(emit) {
    const auto& r = spec.rules;
    if (spec.mode == EnumMode::pruned) {
      if (r.zero_one) checks_.push_back(&rules::zero_one);
      if (r.divisibility_block) checks_.push_back(&rules::divisibility_block);
      if (r.exactly_one) checks_.push_back(&rules::exactly_one);
      if (r.last_column) checks_.push_back(&rules::last_column);
      if (r.irreducible_block) checks_.push_back(&rules::irreducible_block);
      if (r.closure) checks_.push_back(&rules::closure);
    }
  }

  void run() {
    dfs();
    flush();
  }

  std::size_t emitted() const { return emitted_; }

 private:
  void dfs() {
    if (s_.complete()) {
      leaf();
      return;
    }
    const auto [i, j] = s_.order()[s_.assigned()];
    Entry lo = 0, hi = s_(i, i), step = 1;
    if (spec_.mode == EnumMode::pruned) {
      const auto& r = spec_.rules;
      const bool last = j == s_.dim() - 1;
      if ((r.zero_one && !s_.in_support(j)) || (r.last_column && last)) hi = std::min<Entry>(hi, 2);
      if (r.divisibility_block && s_.in_support(j)) step = spec_.p;
      if (spec_.irreducible_only) {
        if (last) {
          lo = 1;
          hi = std::min<Entry>(hi, 2);
        } else {
          step = spec_.p;
        }
      }
    }
    for (Entry v = lo; v < hi; v += step) {
      tick();
      s_.push(v);
      bool ok = true;
      for (auto rule : checks_)
        if (!rule(s_, i, j)) {
          ok = false;
          break;
        }
      if (ok) dfs();
      s_.pop();
    }
  }

  void leaf() {
    if (s_.order().empty()) tick();
    const auto& a = s_.matrix();
    if (!spans_subring(a)) return;
    if (spec_.irreducible_only && !is_irreducible_form(a, spec_.p)) return;
    auto m = EnumMatrix::certify(HnfMatrix<Entry>(a));
    if (!m) throw std::logic_error("enumeration produced a matrix that fails certification");
    if (spec_.mode == EnumMode::naive && spec_.corank && corank(*m) != *spec_.corank) return;
    ++emitted_;
    emit_(*m);
  }

  void tick() {
    if (++local_ >= 4096) flush();
  }

  void flush() {
    const auto total = budget_.used.fetch_add(local_) + local_;
    local_ = 0;
    if (budget_.stop.load()) throw Cancelled{};
    if (total > budget_.limit) throw BudgetExceeded(total, budget_.limit);
  }

  const EnumSpec& spec_;
  PartialAssignment s_;
  Budget& budget_;
  const std::function<void(const EnumMatrix&)>& emit_;
  std::vector<rules::Rule> checks_;
  std::uint64_t local_ = 0;
  std::size_t emitted_ = 0;
};

}  // namespace

namespace detail {

EnumStats run_diagonal_tasks(const EnumSpec& spec, const std::vector<Composition>& diags,
                             const EnumOptions& opt,
                             const std::function<void(std::size_t, const EnumMatrix&)>& visit) {
  Budget budget;
  budget.limit = opt.node_budget;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> emitted{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= diags.size()) return;
      try {
        const std::function<void(const EnumMatrix&)> emit = [&](const EnumMatrix& m) {
          visit(t, m);
        };
        Search search(spec, diags[t], budget, emit);
        search.run();
        emitted += search.emitted();
      } catch (const Cancelled&) {
        return;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        budget.stop = true;
        return;
      }
      if (opt.progress) {
        std::lock_guard lock(mu);
        ++done;
        *opt.progress << "diagonals " << done << " / " << diags.size() << '\n';
      }
    }
  };

  unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, diags.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return EnumStats{budget.used.load(), diags.size(), emitted.load()};
}

}  // namespace detail

EnumStats enumerate(const EnumSpec& spec, const std::function<void(const EnumMatrix&)>& sink,
                    const EnumOptions& opt) {
  spec.validate();
  if (opt.threads == 1) {
    const auto diags = diagonals(spec);
    return detail::run_diagonal_tasks(spec, diags, opt,
                                      [&](std::size_t, const EnumMatrix& m) { sink(m); });
  }
  EnumStats stats;
  auto all = enumerate_reduce<std::vector<EnumMatrix>>(
      spec, [](std::vector<EnumMatrix>& acc, const EnumMatrix& m) { acc.push_back(m); },
      [](std::vector<EnumMatrix>& out, std::vector<EnumMatrix>&& part) {
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
      },
      opt, &stats);
  for (const auto& m : all) sink(m);
  return stats;
}

std::vector<EnumMatrix> enumerate_all(const EnumSpec& spec, const EnumOptions& opt) {
  std::vector<EnumMatrix> out;
  enumerate(spec, [&](const EnumMatrix& m) { out.push_back(m); }, opt);
  return out;
}

std::vector<EnumMatrix> enumerate_irreducible(int n, Entry p, int e, const EnumOptions& opt) {
  EnumSpec spec;
  spec.n = n;
  spec.p = p;
  spec.e = e;
  spec.irreducible_only = true;
  return enumerate_all(spec, opt);
}

Int count_g_alpha(const Composition& alpha, Entry p, const EnumOptions& opt) {
  if (!alpha.strict) throw std::invalid_argument("count_g_alpha: composition must be strict");
  EnumSpec spec;
  spec.n = static_cast<int>(alpha.size()) + 1;
  spec.p = p;
  spec.e = alpha.total;
  spec.diagonal = alpha;
  spec.irreducible_only = true;
  Int count = 0;
  enumerate(spec, [&](const EnumMatrix&) { ++count; }, opt);
  return count;
}

}  // namespace subring
