#pragma once

#include "subring/lattice.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subring {

/// Entries of enumerated matrices fit in int64 (indices are capped below 2^31).
using Entry = std::int64_t;
using EnumMatrix = SubringMatrix<Entry>;

/// Largest dimension the search engine accepts.
inline constexpr int kMaxEnumDim = 12;

enum class EnumMode { naive, pruned };

std::string to_string(EnumMode m);
EnumMode parse_mode(const std::string& s);

/// Toggles for the structural pruning rules applied in pruned mode.
struct PruneRuleSet {
  bool zero_one = true;
  bool exactly_one = true;
  bool divisibility_block = true;
  bool last_column = true;
  bool irreducible_block = true;
  /// Partial back-substitution of column products as soon as they are decidable.
  bool closure = true;

  static PruneRuleSet all() { return {}; }
  static PruneRuleSet none() { return {false, false, false, false, false, false}; }

  /// Stable short form such as "Z1E1D1L1B1C1"; stored in ledgers and reports.
  std::string fingerprint() const;
  static PruneRuleSet from_fingerprint(const std::string& s);

  friend bool operator==(const PruneRuleSet&, const PruneRuleSet&) = default;
};

struct EnumSpec {
  int n = 1;
  Entry p = 2;
  int e = 0;
  EnumMode mode = EnumMode::pruned;
  PruneRuleSet rules = PruneRuleSet::all();
  std::optional<int> corank;
  std::optional<Composition> diagonal;
  bool irreducible_only = false;

  /// Throws std::invalid_argument when the spec is malformed.
  void validate() const;
};

struct EnumOptions {
  std::uint64_t node_budget = 1'000'000'000ULL;
  /// 0 means one per hardware thread.
  unsigned threads = 1;
  /// Receives `diagonals done / total` lines when set.
  std::ostream* progress = nullptr;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t nodes, std::uint64_t budget);
  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t nodes_;
  std::uint64_t budget_;
};

struct EnumStats {
  std::uint64_t nodes = 0;
  std::size_t diagonals = 0;
  std::size_t emitted = 0;
};

/// Diagonal exponent vectors visited for a spec, in canonical (lex) order.
std::vector<Composition> diagonals(const EnumSpec& spec);

/// Matrix with diagonal (p^{e_1}, ..., p^{e_{n-1}}, 1) whose free entries are
/// filled one at a time in the canonical order: columns left to right, rows
/// bottom to top, skipping rows with a unit diagonal (those rows are forced to
/// zero off the diagonal).
class PartialAssignment {
 public:
  PartialAssignment(const Composition& diagonal, Entry p);

  Index dim() const { return a_.rows(); }
  Entry p() const { return p_; }
  const Matrix<Entry>& matrix() const { return a_; }
  Entry operator()(Index i, Index j) const { return a_(i, j); }

  /// Row i has a diagonal entry > 1.
  bool in_support(Index i) const { return support_[static_cast<std::size_t>(i)]; }
  int support_size() const;
  const std::vector<std::pair<Index, Index>>& order() const { return order_; }
  std::size_t assigned() const { return assigned_; }
  bool complete() const { return assigned_ == order_.size(); }
  /// Diagonal, lower-triangle and forced entries count as assigned.
  bool is_assigned(Index i, Index j) const;

  /// Assigns the next free entry; throws if complete or out of HNF range.
  void push(Entry v);
  void pop();
  std::pair<Index, Index> last() const { return order_[assigned_ - 1]; }

 private:
  Matrix<Entry> a_;
  Entry p_;
  std::vector<bool> support_;
  std::vector<std::pair<Index, Index>> order_;
  Matrix<int> rank_;
  std::size_t assigned_ = 0;
};

/// Each rule inspects only constraints that became decidable when entry (i, j)
/// was assigned; `holds` replays a rule over every assigned entry.
namespace rules {

using Rule = bool (*)(const PartialAssignment&, Index, Index);

/// Support rows take values in {0,1} in columns outside the support.
bool zero_one(const PartialAssignment& s, Index i, Index j);
/// A support row has at most one nonzero entry outside the support columns,
/// and exactly one entry equal to 1 there once the row is complete.
bool exactly_one(const PartialAssignment& s, Index i, Index j);
/// Entries with row and column both in the support are divisible by p.
bool divisibility_block(const PartialAssignment& s, Index i, Index j);
/// Last column is 0/1; rows whose last entries differ have a zero entry at
/// their crossing.
bool last_column(const PartialAssignment& s, Index i, Index j);
/// Once the support block is complete, that block bordered by a zero row and
/// a ones column is an irreducible subring matrix.
bool irreducible_block(const PartialAssignment& s, Index i, Index j);
/// Column products (and the ones vector, once the last column is reached)
/// back-substitute cleanly on every row already fully determined.
bool closure(const PartialAssignment& s, Index i, Index j);

bool holds(const PartialAssignment& s, Rule rule);

}  // namespace rules

/// Last column all ones, every other column divisible by p.
bool is_irreducible_form(const Matrix<Entry>& a, Entry p);

namespace detail {

/// Runs one task per diagonal; `visit(task, m)` is called from the worker that
/// owns the task, in canonical order within that task.
EnumStats run_diagonal_tasks(const EnumSpec& spec, const std::vector<Composition>& diags,
                             const EnumOptions& opt,
                             const std::function<void(std::size_t, const EnumMatrix&)>& visit);

}  // namespace detail

/// Folds every matching subring matrix into an accumulator. Per-diagonal
/// partial results are merged in diagonal order, so the result does not depend
/// on the thread count.
template <typename Acc, typename Visit, typename Merge>
Acc enumerate_reduce(const EnumSpec& spec, Visit visit, Merge merge, const EnumOptions& opt = {},
                     EnumStats* stats = nullptr) {
  spec.validate();
  const auto diags = diagonals(spec);
  std::vector<Acc> parts(diags.size());
  auto st = detail::run_diagonal_tasks(
      spec, diags, opt, [&](std::size_t t, const EnumMatrix& m) { visit(parts[t], m); });
  if (stats) *stats = st;
  Acc out{};
  for (auto& part : parts) merge(out, std::move(part));
  return out;
}

/// Streams every matching subring matrix in canonical order.
EnumStats enumerate(const EnumSpec& spec, const std::function<void(const EnumMatrix&)>& sink,
                    const EnumOptions& opt = {});

std::vector<EnumMatrix> enumerate_all(const EnumSpec& spec, const EnumOptions& opt = {});

/// Irreducible subring matrices of determinant p^e.
std::vector<EnumMatrix> enumerate_irreducible(int n, Entry p, int e, const EnumOptions& opt = {});

/// Irreducible subring matrices with diagonal (p^{alpha_1}, ..., 1).
Int count_g_alpha(const Composition& alpha, Entry p, const EnumOptions& opt = {});

}  // namespace subring
