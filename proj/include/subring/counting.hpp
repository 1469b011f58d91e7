#pragma once

#include "subring/enumerate.hpp"
#include "subring/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace subring {

inline constexpr const char* kEngineVersion = "1.0.0";
inline constexpr const char* kLedgerSchema = "subring-ledger/1";

/// Structural facts every subring matrix must satisfy; each counter is the
/// number of emitted matrices violating it.
struct Violations {
  std::uint64_t support_corank = 0;  // SNF corank differs from diagonal support size
  std::uint64_t zero_one = 0;        // support row, non-support column entry outside {0,1}
  std::uint64_t exactly_one = 0;     // support row without exactly one 1 in non-support columns
  std::uint64_t last_column = 0;     // last column outside {0,1}, or crossing entry nonzero
  std::uint64_t divisibility = 0;    // support column with an entry not divisible by p

  std::uint64_t total() const {
    return support_corank + zero_one + exactly_one + last_column + divisibility;
  }
  Violations& operator+=(const Violations& o);
  friend bool operator==(const Violations&, const Violations&) = default;
};

/// Checks one matrix of determinant p^e; returns the per-rule violations (each 0 or 1).
Violations structural_violations(const EnumMatrix& a, Entry p);

struct CensusKey {
  int n = 1;
  Entry p = 2;
  int e = 0;
  /// Set when only subrings of this corank were enumerated.
  std::optional<int> corank;

  std::string str() const;
  friend auto operator<=>(const CensusKey&, const CensusKey&) = default;
};

/// Exact counts of subrings of Z^n with index p^e.
struct CensusRecord {
  CensusKey key;
  Int f = 0;                    // all subrings (corank-restricted records: those of that corank)
  Int g = 0;                    // irreducible ones
  std::vector<Int> h;           // h[k] = subrings of corank exactly k, k = 0..n-1
  std::map<Cotype, Int> cotypes;
  Violations violations;
  EnumMode mode = EnumMode::pruned;
  PruneRuleSet rules;
  std::string engine_version = kEngineVersion;
  std::uint64_t nodes = 0;

  /// Corank at most k.
  Int h_tilde(int k) const;
  Int cotype_count(const Cotype& c) const;
  /// Counts only; provenance and node totals are ignored.
  bool same_counts(const CensusRecord& o) const;
  /// Broken internal invariants, empty when consistent.
  std::vector<std::string> consistency_errors() const;
};

struct CensusOptions {
  EnumMode mode = EnumMode::pruned;
  PruneRuleSet rules = PruneRuleSet::all();
  EnumOptions enumeration;
  /// Recompute even when cached and fail on disagreement.
  bool recheck = false;
};

class CacheMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumerates and tallies without touching any cache.
CensusRecord compute_census(const CensusKey& key, const CensusOptions& opt = {});

/// Persisted census records, one JSON file per (n, p). Records with a bad
/// checksum or a different engine version are dropped on load and listed in
/// rejected(). Lookups are concurrent; commits are serialized.
class CountLedger {
 public:
  /// Memory only.
  CountLedger() = default;
  explicit CountLedger(std::filesystem::path dir);
  /// $SUBRING_CACHE_DIR, or .subring-cache in the working directory.
  static std::filesystem::path default_dir();

  const std::optional<std::filesystem::path>& dir() const { return dir_; }
  std::optional<CensusRecord> find(const CensusKey& key) const;
  void commit(const CensusRecord& r);
  std::vector<CensusKey> keys() const;
  std::vector<std::string> rejected() const;
  std::filesystem::path file_for(int n, Entry p) const;

 private:
  void load(int n, Entry p) const;
  void save(int n, Entry p) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, Entry>, bool> loaded_;
  mutable std::map<CensusKey, CensusRecord> records_;
  mutable std::vector<std::string> rejected_;
};

/// Cached census: returns the stored record when present, otherwise
/// enumerates and commits. With opt.recheck the record is recomputed and
/// CacheMismatch is thrown if it disagrees with the cache. Budget exhaustion
/// propagates and nothing is committed.
CensusRecord census(const CensusKey& key, CountLedger& ledger, const CensusOptions& opt = {});

/// Serialized record (stable key order) and its FNV-1a checksum.
std::string record_to_json(const CensusRecord& r);
CensusRecord record_from_json(const std::string& text);
std::string checksum(const CensusRecord& r);
std::uint64_t fnv1a(const std::string& s);

/// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// g_3(p^e) and g_4(p^e) from the stored generating functions.
Int g3(Entry p, int e);
Int g4(Entry p, int e);

/// Closed form for the number of corank-k subrings of index p^e, k in {1,2,3}.
/// Throws std::domain_error outside e >= k, n > k.
Int formula_h(int n, int k, Entry p, int e);

/// Corank-k count (k in {1,2,3}) assembled from the decomposition of a
/// p-power-index subring into irreducible blocks. Valid for every e >= 0.
Int formula_h_direct_sum(int n, int k, Entry p, int e);

/// Dirichlet coefficients up to X assembled from prime-power values.
struct ExtendedTable {
  int n = 1;
  std::int64_t limit = 0;
  std::vector<Int> f;                   // f[j], j = 0..limit (f[0] unused)
  std::vector<std::vector<Int>> h_tilde;  // h_tilde[k][j], k = 0..n-1
  std::vector<Int> lattices;            // sublattices of index j
  /// Prime powers (p, e) that were needed but absent.
  std::vector<std::pair<Entry, int>> missing;

  bool complete() const { return missing.empty(); }
  /// Subrings of index < x.
  Int N(std::int64_t x) const;
  /// Subrings of corank at most k and index <= x.
  Int H(int k, std::int64_t x) const;
  /// Sublattices of index < x.
  Int L(std::int64_t x) const;
};

/// Local value at (p, e), or nullopt when unknown; e >= 1.
using LocalCounts = std::function<std::optional<Int>(Entry p, int e)>;

/// Multiplicative function on 1..limit from its prime-power values; missing
/// prime powers are reported and their multiples left at zero.
std::vector<Int> multiplicative_table(std::int64_t limit, const LocalCounts& local,
                                      std::vector<std::pair<Entry, int>>* missing = nullptr);

/// Number of n x n HNF matrices of determinant j, for j = 0..limit.
std::vector<Int> lattice_counts(int n, std::int64_t limit);

/// Composite-index counts from the ledger's prime-power records; when
/// `fill` is given, absent prime powers are computed and committed first.
ExtendedTable multiplicative_extend(int n, std::int64_t limit, CountLedger& ledger,
                                    const CensusOptions* fill = nullptr);

}  // namespace subring
