#include "subring/counting.hpp"

#include "subring/symbolic.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace subring {

namespace {

using Json = nlohmann::ordered_json;

Violations check_structure(const EnumMatrix& m, Entry p, int snf_corank) {
  const Index n = m.dim();
  std::vector<bool> sup(static_cast<std::size_t>(n), false);
  int support = 0;
  for (Index i = 0; i + 1 < n; ++i) {
    sup[static_cast<std::size_t>(i)] = m(i, i) != 1;
    support += sup[static_cast<std::size_t>(i)];
  }
  Violations v;
  v.support_corank = snf_corank != support;
  for (Index i = 0; i + 1 < n; ++i) {
    if (!sup[static_cast<std::size_t>(i)]) continue;
    int ones = 0, nonzero = 0;
    for (Index j = i + 1; j < n; ++j) {
      if (sup[static_cast<std::size_t>(j)]) continue;
      const Entry x = m(i, j);
      if (x != 0 && x != 1) v.zero_one = 1;
      ones += x == 1;
      nonzero += x != 0;
    }
    if (ones != 1 || nonzero != 1) v.exactly_one = 1;
    for (Index r = 0; r <= i; ++r)
      if (m(r, i) % p != 0) v.divisibility = 1;
  }
  for (Index i = 0; i < n; ++i) {
    const Entry a = m(i, n - 1);
    if (a != 0 && a != 1) v.last_column = 1;
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (m(i, n - 1) != m(j, n - 1) && m(i, j) != 0) v.last_column = 1;
  return v;
}

struct Tally {
  Int f = 0, g = 0;
  std::vector<Int> h;
  std::map<Cotype, Int> cotypes;
  Violations violations;
};

std::string to_str(const Int& x) { return x.str(); }

Int parse_int(const Json& j) {
  if (!j.is_string()) throw std::invalid_argument("ledger: integer fields are stored as strings");
  return Int(j.get<std::string>());
}

Json violations_json(const Violations& v) {
  return Json{{"support_corank", v.support_corank},
              {"zero_one", v.zero_one},
              {"exactly_one", v.exactly_one},
              {"last_column", v.last_column},
              {"divisibility", v.divisibility}};
}

Json record_json(const CensusRecord& r) {
  Json j;
  j["n"] = r.key.n;
  j["p"] = r.key.p;
  j["e"] = r.key.e;
  j["corank"] = r.key.corank ? Json(*r.key.corank) : Json(nullptr);
  j["f"] = to_str(r.f);
  j["g"] = to_str(r.g);
  Json h = Json::array();
  for (const auto& x : r.h) h.push_back(to_str(x));
  j["h"] = h;
  Json cot = Json::array();
  for (const auto& [c, count] : r.cotypes) {
    Json alphas = Json::array();
    for (const auto& a : c.alphas) alphas.push_back(to_str(a));
    cot.push_back(Json{{"cotype", alphas}, {"count", to_str(count)}});
  }
  j["cotypes"] = cot;
  j["violations"] = violations_json(r.violations);
  j["mode"] = to_string(r.mode);
  j["rules"] = r.rules.fingerprint();
  j["engine_version"] = r.engine_version;
  j["nodes"] = r.nodes;
  return j;
}

CensusRecord record_from(const Json& j) {
  CensusRecord r;
  r.key.n = j.at("n").get<int>();
  r.key.p = j.at("p").get<Entry>();
  r.key.e = j.at("e").get<int>();
  if (!j.at("corank").is_null()) r.key.corank = j.at("corank").get<int>();
  r.f = parse_int(j.at("f"));
  r.g = parse_int(j.at("g"));
  for (const auto& x : j.at("h")) r.h.push_back(parse_int(x));
  for (const auto& c : j.at("cotypes")) {
    std::vector<Int> alphas;
    for (const auto& a : c.at("cotype")) alphas.push_back(parse_int(a));
    r.cotypes[Cotype(std::move(alphas))] = parse_int(c.at("count"));
  }
  const auto& v = j.at("violations");
  r.violations.support_corank = v.at("support_corank").get<std::uint64_t>();
  r.violations.zero_one = v.at("zero_one").get<std::uint64_t>();
  r.violations.exactly_one = v.at("exactly_one").get<std::uint64_t>();
  r.violations.last_column = v.at("last_column").get<std::uint64_t>();
  r.violations.divisibility = v.at("divisibility").get<std::uint64_t>();
  r.mode = parse_mode(j.at("mode").get<std::string>());
  r.rules = PruneRuleSet::from_fingerprint(j.at("rules").get<std::string>());
  r.engine_version = j.at("engine_version").get<std::string>();
  r.nodes = j.at("nodes").get<std::uint64_t>();
  return r;
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

CensusRecord restrict_to_corank(const CensusRecord& full, int k) {
  CensusRecord r = full;
  r.key.corank = k;
  r.h.assign(full.h.size(), Int(0));
  if (k >= 0 && static_cast<std::size_t>(k) < full.h.size()) r.h[static_cast<std::size_t>(k)] = full.h[static_cast<std::size_t>(k)];
  r.f = k >= 0 && static_cast<std::size_t>(k) < full.h.size() ? full.h[static_cast<std::size_t>(k)] : Int(0);
  r.cotypes.clear();
  for (const auto& [c, count] : full.cotypes)
    if (c.corank() == k) r.cotypes[c] = count;
  if (full.key.n >= 2 && k != full.key.n - 1 && full.key.e > 0) r.g = 0;
  return r;
}

}  // namespace

Violations& Violations::operator+=(const Violations& o) {
  support_corank += o.support_corank;
  zero_one += o.zero_one;
  exactly_one += o.exactly_one;
  last_column += o.last_column;
  divisibility += o.divisibility;
  return *this;
}

Violations structural_violations(const EnumMatrix& a, Entry p) {
  return check_structure(a, p, cotype(a).corank());
}

std::string CensusKey::str() const {
  std::ostringstream os;
  os << "n=" << n << ",p=" << p << ",e=" << e;
  if (corank) os << ",corank=" << *corank;
  return os.str();
}

Int CensusRecord::h_tilde(int k) const {
  Int s = 0;
  for (int i = 0; i <= k && static_cast<std::size_t>(i) < h.size(); ++i) s += h[static_cast<std::size_t>(i)];
  return s;
}

Int CensusRecord::cotype_count(const Cotype& c) const {
  auto it = cotypes.find(c);
  return it == cotypes.end() ? Int(0) : it->second;
}

bool CensusRecord::same_counts(const CensusRecord& o) const {
  return key == o.key && f == o.f && g == o.g && h == o.h && cotypes == o.cotypes &&
         violations == o.violations;
}

std::vector<std::string> CensusRecord::consistency_errors() const {
  std::vector<std::string> err;
  const int n = key.n;
  if (h.size() != static_cast<std::size_t>(n)) err.push_back("h has the wrong length");
  const Int sum_h = std::accumulate(h.begin(), h.end(), Int(0));
  if (sum_h != f) err.push_back("corank counts do not sum to the total");
  if (h_tilde(n - 1) != f) err.push_back("corank at most n-1 does not cover every subring");
  Int sum_c = 0;
  std::vector<Int> by_corank(h.size(), Int(0));
  const Int index = ipow(Int(key.p), static_cast<unsigned>(key.e));
  for (const auto& [c, count] : cotypes) {
    sum_c += count;
    if (c.size() != static_cast<std::size_t>(std::max(n - 1, 0))) err.push_back("cotype " + c.str() + " has the wrong length");
    if (c.product() != index) err.push_back("cotype " + c.str() + " does not multiply to the index");
    const int k = c.corank();
    if (k < 0 || static_cast<std::size_t>(k) >= by_corank.size())
      err.push_back("cotype " + c.str() + " has corank out of range");
    else
      by_corank[static_cast<std::size_t>(k)] += count;
  }
  if (sum_c != f) err.push_back("cotype census does not sum to the total");
  if (by_corank != h) err.push_back("cotype census disagrees with corank counts");
  if (key.corank)
    for (std::size_t k = 0; k < h.size(); ++k)
      if (static_cast<int>(k) != *key.corank && h[k] != 0) err.push_back("count outside the requested corank");
  if (n >= 2 && key.e > 0 && !h.empty() && g > h.back()) err.push_back("more irreducible subrings than corank n-1 ones");
  if (violations.total() != 0) err.push_back("structural violations present");
  return err;
}

CensusRecord compute_census(const CensusKey& key, const CensusOptions& opt) {
  EnumSpec spec;
  spec.n = key.n;
  spec.p = key.p;
  spec.e = key.e;
  spec.mode = opt.mode;
  spec.rules = opt.rules;
  spec.corank = key.corank;
  const std::size_t slots = static_cast<std::size_t>(std::max(key.n, 1));
  const Entry p = key.p;

  auto visit = [&](Tally& t, const EnumMatrix& m) {
    if (t.h.empty()) t.h.assign(slots, Int(0));
    const Cotype c = cotype(m);
    const int k = c.corank();
    t.f += 1;
    t.h[static_cast<std::size_t>(k)] += 1;
    t.cotypes[c] += 1;
    if (is_irreducible_form(m.hnf().matrix(), p)) t.g += 1;
    t.violations += check_structure(m, p, k);
  };
  auto merge = [&](Tally& out, Tally&& part) {
    if (out.h.empty()) out.h.assign(slots, Int(0));
    out.f += part.f;
    out.g += part.g;
    for (std::size_t i = 0; i < part.h.size(); ++i) out.h[i] += part.h[i];
    for (auto& [c, count] : part.cotypes) out.cotypes[c] += count;
    out.violations += part.violations;
  };
  EnumStats stats;
  Tally t = enumerate_reduce<Tally>(spec, visit, merge, opt.enumeration, &stats);
  if (t.h.empty()) t.h.assign(slots, Int(0));

  CensusRecord r;
  r.key = key;
  r.f = t.f;
  r.g = t.g;
  r.h = std::move(t.h);
  r.cotypes = std::move(t.cotypes);
  r.violations = t.violations;
  r.mode = opt.mode;
  r.rules = opt.mode == EnumMode::pruned ? opt.rules : PruneRuleSet::none();
  r.nodes = stats.nodes;
  return r;
}

std::string record_to_json(const CensusRecord& r) {
  Json j = record_json(r);
  j["checksum"] = checksum(r);
  return j.dump(2);
}

CensusRecord record_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  CensusRecord r = record_from(j);
  if (j.contains("checksum") && j.at("checksum").get<std::string>() != checksum(r))
    throw std::invalid_argument("ledger record checksum mismatch for " + r.key.str());
  return r;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string checksum(const CensusRecord& r) { return "fnv1a:" + hex64(fnv1a(record_json(r).dump())); }

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CountLedger::CountLedger(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path CountLedger::default_dir() {
  if (const char* env = std::getenv("SUBRING_CACHE_DIR"); env && *env) return env;
  return ".subring-cache";
}

std::filesystem::path CountLedger::file_for(int n, Entry p) const {
  if (!dir_) throw std::logic_error("ledger has no directory");
  return *dir_ / ("ledger_n" + std::to_string(n) + "_p" + std::to_string(p) + ".json");
}

void CountLedger::load(int n, Entry p) const {
  auto& done = loaded_[{n, p}];
  if (done || !dir_) {
    done = true;
    return;
  }
  done = true;
  const auto path = file_for(n, p);
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& ex) {
    rejected_.push_back(path.string() + ": unreadable (" + ex.what() + ")");
    return;
  }
  if (doc.value("schema", "") != kLedgerSchema) {
    rejected_.push_back(path.string() + ": unknown schema");
    return;
  }
  for (const auto& item : doc.at("records")) {
    try {
      CensusRecord r = record_from(item);
      if (item.value("checksum", "") != checksum(r)) {
        rejected_.push_back(r.key.str() + ": checksum mismatch");
        continue;
      }
      if (r.engine_version != kEngineVersion) {
        rejected_.push_back(r.key.str() + ": engine version " + r.engine_version);
        continue;
      }
      if (r.key.n != n || r.key.p != p) {
        rejected_.push_back(r.key.str() + ": stored in the wrong file");
        continue;
      }
      records_[r.key] = std::move(r);
    } catch (const std::exception& ex) {
      rejected_.push_back(path.string() + ": malformed record (" + ex.what() + ")");
    }
  }
}

void CountLedger::save(int n, Entry p) const {
  if (!dir_) return;
  Json doc;
  doc["schema"] = kLedgerSchema;
  doc["engine_version"] = kEngineVersion;
  doc["n"] = n;
  doc["p"] = p;
  Json recs = Json::array();
  for (const auto& [key, r] : records_)
    if (key.n == n && key.p == p) {
      Json j = record_json(r);
      j["checksum"] = checksum(r);
      recs.push_back(std::move(j));
    }
  doc["records"] = std::move(recs);
  write_file_atomic(file_for(n, p), doc.dump(2) + "\n");
}

std::optional<CensusRecord> CountLedger::find(const CensusKey& key) const {
  std::lock_guard lock(mu_);
  load(key.n, key.p);
  auto it = records_.find(key);
  if (it != records_.end()) return it->second;
  if (key.corank) {
    CensusKey full = key;
    full.corank.reset();
    it = records_.find(full);
    if (it != records_.end()) return restrict_to_corank(it->second, *key.corank);
  }
  return std::nullopt;
}

void CountLedger::commit(const CensusRecord& r) {
  std::lock_guard lock(mu_);
  load(r.key.n, r.key.p);
  records_[r.key] = r;
  save(r.key.n, r.key.p);
}

std::vector<CensusKey> CountLedger::keys() const {
  std::lock_guard lock(mu_);
  std::vector<CensusKey> out;
  for (const auto& [k, r] : records_) out.push_back(k);
  return out;
}

std::vector<std::string> CountLedger::rejected() const {
  std::lock_guard lock(mu_);
  return rejected_;
}

CensusRecord census(const CensusKey& key, CountLedger& ledger, const CensusOptions& opt) {
  auto cached = ledger.find(key);
  if (cached && !opt.recheck) return *cached;
  CensusRecord fresh = compute_census(key, opt);
  if (cached) {
    if (!cached->same_counts(fresh)) throw CacheMismatch("cached census differs from recomputation at " + key.str());
    return *cached;
  }
  ledger.commit(fresh);
  return fresh;
}

Int g3(Entry p, int e) {
  if (e < 0) throw std::domain_error("g3: negative exponent");
  return expand(catalog("B_2"), SeriesBounds::univariate(e)).at_prime(e, Int(p));
}

Int g4(Entry p, int e) {
  if (e < 0) throw std::domain_error("g4: negative exponent");
  return expand(catalog("B_3"), SeriesBounds::univariate(e)).at_prime(e, Int(p));
}

Int formula_h(int n, int k, Entry p, int e) {
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) throw std::domain_error("formula_h: p must be prime");
  if (k < 1 || k > 3) throw std::domain_error("formula_h: only coranks 1, 2 and 3 have closed forms");
  if (n <= k) throw std::domain_error("formula_h: requires n > k");
  if (e < k) throw std::domain_error("formula_h: requires e >= k");
  switch (k) {
    case 1:
      return binomial(static_cast<unsigned>(n), 2);
    case 2:
      return coeff_a(n) * g3(p, e) + coeff_b(n) * Int(e - 1);
    default: {
      Int weighted = 0;
      for (int j = 2; j <= e - 1; ++j) weighted += Int(j - 1) * g3(p, j);
      return coeff_c(n) * g4(p, e) + coeff_d(n) * weighted;
    }
  }
}

Int formula_h_direct_sum(int n, int k, Entry p, int e) {
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) throw std::domain_error("formula_h_direct_sum: p must be prime");
  if (k < 1 || k > 3) throw std::domain_error("formula_h_direct_sum: corank must be 1, 2 or 3");
  if (n < 1 || e < 0) throw std::domain_error("formula_h_direct_sum: bad n or e");
  auto c = [](int a, int b) { return a < 0 || b < 0 ? Int(0) : binomial(static_cast<unsigned>(a), static_cast<unsigned>(b)); };
  // Blocks of size s contribute s - 1 to the corank; a size-2 block of index p^m >= p is unique.
  switch (k) {
    case 1:
      return e >= 1 ? c(n, 2) : Int(0);
    case 2:
      return c(n, 3) * g3(p, e) + 3 * c(n, 4) * c(e - 1, 1);
    default: {
      Int mixed = 0;
      for (int m = 2; m <= e - 1; ++m) mixed += g3(p, m);
      return c(n, 4) * g4(p, e) + c(n, 3) * c(n - 3, 2) * mixed + 15 * c(n, 6) * c(e - 1, 2);
    }
  }
}

Int ExtendedTable::N(std::int64_t x) const {
  if (x - 1 > limit) throw std::out_of_range("N: beyond the table");
  Int s = 0;
  for (std::int64_t j = 1; j < x; ++j) s += f[static_cast<std::size_t>(j)];
  return s;
}

Int ExtendedTable::H(int k, std::int64_t x) const {
  if (x > limit) throw std::out_of_range("H: beyond the table");
  if (k < 0 || k >= n) throw std::out_of_range("H: corank out of range");
  Int s = 0;
  for (std::int64_t j = 1; j <= x; ++j) s += h_tilde[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  return s;
}

Int ExtendedTable::L(std::int64_t x) const {
  if (x - 1 > limit) throw std::out_of_range("L: beyond the table");
  Int s = 0;
  for (std::int64_t j = 1; j < x; ++j) s += lattices[static_cast<std::size_t>(j)];
  return s;
}

std::vector<Int> multiplicative_table(std::int64_t limit, const LocalCounts& local,
                                      std::vector<std::pair<Entry, int>>* missing) {
  if (limit < 0) throw std::invalid_argument("multiplicative_table: negative limit");
  const auto size = static_cast<std::size_t>(limit) + 1;
  std::vector<Int> a(size, Int(0));
  if (limit >= 1) a[1] = 1;
  std::set<std::pair<Entry, int>> absent;
  std::map<std::pair<Entry, int>, std::optional<Int>> memo;
  std::vector<std::int64_t> spf(size, 0);
  for (std::int64_t i = 2; i <= limit; ++i)
    if (spf[static_cast<std::size_t>(i)] == 0)
      for (std::int64_t j = i; j <= limit; j += i)
        if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = i;
  for (std::int64_t j = 2; j <= limit; ++j) {
    const Entry p = spf[static_cast<std::size_t>(j)];
    std::int64_t rest = j;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    auto [it, fresh] = memo.try_emplace({p, e});
    if (fresh) it->second = local(p, e);
    if (!it->second) {
      absent.insert({p, e});
      continue;
    }
    a[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(rest)] * *it->second;
  }
  if (missing) missing->assign(absent.begin(), absent.end());
  return a;
}

std::vector<Int> lattice_counts(int n, std::int64_t limit) {
  if (n < 1) throw std::invalid_argument("lattice_counts: n must be positive");
  auto local = [n](Entry p, int e) -> std::optional<Int> {
    Int total = 0;
    for (const auto& c : compositions(e, n, false)) {
      Int term = 1;
      for (int i = 0; i < n; ++i) term *= ipow(Int(p), static_cast<unsigned>(c.parts[static_cast<std::size_t>(i)] * (n - 1 - i)));
      total += term;
    }
    return total;
  };
  auto out = multiplicative_table(limit, local);
  return out;
}

ExtendedTable multiplicative_extend(int n, std::int64_t limit, CountLedger& ledger, const CensusOptions* fill) {
  ExtendedTable t;
  t.n = n;
  t.limit = limit;
  std::map<std::pair<Entry, int>, std::optional<CensusRecord>> records;
  auto record = [&](Entry p, int e) -> const std::optional<CensusRecord>& {
    auto [it, fresh] = records.try_emplace({p, e});
    if (fresh) {
      const CensusKey key{n, p, e, std::nullopt};
      it->second = fill ? std::optional<CensusRecord>(census(key, ledger, *fill)) : ledger.find(key);
    }
    return it->second;
  };
  t.f = multiplicative_table(
      limit,
      [&](Entry p, int e) -> std::optional<Int> {
        const auto& r = record(p, e);
        return r ? std::optional<Int>(r->f) : std::nullopt;
      },
      &t.missing);
  for (int k = 0; k < n; ++k)
    t.h_tilde.push_back(multiplicative_table(limit, [&](Entry p, int e) -> std::optional<Int> {
      const auto& r = record(p, e);
      return r ? std::optional<Int>(r->h_tilde(k)) : std::nullopt;
    }));
  t.lattices = lattice_counts(n, limit);
  return t;
}

}  // namespace subring
