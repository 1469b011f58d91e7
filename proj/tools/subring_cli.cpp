// subring: batch front end for enumeration, census, series, constants and verification.

#include "subring/analytics.hpp"
#include "subring/counting.hpp"
#include "subring/symbolic.hpp"
#include "subring/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <ctime>
#include <iostream>
#include <set>
#include <sstream>

using namespace subring;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kReportSchema = "subring-report/1";

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kBudget = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "3", "2,3,5" or "1..6", possibly mixed: "1..3,5".
std::vector<std::int64_t> parse_list(const std::string& text, const char* what) {
  std::set<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError(std::string("bad value for ") + what + ": '" + text + "'");
    return static_cast<std::int64_t>(v);
  };
  while (std::getline(ss, item, ',')) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.insert(num(item));
      continue;
    }
    std::int64_t lo = num(item.substr(0, dots)), hi = num(item.substr(dots + 2));
    if (hi < lo) throw UsageError(std::string("empty range for ") + what + ": '" + item + "'");
    for (std::int64_t v = lo; v <= hi; ++v) out.insert(v);
  }
  if (out.empty()) throw UsageError(std::string("no values for ") + what);
  return {out.begin(), out.end()};
}

std::vector<int> to_ints(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

struct RunConfig {
  std::string command;
  std::string n_text, p_text, e_text;
  std::vector<int> n, e;
  std::vector<Entry> p;
  std::string mode = "pruned";
  std::string rules = PruneRuleSet::all().fingerprint();
  std::optional<int> corank;
  bool irreducible = false;
  std::uint64_t budget = EnumOptions{}.node_budget;
  unsigned threads = 1;
  std::string format = "json";
  std::string out, dump;
  std::string cache_dir;
  bool no_cache = false;
  bool recheck = false;
  bool progress = false;
  std::string suite = "all";
  bool small = false;
  bool stretch = false;
  std::optional<std::int64_t> max_index;
  std::vector<std::string> ids;
  int series_max = 6;
  std::optional<int> series_total;
  std::int64_t cutoff = EulerProductOptions{}.cutoff;

  void normalize() {
    if (!n_text.empty()) n = to_ints(parse_list(n_text, "-n"));
    if (!e_text.empty()) e = to_ints(parse_list(e_text, "-e"));
    if (!p_text.empty()) p = parse_list(p_text, "-p");
    for (Entry q : p)
      if (!is_prime(static_cast<std::uint64_t>(q))) throw UsageError("-p: " + std::to_string(q) + " is not prime");
    for (int v : n)
      if (v < 1) throw UsageError("-n: dimension must be >= 1");
    for (int v : e)
      if (v < 0) throw UsageError("-e: exponent must be >= 0");
    parse_mode(mode);
    rules = PruneRuleSet::from_fingerprint(rules).fingerprint();
    if (format != "json" && format != "csv" && format != "text") throw UsageError("--format must be json, csv or text");
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (no_cache) cache_dir.clear();
    else if (cache_dir.empty()) cache_dir = CountLedger::default_dir().string();
  }

  CensusOptions census_options() const {
    CensusOptions o;
    o.mode = parse_mode(mode);
    o.rules = PruneRuleSet::from_fingerprint(rules);
    o.enumeration.node_budget = budget;
    o.enumeration.threads = threads;
    if (progress) o.enumeration.progress = &std::cerr;
    o.recheck = recheck;
    return o;
  }

  /// Canonical form: fixed key order, normalized lists; embedded in reports.
  json canonical() const {
    json j;
    j["command"] = command;
    j["n"] = n;
    j["p"] = p;
    j["e"] = e;
    j["mode"] = mode;
    j["rules"] = rules;
    j["corank"] = corank ? json(*corank) : json(nullptr);
    j["irreducible"] = irreducible;
    j["node_budget"] = budget;
    j["threads"] = threads;
    j["format"] = format;
    j["out"] = out;
    j["dump"] = dump;
    j["cache_dir"] = no_cache ? json(nullptr) : json(cache_dir);
    j["recheck"] = recheck;
    j["suite"] = suite;
    j["small"] = small;
    j["stretch"] = stretch;
    j["max_index"] = max_index ? json(*max_index) : json(nullptr);
    j["ids"] = ids;
    j["series_max"] = series_max;
    j["series_total"] = series_total ? json(*series_total) : json(nullptr);
    j["cutoff"] = cutoff;
    return j;
  }
};

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(fixed));
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

/// What a subcommand produced: JSON body, flat rows for CSV/text, and an exit code.
struct Outcome {
  json body;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int exit = kOk;
};

void emit(const RunConfig& cfg, const Outcome& o) {
  std::string text;
  if (cfg.format == "json") {
    json r;
    r["schema"] = kReportSchema;
    r["engine_version"] = kEngineVersion;
    r["catalog_version"] = catalog_version();
    r["generated_at"] = timestamp();
    r["config"] = cfg.canonical();
    r["exit_code"] = o.exit;
    r["result"] = o.body;
    text = r.dump(2) + "\n";
  } else if (cfg.format == "csv") {
    std::string line;
    for (std::size_t i = 0; i < o.header.size(); ++i) line += (i ? "," : "") + csv_field(o.header[i]);
    text = line + "\n";
    for (const auto& row : o.rows) {
      line.clear();
      for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + csv_field(row[i]);
      text += line + "\n";
    }
  } else {
    for (const auto& row : o.rows) {
      std::string line;
      for (std::size_t i = 0; i < row.size() && i < o.header.size(); ++i)
        line += (i ? "  " : "") + o.header[i] + "=" + row[i];
      text += line + "\n";
    }
  }
  if (cfg.out.empty()) std::cout << text;
  else write_file_atomic(cfg.out, text);
}

CountLedger make_ledger(const RunConfig& cfg) {
  return cfg.no_cache ? CountLedger() : CountLedger(cfg.cache_dir);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

Outcome cmd_enumerate(const RunConfig& cfg) {
  require(cfg.n.size() == 1 && cfg.p.size() == 1 && cfg.e.size() == 1, "enumerate needs single -n, -p and -e");
  EnumSpec s;
  s.n = cfg.n[0];
  s.p = cfg.p[0];
  s.e = cfg.e[0];
  CensusOptions co = cfg.census_options();
  s.mode = co.mode;
  s.rules = co.rules;
  s.corank = cfg.corank;
  s.irreducible_only = cfg.irreducible;
  s.validate();
  std::ostringstream dump;
  std::uint64_t count = 0;
  EnumStats st = enumerate(
      s,
      [&](const EnumMatrix& m) {
        ++count;
        if (!cfg.dump.empty()) write_matrix(dump, m.hnf(), s.p);
      },
      co.enumeration);
  if (!cfg.dump.empty()) write_file_atomic(cfg.dump, dump.str());
  Outcome o;
  o.body = {{"n", s.n},         {"p", s.p},
            {"e", s.e},         {"mode", cfg.mode},
            {"rules", cfg.rules}, {"corank", cfg.corank ? json(*cfg.corank) : json(nullptr)},
            {"irreducible", cfg.irreducible}, {"count", count},
            {"nodes", st.nodes},  {"diagonals", st.diagonals}};
  o.header = {"n", "p", "e", "count", "nodes", "diagonals"};
  o.rows.push_back({std::to_string(s.n), std::to_string(s.p), std::to_string(s.e), std::to_string(count),
                    std::to_string(st.nodes), std::to_string(st.diagonals)});
  return o;
}

Outcome cmd_census(const RunConfig& cfg) {
  require(!cfg.n.empty() && !cfg.p.empty() && !cfg.e.empty(), "census needs -n, -p and -e");
  CountLedger ledger = make_ledger(cfg);
  CensusOptions co = cfg.census_options();
  Outcome o;
  o.body["records"] = json::array();
  o.header = {"n", "p", "e", "f", "g", "h", "cotypes", "violations", "consistent"};
  for (int n : cfg.n)
    for (Entry p : cfg.p)
      for (int e : cfg.e) {
        CensusKey key{n, p, e, cfg.corank};
        CensusRecord r = census(key, ledger, co);
        auto errs = r.consistency_errors();
        if (!errs.empty() || r.violations.total() != 0) o.exit = kFailed;
        o.body["records"].push_back(json::parse(record_to_json(r)));
        std::string h, cot;
        for (std::size_t k = 0; k < r.h.size(); ++k) h += (k ? ";" : "") + r.h[k].str();
        for (const auto& [c, v] : r.cotypes) cot += (cot.empty() ? "" : ";") + c.str() + ":" + v.str();
        o.rows.push_back({std::to_string(n), std::to_string(p), std::to_string(e), r.f.str(), r.g.str(), h, cot,
                          std::to_string(r.violations.total()), errs.empty() ? "true" : "false"});
      }
  return o;
}

Outcome cmd_series(const RunConfig& cfg) {
  require(cfg.ids.size() == 1, "series needs exactly one --id");
  require(cfg.p.size() <= 1, "series takes at most one -p");
  RatFunc f = catalog(cfg.ids[0]);
  SeriesBounds b;
  if (cfg.series_total) b = {{*cfg.series_total, *cfg.series_total, *cfg.series_total}, *cfg.series_total};
  else b = SeriesBounds::univariate(cfg.series_max);
  SeriesTable t = expand(f, b);
  Outcome o;
  o.body["id"] = cfg.ids[0];
  o.body["prime"] = cfg.p.empty() ? json(nullptr) : json(cfg.p[0]);
  o.body["coefficients"] = json::array();
  o.header = {"x", "y", "z", "coefficient"};
  for (const auto& [a, c] : t.coefficients()) {
    std::string v = cfg.p.empty() ? c.str() : t.at_prime(a, Int(cfg.p[0])).str();
    o.body["coefficients"].push_back({{"exponent", a}, {"value", v}});
    o.rows.push_back({std::to_string(a[0]), std::to_string(a[1]), std::to_string(a[2]), v});
  }
  return o;
}

Outcome cmd_constants(const RunConfig& cfg) {
  std::vector<std::string> ids = cfg.ids.empty() ? constant_ids() : cfg.ids;
  EulerProductOptions opt;
  opt.cutoff = cfg.cutoff;
  Outcome o;
  o.body["constants"] = json::array();
  o.header = {"id", "value", "bound", "expected", "tolerance", "relative", "status"};
  for (const auto& id : ids) {
    ConstantCheck c = compute_constant(id, opt);
    if (!c.passed()) o.exit = kFailed;
    char v[32], b[32], q[32];
    std::snprintf(v, sizeof v, "%.12g", c.computed.value);
    std::snprintf(b, sizeof b, "%.3g", c.computed.bound);
    std::snprintf(q, sizeof q, "%.10g", c.expected);
    o.body["constants"].push_back({{"id", id},
                                   {"description", c.description},
                                   {"value", c.computed.value},
                                   {"bound", c.computed.bound},
                                   {"expected", c.expected},
                                   {"tolerance", c.tolerance},
                                   {"relative", c.relative},
                                   {"status", c.passed() ? "pass" : "fail"}});
    o.rows.push_back({id, v, b, q, std::to_string(c.tolerance), c.relative ? "true" : "false",
                      c.passed() ? "pass" : "fail"});
  }
  return o;
}

Outcome cmd_verify(const RunConfig& cfg) {
  VerifyScope scope;
  scope.small = cfg.small;
  scope.primes = cfg.p;
  scope.max_index = cfg.max_index;
  scope.stretch = cfg.stretch;
  scope.census = cfg.census_options();
  scope.stretch_budget = cfg.budget;
  scope.constants.cutoff = cfg.cutoff;
  CountLedger ledger = make_ledger(cfg);
  auto checks = run_suite(cfg.suite, scope, ledger);
  Outcome o;
  std::map<std::string, int> tally{{"pass", 0}, {"fail", 0}, {"skipped", 0}};
  o.body["checks"] = json::array();
  o.header = {"id", "anchor", "lhs", "rhs", "status", "note"};
  for (const auto& c : checks) {
    tally[to_string(c.status)]++;
    if (c.status == CheckStatus::fail) o.exit = kFailed;
    o.body["checks"].push_back({{"id", c.id},
                                {"anchor", c.anchor},
                                {"lhs", c.lhs},
                                {"rhs", c.rhs},
                                {"status", to_string(c.status)},
                                {"note", c.note}});
    o.rows.push_back({c.id, c.anchor, c.lhs, c.rhs, to_string(c.status), c.note});
  }
  o.body["summary"] = tally;
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) std::cerr << "FAIL " << c.id << ": " << c.lhs << " vs " << c.rhs << "\n";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subrings of Z^n: enumeration, exact counts and constants"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s) {
    s->add_option("--format", cfg.format, "json, csv or text")->capture_default_str();
    s->add_option("-o,--out", cfg.out, "report path (written atomically); stdout when omitted");
  };
  auto enumeration = [&](CLI::App* s) {
    s->add_option("--mode", cfg.mode, "pruned or naive")->capture_default_str();
    s->add_option("--rules", cfg.rules, "pruning rule fingerprint")->capture_default_str();
    s->add_option("--budget", cfg.budget, "node budget")->capture_default_str();
    s->add_option("--threads", cfg.threads, "worker threads (0: one per core)")->capture_default_str();
    s->add_flag("--progress", cfg.progress, "print diagonals done / total on stderr");
  };
  auto caching = [&](CLI::App* s) {
    s->add_option("--cache-dir", cfg.cache_dir, "ledger directory (default $SUBRING_CACHE_DIR or .subring-cache)");
    s->add_flag("--no-cache", cfg.no_cache, "keep counts in memory only");
    s->add_flag("--recheck", cfg.recheck, "recompute cached records and fail on disagreement");
  };

  auto* en = app.add_subcommand("enumerate", "list subring matrices of one index p^e");
  en->add_option("-n", cfg.n_text, "dimension")->required();
  en->add_option("-p", cfg.p_text, "prime")->required();
  en->add_option("-e", cfg.e_text, "exponent")->required();
  en->add_option("--corank", cfg.corank, "only this corank");
  en->add_flag("--irreducible", cfg.irreducible, "only irreducible subrings");
  en->add_option("--dump", cfg.dump, "write matrices in the text format");
  enumeration(en);
  common(en);

  auto* ce = app.add_subcommand("census", "exact counts per index p^e");
  ce->add_option("-n", cfg.n_text, "dimensions, e.g. 3 or 2..6")->required();
  ce->add_option("-p", cfg.p_text, "primes, e.g. 2,3,5")->required();
  ce->add_option("-e", cfg.e_text, "exponents, e.g. 0..6")->required();
  ce->add_option("--corank", cfg.corank, "restrict to one corank");
  enumeration(ce);
  caching(ce);
  common(ce);

  auto* se = app.add_subcommand("series", "power-series coefficients of a catalog entry");
  se->add_option("--id", cfg.ids, "catalog id, e.g. zeta_Z3 or corank2(5)")->required();
  se->add_option("-e,--max", cfg.series_max, "largest x exponent (univariate)")->capture_default_str();
  se->add_option("--total", cfg.series_total, "largest total degree in x, y, z");
  se->add_option("-p", cfg.p_text, "evaluate coefficients at this prime");
  common(se);

  auto* co = app.add_subcommand("constants", "numeric constants with error bounds");
  co->add_option("--id", cfg.ids, "constant id (repeatable; default all)");
  co->add_option("--cutoff", cfg.cutoff, "largest prime evaluated exactly")->capture_default_str();
  common(co);

  auto* ve = app.add_subcommand("verify", "run verification suites");
  ve->add_option("--suite", cfg.suite, "suite name or all")->capture_default_str();
  ve->add_flag("--small", cfg.small, "reduced ranges");
  ve->add_option("-p", cfg.p_text, "restrict primes");
  ve->add_option("--max-index", cfg.max_index, "largest index for the cotype suite");
  ve->add_flag("--stretch", cfg.stretch, "extend the cotype suite at p = 2 to index 2^14");
  ve->add_option("--cutoff", cfg.cutoff, "prime cutoff for constants")->capture_default_str();
  enumeration(ve);
  caching(ve);
  common(ve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.normalize();
    if (cfg.command == "verify") {
      auto names = suite_names();
      require(cfg.suite == "all" || std::find(names.begin(), names.end(), cfg.suite) != names.end(),
              "unknown suite: " + cfg.suite);
    }
    Outcome o = cfg.command == "enumerate" ? cmd_enumerate(cfg)
                : cfg.command == "census"  ? cmd_census(cfg)
                : cfg.command == "series"  ? cmd_series(cfg)
                : cfg.command == "constants" ? cmd_constants(cfg)
                                             : cmd_verify(cfg);
    emit(cfg, o);
    return o.exit;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const CacheMismatch& e) {
    std::cerr << "cache mismatch: " << e.what() << "\n";
    return kFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
