#include "nds/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "nds/errors.hpp"
#include "nds/gallery.hpp"
#include "nds/serialization.hpp"

namespace nds {

namespace {

const std::map<std::string, std::vector<std::string>>& outcomes() {
  static const std::map<std::string, std::vector<std::string>> table = [] {
    const std::vector<std::string> verdicts{"holds-on-truncation", "fails-with-witness", "exact-proof"};
    std::map<std::string, std::vector<std::string>> t;
    for (const char* c : {"CC", "CCstar", "L", "Lstar", "DO", "DOstar"}) t[c] = verdicts;
    t["transitivity"] = {"transitive-on-grid", "fails-with-pair"};
    t["sensitivity"] = {"witness-at-every-probe", "probes-without-witness"};
    t["invariant_interval"] = {"stabilized", "inconclusive"};
    t["fix_inclusion"] = {"holds", "fails"};
    t["prefix_agreement"] = {"agrees-at-every-point", "some-point-never-agrees"};
    t["eventual_equality"] = {"eventual-equality", "violation-with-ccstar-witness", "theorem-check-failure",
                              "precondition-unmet"};
    t["equivalence"] = {"consistent", "instance-check-failure", "hypothesis-unmet"};
    return t;
  }();
  return table;
}

bool is_condition(const std::string& op) {
  return op == "CC" || op == "CCstar" || op == "L" || op == "Lstar" || op == "DO" || op == "DOstar";
}

int int_field(StrictObject& o, const std::string& key, int fallback, long lo, long hi) {
  const Json* v = o.optional(key);
  return v ? static_cast<int>(integer_from_json(*v, o.path(key), lo, hi)) : fallback;
}

std::vector<Rational> eps_list(const Json& j, const std::string& path) {
  std::vector<Rational> out;
  if (j.is_array()) {
    if (j.empty()) throw ConfigError(path, "expected at least one value");
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(positive_fraction_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(positive_fraction_from_json(j, path));
  }
  return out;
}

NDSystem parse_system(const Json& j, const std::string& path) {
  if (j.is_object() && j.contains("gallery")) {
    StrictObject o(j, path);
    const Json& id = o.required("gallery");
    if (!id.is_string()) throw ConfigError(o.path("gallery"), "expected a gallery id");
    const Json* params = o.optional("params");
    o.finish();
    try {
      return build_gallery_entry(id.get<std::string>(), params ? *params : Json::object()).system;
    } catch (const ConfigError& e) {
      throw ConfigError(path + "." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
  }
  return system_from_json(j, path);
}

Truncation parse_truncation(const Json* j) {
  Truncation t;
  if (j == nullptr) return t;
  StrictObject o(*j, "truncation");
  t.N_max = int_field(o, "N_max", t.N_max, 1, 100000);
  t.K_max = int_field(o, "K_max", t.K_max, 1, 1L << 30);
  if (const Json* L = o.optional("L")) t.L = static_cast<int>(integer_from_json(*L, o.path("L"), 1, 64));
  if (const Json* e = o.optional("eps")) t.eps = eps_list(*e, o.path("eps"));
  t.horizon = int_field(o, "horizon", t.horizon, 1, 100000);
  t.grid = static_cast<std::size_t>(int_field(o, "grid", static_cast<int>(t.grid), 1, 1 << 20));
  o.finish();
  return t;
}

int cantor_length(const NDSystem& sys, const Truncation& t) {
  if (t.L) return *t.L;
  if (sys.space() == Space::Cantor) {
    if (const auto* a = std::get_if<AddingMachineMap>(&sys.limit())) return a->word_length;
  }
  return CantorWord::kDefaultLength;
}

CheckSpec parse_check(const Json& j, const std::string& path, const NDSystem& sys, const Truncation& t) {
  StrictObject o(j, path);
  CheckSpec c;
  const Json& op = o.required("op");
  if (!op.is_string() || outcomes().count(op.get<std::string>()) == 0) {
    std::string known;
    for (const auto& [name, _] : outcomes()) known += (known.empty() ? "" : ", ") + name;
    throw ConfigError(o.path("op"), "unknown check, expected one of " + known);
  }
  c.op = op.get<std::string>();
  const std::string& o_ = c.op;
  const bool takes_eps = is_condition(o_) || o_ == "transitivity" || o_ == "eventual_equality" || o_ == "equivalence";
  if (takes_eps) {
    const Json* e = o.optional("eps");
    c.eps = e ? eps_list(*e, o.path("eps")) : t.eps;
  }
  if (o_ == "DO" || o_ == "DOstar") {
    const Json* x = o.optional("x0");
    c.x0 = x ? point_from_json(*x, sys.space(), o.path("x0"), cantor_length(sys, t))
             : point_from_json(Json("0"), sys.space(), o.path("x0"), cantor_length(sys, t));
  }
  if (o_ == "transitivity" || o_ == "sensitivity" || o_ == "invariant_interval") {
    if (const Json* m = o.optional("map")) {
      if (m->is_string() && m->get<std::string>() == "limit") {
        c.map_index = 0;
      } else {
        c.map_index = static_cast<int>(integer_from_json(*m, o.path("map"), 1, 1000000));
      }
    }
  }
  if (o_ == "transitivity" || o_ == "sensitivity" || o_ == "equivalence") {
    c.horizon = int_field(o, "horizon", t.horizon, 1, 100000);
  }
  if (o_ == "sensitivity") {
    c.delta = positive_fraction_from_json(o.required("delta"), o.path("delta"));
    const Json* pe = o.optional("probe_eps");
    c.probe_eps = pe ? positive_fraction_from_json(*pe, o.path("probe_eps")) : c.delta;
    if (c.delta < c.probe_eps) throw ConfigError(o.path("probe_eps"), "must not exceed delta");
    c.probe_grid = int_field(o, "probe_grid", c.probe_grid, 1, 1 << 16);
  }
  if (o_ == "invariant_interval") {
    c.seed = interval_from_json(o.required("seed"), o.path("seed"));
    c.max_rounds = int_field(o, "max_rounds", c.max_rounds, 1, 100000);
    c.max_period = int_field(o, "max_period", c.max_period, 2, 64);
  }
  if (o_ == "fix_inclusion") {
    c.n = static_cast<int>(integer_from_json(o.required("n"), o.path("n"), 1, 1000000));
    c.j_max = int_field(o, "j_max", c.j_max, 0, 16);
  }
  if (o_ == "prefix_agreement") {
    c.p = rational_from_json(o.required("p"), o.path("p"));
    if (c.p < 0 || 1 < c.p) throw ConfigError(o.path("p"), "must lie in [0,1]");
    c.depth = int_field(o, "depth", c.depth, 0, 12);
  }
  if (const Json* e = o.optional("expect")) {
    const auto& allowed = outcomes().at(c.op);
    if (!e->is_string() || std::find(allowed.begin(), allowed.end(), e->get<std::string>()) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(o.path("expect"), "expected one of " + list);
    }
    c.expect = e->get<std::string>();
  }
  o.finish();
  const bool interval_only = o_ == "invariant_interval" || o_ == "fix_inclusion" || o_ == "prefix_agreement" ||
                             o_ == "eventual_equality";
  if (interval_only && sys.space() != Space::Interval) {
    throw ConfigError(o.path("op"), c.op + " needs an interval system");
  }
  return c;
}

Map select_map(const NDSystem& sys, int index) { return index == 0 ? sys.limit() : sys.at(index); }

std::vector<Point> probe_points(Space s, int grid, int cantor_len) {
  std::vector<Point> out;
  switch (s) {
    case Space::Interval:
      for (int j = 0; j <= grid; ++j) out.emplace_back(IntervalPoint(Rational(j, grid)));
      break;
    case Space::Circle:
      for (int j = 0; j < grid; ++j) out.emplace_back(CirclePoint(Rational(j, grid)));
      break;
    case Space::Cantor:
      for (int j = 0; j < grid; ++j) out.emplace_back(CantorWord(static_cast<std::uint64_t>(j), cantor_len));
      break;
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

// Runs one (check, eps) pair and returns outcome plus report JSON.
std::pair<std::string, Json> run_one(const ExperimentConfig& cfg, const CheckSpec& c, const Rational* eps,
                                     Exec exec) {
  const NDSystem& sys = cfg.system;
  const Truncation& t = cfg.truncation;
  SweepOptions opt;
  opt.N_max = t.N_max;
  opt.K_max = t.K_max;
  opt.grid = t.grid;
  opt.exec = exec;
  if (is_condition(c.op)) {
    ConditionReport r;
    if (c.op == "CC") r = check_CC(sys, *eps, opt);
    if (c.op == "CCstar") r = check_CCstar(sys, *eps, opt);
    if (c.op == "L") r = check_L(sys, *eps, opt);
    if (c.op == "Lstar") r = check_Lstar(sys, *eps, opt);
    if (c.op == "DO") r = check_DO(sys, *c.x0, *eps, opt);
    if (c.op == "DOstar") r = check_DOstar(sys, *c.x0, *eps, opt);
    return {std::string(to_string(r.verdict)), to_json(r)};
  }
  if (c.op == "transitivity") {
    const auto r = test_transitivity(select_map(sys, c.map_index), *eps, *c.horizon, exec);
    return {r.transitive_on_grid ? "transitive-on-grid" : "fails-with-pair", to_json(r)};
  }
  if (c.op == "sensitivity") {
    const auto probes = probe_points(sys.space(), c.probe_grid, cantor_length(sys, t));
    const auto r = test_sensitivity(select_map(sys, c.map_index), c.delta, c.probe_eps, *c.horizon, probes, exec);
    return {r.failures.empty() ? "witness-at-every-probe" : "probes-without-witness", to_json(r)};
  }
  if (c.op == "invariant_interval") {
    const auto r = find_invariant_interval(select_map(sys, c.map_index), c.seed, c.max_rounds, c.max_period);
    return {r.status == InvariantStatus::Stabilized ? "stabilized" : "inconclusive", to_json(r)};
  }
  if (c.op == "fix_inclusion") {
    const auto r = check_fix_inclusion(sys.limit(), sys.at(c.n), c.j_max);
    return {r.holds ? "holds" : "fails", to_json(r)};
  }
  if (c.op == "prefix_agreement") {
    const auto r = check_prefix_agreement(sys, c.p, c.depth, t.N_max);
    const bool all = std::all_of(r.points.begin(), r.points.end(), [](const PrefixPoint& q) { return q.n0.has_value(); });
    return {all ? "agrees-at-every-point" : "some-point-never-agrees", to_json(r)};
  }
  if (c.op == "eventual_equality") {
    const auto r = check_eventual_equality(sys, *eps, opt);
    return {std::string(to_string(r.status)), to_json(r)};
  }
  const auto r = check_equivalence_instance(sys, *eps, t.N_max, *c.horizon, opt);
  return {std::string(to_string(r.status)), to_json(r)};
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  StrictObject o(j, "");
  const Json& sys_j = o.required("system");
  const Json* checks_j = o.optional("checks");
  const Json* trunc_j = o.optional("truncation");
  const Json* out_j = o.optional("output");
  o.finish();
  ExperimentConfig cfg{parse_system(sys_j, "system"), parse_truncation(trunc_j), {}, "jsonl", std::nullopt};
  if (checks_j != nullptr) {
    if (!checks_j->is_array()) throw ConfigError("checks", "expected an array");
    for (std::size_t i = 0; i < checks_j->size(); ++i) {
      cfg.checks.push_back(
          parse_check((*checks_j)[i], "checks[" + std::to_string(i) + "]", cfg.system, cfg.truncation));
    }
  }
  if (out_j != nullptr) {
    StrictObject oo(*out_j, "output");
    if (const Json* f = oo.optional("format")) {
      if (!f->is_string() || (f->get<std::string>() != "jsonl" && f->get<std::string>() != "csv")) {
        throw ConfigError("output.format", "expected \"jsonl\" or \"csv\"");
      }
      cfg.format = f->get<std::string>();
    }
    if (const Json* p = oo.optional("path")) {
      if (!p->is_string() || p->get<std::string>().empty()) throw ConfigError("output.path", "expected a file path");
      cfg.path = p->get<std::string>();
    }
    oo.finish();
  }
  return cfg;
}

std::size_t ExperimentResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.passed; }));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, Exec exec) {
  ExperimentResult out;
  for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
    const CheckSpec& c = cfg.checks[i];
    std::vector<const Rational*> eps;
    for (const auto& e : c.eps) eps.push_back(&e);
    if (eps.empty()) eps.push_back(nullptr);
    for (const Rational* e : eps) {
      auto [outcome, report] = run_one(cfg, c, e, exec);
      CheckRecord rec;
      rec.op = c.op;
      rec.eps = e ? e->str() : "";
      rec.outcome = outcome;
      rec.expect = c.expect;
      const bool theorem_failure = outcome == "theorem-check-failure" || outcome == "instance-check-failure";
      rec.passed = !theorem_failure && (!c.expect || *c.expect == outcome);
      rec.json = Json{{"record", "check"},
                      {"index", i},
                      {"op", c.op},
                      {"eps", e ? Json(e->str()) : Json(nullptr)},
                      {"outcome", outcome},
                      {"expect", c.expect ? Json(*c.expect) : Json(nullptr)},
                      {"passed", rec.passed},
                      {"report", std::move(report)}};
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

std::string records_jsonl(const ExperimentResult& r) {
  std::string out;
  for (const auto& rec : r.records) out += rec.json.dump() + "\n";
  return out;
}

std::string records_csv(const ExperimentResult& r) {
  std::string out = "index,op,eps,outcome,expect,passed\n";
  for (const auto& rec : r.records) {
    out += std::to_string(rec.json.at("index").get<std::size_t>()) + "," + csv_field(rec.op) + "," +
           csv_field(rec.eps) + "," + csv_field(rec.outcome) + "," + csv_field(rec.expect.value_or("")) + "," +
           (rec.passed ? "true" : "false") + "\n";
  }
  return out;
}

std::string summary_table(const ExperimentResult& r) {
  std::size_t w_op = 2, w_eps = 3, w_out = 7, w_exp = 6;
  for (const auto& rec : r.records) {
    w_op = std::max(w_op, rec.op.size());
    w_eps = std::max(w_eps, rec.eps.size());
    w_out = std::max(w_out, rec.outcome.size());
    w_exp = std::max(w_exp, rec.expect.value_or("-").size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - std::min(w, s.size()), ' '); };
  std::string out = pad("#", 4) + pad("op", w_op + 2) + pad("eps", w_eps + 2) + pad("outcome", w_out + 2) +
                    pad("expect", w_exp + 2) + "status\n";
  for (const auto& rec : r.records) {
    out += pad(std::to_string(rec.json.at("index").get<std::size_t>()), 4) + pad(rec.op, w_op + 2) +
           pad(rec.eps.empty() ? "-" : rec.eps, w_eps + 2) + pad(rec.outcome, w_out + 2) +
           pad(rec.expect.value_or("-"), w_exp + 2) + (rec.passed ? "ok" : "FAIL") + "\n";
  }
  out += std::to_string(r.records.size()) + " records, " + std::to_string(r.failures()) + " failed\n";
  return out;
}

std::string plot_data_csv(const std::vector<Json>& records, const std::string& kind) {
  if (kind != "trace" && kind != "coverage" && kind != "pair-matrix") {
    throw ConfigError("--kind", "expected trace, coverage or pair-matrix");
  }
  // Reports may be bare or wrapped in a check record.
  std::vector<std::pair<std::string, const Json*>> reports;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Json& j = records[i];
    const Json* rep = j.contains("report") ? &j.at("report") : &j;
    reports.emplace_back(std::to_string(i), rep);
  }
  auto dec = [](const std::string& exact) { return Rational::parse(exact).decimal(12); };
  std::string out;
  bool found = false;
  if (kind == "trace") {
    out = "record,condition,n,value,decimal,k\n";
    for (const auto& [id, rep] : reports) {
      if (!rep->contains("trace")) continue;
      found = true;
      for (const auto& t : rep->at("trace")) {
        const std::string v = t.at("value").get<std::string>();
        out += id + "," + rep->value("condition", "") + "," + std::to_string(t.at("n").get<int>()) + "," + v + "," +
               dec(v) + "," + std::to_string(t.value("k", 0)) + "\n";
      }
    }
  } else if (kind == "coverage") {
    out = "record,condition,N,fraction,decimal\n";
    for (const auto& [id, rep] : reports) {
      if (!rep->contains("coverage") || rep->at("coverage").empty()) continue;
      found = true;
      for (const auto& c : rep->at("coverage")) {
        const std::string v = c.at("fraction").get<std::string>();
        out += id + "," + rep->value("condition", "") + "," + std::to_string(c.at("N").get<int>()) + "," + v + "," +
               dec(v) + "\n";
      }
    }
  } else {
    for (const auto& [id, rep] : reports) {
      if (!rep->contains("pair_table") || !rep->contains("grid")) continue;
      found = true;
      const Json& grid = rep->at("grid");
      std::vector<std::string> labels;
      for (const auto& g : grid) labels.push_back(interval_from_json(g, "grid").str());
      out += "record," + std::string("U\\V");
      for (const auto& l : labels) out += "," + csv_field(l);
      out += "\n";
      const Json& table = rep->at("pair_table");
      for (std::size_t u = 0; u < table.size(); ++u) {
        out += id + "," + csv_field(labels.at(u));
        for (const auto& cell : table[u]) out += "," + std::to_string(cell.get<int>());
        out += "\n";
      }
    }
  }
  if (!found) throw UsageError("no record carries a " + kind + " series");
  return out;
}

}  // namespace nds
