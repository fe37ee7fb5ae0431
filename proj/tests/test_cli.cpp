#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "nds/errors.hpp"
#include "nds/experiment.hpp"

using namespace nds;

namespace {
const char* kRotations = R"({
  "system": {"space": "circle", "family": {"name": "rotation_dyadic"}},
  "truncation": {"N_max": 16, "K_max": 4096, "eps": ["1/8"]},
  "checks": [{"op": "Lstar"}, {"op": "L"}, {"op": "DOstar", "eps": ["1/16", "1/4"]}]
})";

const char* kTent = R"({
  "system": {"gallery": "G5-tent-constant-slope"},
  "truncation": {"eps": "1/8", "horizon": 16},
  "checks": [{"op": "transitivity", "expect": "transitive-on-grid"}]
})";

std::string field_of(const std::string& text) {
  try {
    parse_experiment_config(Json::parse(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}
}  // namespace

TEST_CASE("Lstar record carries the stated trace") {
  const auto res = run_experiment(parse_experiment_config(Json::parse(kRotations)));
  REQUIRE(res.records.size() == 4);  // DOstar runs once per eps
  const Json& rep = res.records[0].json.at("report");
  CHECK(rep.at("condition") == "Lstar");
  CHECK(rep.at("trace")[2].at("n") == 3);
  CHECK(rep.at("trace")[2].at("value") == "3/8");
  CHECK(res.records[2].eps == "1/16");
  CHECK(res.records[3].eps == "1/4");
  CHECK(res.failures() == 0);
}

TEST_CASE("records round-trip and runs are deterministic") {
  const auto cfg = parse_experiment_config(Json::parse(kRotations));
  const std::string a = records_jsonl(run_experiment(cfg, Exec::Serial));
  const std::string b = records_jsonl(run_experiment(cfg, Exec::Parallel));
  CHECK(a == b);
  std::istringstream in(a);
  std::string line;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    CHECK(Json::parse(j.dump()) == j);
    const ConditionReport r = condition_report_from_json(j.at("report"));
    CHECK(to_json(r) == j.at("report"));
  }
}

TEST_CASE("empty checks list") {
  const auto res = run_experiment(parse_experiment_config(Json::parse(
      R"({"system": {"gallery": "G5-tent-constant-slope"}, "checks": []})")));
  CHECK(res.records.empty());
  CHECK(records_jsonl(res).empty());
}

TEST_CASE("schema errors name the field") {
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"}, "checks": [{"op": "CC", "eps": "0"}]})") ==
        "checks[0].eps");
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"}, "truncation": {"eps": ["1/2", "0"]}})") ==
        "truncation.eps[1]");
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"}, "extra": 1})") == "extra");
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"}, "checks": [{"op": "nope"}]})") ==
        "checks[0].op");
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"}, "checks": [{"op": "CC", "expect": "yes"}]})") ==
        "checks[0].expect");
  CHECK(field_of(R"({"system": {"gallery": "G3-cantor-adding-machine", "params": {"n": 40}}})") ==
        "system.params.n");
  CHECK(field_of(R"({"system": {"space": "circle", "family": {"name": "rotation_dyadic"}},
                     "checks": [{"op": "fix_inclusion", "n": 1}]})") == "checks[0].op");
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"}, "output": {"format": "xml"}})") ==
        "output.format");
  CHECK(field_of(R"({"system": {"gallery": "G5-tent-constant-slope"},
                     "checks": [{"op": "sensitivity", "delta": "1/8", "probe_eps": "1/4"}]})") ==
        "checks[0].probe_eps");
}

TEST_CASE("expectation mismatch fails the record") {
  const auto res = run_experiment(parse_experiment_config(Json::parse(R"({
    "system": {"space": "circle", "family": {"name": "rotation_dyadic"}},
    "truncation": {"N_max": 8, "eps": "1/100"},
    "checks": [{"op": "CCstar", "expect": "exact-proof"}, {"op": "CC", "expect": "exact-proof"}]})")));
  REQUIRE(res.records.size() == 2);
  CHECK_FALSE(res.records[0].passed);
  CHECK(res.records[1].passed);
  CHECK(res.failures() == 1);
  CHECK(summary_table(res).find("FAIL") != std::string::npos);
}

TEST_CASE("plot data") {
  const auto rot = run_experiment(parse_experiment_config(Json::parse(kRotations)));
  std::vector<Json> records;
  for (const auto& r : rot.records) records.push_back(r.json);
  const std::string trace = plot_data_csv(records, "trace");
  CHECK(trace.rfind("record,condition,n,value,decimal,k\n", 0) == 0);
  CHECK(trace.find("0,Lstar,3,3/8,0.375,3\n") != std::string::npos);
  const std::string cov = plot_data_csv(records, "coverage");
  CHECK(cov.find("2,DOstar,1,") != std::string::npos);
  CHECK_THROWS_AS(plot_data_csv(records, "pair-matrix"), UsageError);
  CHECK_THROWS_AS(plot_data_csv(records, "histogram"), ConfigError);

  // Pair matrix cells read back equal to the JSON pair table.
  const auto tent = run_experiment(parse_experiment_config(Json::parse(kTent)));
  const Json& rep = tent.records.at(0).json.at("report");
  const std::string csv = plot_data_csv({tent.records[0].json}, "pair-matrix");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t u = 0;
  while (std::getline(in, line)) {
    std::vector<int> cells;
    std::size_t pos = line.rfind('"');
    std::istringstream row(line.substr(pos + 2));
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(std::stoi(cell));
    CHECK(Json(cells) == rep.at("pair_table")[u]);
    ++u;
  }
  CHECK(u == rep.at("pair_table").size());
}
