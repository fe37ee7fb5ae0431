// nds: experiment runner and gallery driver.
//
//   nds run <config.json>
//   nds gallery list
//   nds gallery run <id> [--params '{"N": 8}' | --params @file.json] [--out path]
//   nds gallery run-all [--out path]
//   nds emit-plot-data <report> --kind trace|coverage|pair-matrix [--out path]
//
// Exit status: 0 ok, 1 assertion or theorem-check failure (or missing plot
// series), 2 invalid config or arguments, 3 execution error.
// NDS_WORKERS sets the number of worker threads.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nds/errors.hpp"
#include "nds/experiment.hpp"
#include "nds/gallery.hpp"

using namespace nds;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kSchema = 2;
constexpr int kExecution = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(what, std::string("invalid JSON: ") + e.what());
  }
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw std::runtime_error("cannot write " + *path);
  out << text;
}

// JSON-lines, or one JSON document.
std::vector<Json> read_records(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<Json> out;
  std::istringstream in(text);
  std::string line;
  bool jsonl = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      jsonl = false;
      break;
    }
    out.push_back(std::move(j));
  }
  if (!jsonl) {
    out.clear();
    const Json j = parse_json(text, path);
    if (j.is_array()) {
      for (const auto& e : j) out.push_back(e);
    } else {
      out.push_back(j);
    }
  }
  return out;
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig cfg = [&] { return parse_experiment_config(parse_json(read_file(config_path), config_path)); }();
  const ExperimentResult res = run_experiment(cfg);
  const std::string body = cfg.format == "csv" ? records_csv(res) : records_jsonl(res);
  if (cfg.path) {
    write_output(cfg.path, body);
    std::cout << summary_table(res);
  } else {
    std::cout << body;
    std::cerr << summary_table(res);
  }
  return res.failures() == 0 ? kOk : kFailed;
}

std::string gallery_summary(const std::vector<GalleryReport>& reports) {
  std::ostringstream os;
  std::size_t total = 0, failed = 0;
  for (const auto& r : reports) {
    os << (r.passed() ? "ok    " : "FAIL  ") << r.id << "  " << r.results.size() - r.failures() << "/"
       << r.results.size() << "\n";
    for (const auto& a : r.results) {
      if (!a.passed) {
        os << "      " << a.description << ": expected " << a.expected << ", got "
           << (a.error.empty() ? a.actual : "error: " + a.error) << "\n";
      }
    }
    total += r.results.size();
    failed += r.failures();
  }
  os << total << " assertions, " << failed << " failed\n";
  return os.str();
}

int cmd_gallery_run(const std::string& id, const std::string& params, const std::optional<std::string>& out) {
  Json p = Json::object();
  if (!params.empty()) {
    p = params[0] == '@' ? parse_json(read_file(params.substr(1)), params.substr(1)) : parse_json(params, "--params");
  }
  const GalleryReport rep = run_gallery_entry(build_gallery_entry(id, p));
  write_output(out, to_json(rep).dump(2) + "\n");
  std::cerr << gallery_summary({rep});
  return rep.passed() ? kOk : kFailed;
}

int cmd_gallery_run_all(const std::optional<std::string>& out) {
  const auto reports = run_all_gallery();
  std::string body;
  bool ok = true;
  for (const auto& r : reports) {
    body += to_json(r).dump() + "\n";
    ok = ok && r.passed();
  }
  write_output(out, body);
  (out ? std::cout : std::cerr) << gallery_summary(reports);
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonautonomous dynamical systems: condition checks, analysis and gallery"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the checks of an experiment config");
  run->add_option("config", config_path, "config file (JSON)")->required();

  auto* gallery = app.add_subcommand("gallery", "gallery of constructions");
  gallery->require_subcommand(1);
  gallery->add_subcommand("list", "list entry ids with default parameters");
  std::string id, params;
  std::optional<std::string> out;
  auto* grun = gallery->add_subcommand("run", "run one entry");
  grun->add_option("id", id, "entry id")->required();
  grun->add_option("--params", params, "JSON object or @file overriding defaults");
  grun->add_option("--out", out, "report path (default stdout)");
  auto* gall = gallery->add_subcommand("run-all", "run every entry with default parameters");
  gall->add_option("--out", out, "JSON-lines path (default stdout)");

  std::string report_path, kind;
  auto* plot = app.add_subcommand("emit-plot-data", "flatten a report to CSV");
  plot->add_option("report", report_path, "JSON or JSON-lines report")->required();
  plot->add_option("--kind", kind, "trace | coverage | pair-matrix")->required();
  plot->add_option("--out", out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchema;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (gallery->got_subcommand("list")) {
      for (const auto& g : gallery_ids()) std::cout << g << "  " << gallery_defaults(g).dump() << "\n";
      return kOk;
    }
    if (*grun) return cmd_gallery_run(id, params, out);
    if (*gall) return cmd_gallery_run_all(out);
    if (*plot) {
      const auto records = read_records(report_path);
      try {
        write_output(out, plot_data_csv(records, kind));
      } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kSchema;
  } catch (const std::exception& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return kExecution;
  }
  return kSchema;
}
