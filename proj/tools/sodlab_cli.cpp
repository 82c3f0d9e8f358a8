// sodlab: run one experiment (or a sweep) and write JSON / CSV reports.
//
//   sodlab <command> [key=value ...] [--config FILE] [--set key=value] [--seed N] [--out FILE] [--csv FILE]
//   sodlab sweep <command> --axis KEY --values v1,v2,... [same options]
//
// Exit status: 0 success, 1 a stated verdict failed, 2 usage or precondition error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sodlab/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string default_path(const std::string& stem, const char* ext) {
  const char* dir = std::getenv("SODLAB_OUT_DIR");
  if (!dir || !*dir) return "";
  return (std::filesystem::path(dir) / (stem + ext)).string();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schauder-Orlicz decomposition experiments on dyadic grids"};
  std::vector<std::string> positional;
  std::string config_file, out_path, csv_path, axis, values;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  app.add_option("args", positional, "command (or 'sweep <command>') followed by key=value settings")->required();
  app.add_option("--config", config_file, "key=value config file");
  app.add_option("--set", overrides, "override one key=value (repeatable)");
  app.add_option("--seed", seed, "master seed (required for randomized commands)");
  app.add_option("--out", out_path, "JSON report path (default: $SODLAB_OUT_DIR/<command>.json, else stdout)");
  app.add_option("--csv", csv_path, "CSV series path (default: $SODLAB_OUT_DIR/<command>.csv when set)");
  app.add_option("--axis", axis, "sweep parameter");
  app.add_option("--values", values, "comma-separated sweep values");
  app.footer("commands: luxemburg sod-certify constants unconditional inclination grinblyum daugavet pseudo-daugavet "
             "nonexistence haar-constants, and 'sweep <command>'");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const bool is_sweep = positional.front() == "sweep";
    std::size_t first = is_sweep ? 2 : 1;
    if (is_sweep && positional.size() < 2) throw std::invalid_argument("sweep needs a command");
    sodlab::ExperimentConfig cfg;
    if (!config_file.empty()) cfg = sodlab::ExperimentConfig::parse(read_file(config_file));
    cfg.command = positional[first - 1];
    for (std::size_t i = first; i < positional.size(); ++i) cfg.set(positional[i]);
    for (const auto& o : overrides) cfg.set(o);
    if (seed) cfg.seed = *seed;
    if (!out_path.empty()) cfg.output_path = out_path;

    std::string json_text, csv_text;
    std::optional<bool> verdict;
    const std::string stem = is_sweep ? "sweep-" + cfg.command : cfg.command;
    if (is_sweep) {
      if (axis.empty() || values.empty()) throw std::invalid_argument("sweep needs --axis and --values");
      const auto result = sodlab::sweep(cfg, axis, split_list(values));
      sodlab::Json arr = sodlab::Json::array();
      for (const auto& r : result.reports) {
        arr.push_back(r.to_json());
        if (r.verdict) verdict = verdict.value_or(true) && *r.verdict;
      }
      json_text = sodlab::Json{{"schema_version", sodlab::kSchemaVersion}, {"axis", axis}, {"runs", std::move(arr)}}.dump(2);
      csv_text = result.csv;
    } else {
      const auto report = sodlab::run(cfg);
      json_text = report.to_json().dump(2);
      csv_text = report.csv;
      verdict = report.verdict;
    }
    json_text += '\n';

    const std::string json_dest = cfg.output_path.empty() ? default_path(stem, ".json") : cfg.output_path;
    if (json_dest.empty()) std::cout << json_text;
    else write_text(json_dest, json_text);
    const std::string csv_dest = csv_path.empty() ? default_path(stem, ".csv") : csv_path;
    if (!csv_dest.empty() && !csv_text.empty()) write_text(csv_dest, csv_text);
    return verdict.has_value() && !*verdict ? 1 : 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sodlab: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "sodlab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sodlab: error: " << e.what() << '\n';
    return 2;
  }
}
