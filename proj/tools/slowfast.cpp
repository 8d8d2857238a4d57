// slowfast: run experiments from a JSON config, list models, print schemas.
//
//   slowfast run --config exp.json [--seed S] [--workers N] [--out DIR] [--format csv|json]
//   slowfast list-models [--json]
//   slowfast schema [--model NAME]
//
// Exit status: 0 ok, 1 runtime fault, 2 invalid config, 3 a statistical
// report failed (verify, explosion-gap, extinction).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slowfast/cli/experiment.hpp"

using namespace slowfast;
using slowfast::cli::kExitConfig;
using slowfast::cli::kExitFault;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("SLOWFAST_OUT");
  return env && *env ? env : "slowfast-out";
}

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-timescale jump process simulator and averaging-principle checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out_dir;
  std::string format = "json";
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "root seed (overrides the config)");
  run->add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (overrides the config and $SLOWFAST_OUT)");
  run->add_option("--format", format, "report table format; csv also writes reports.csv")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* list = app.add_subcommand("list-models", "list built-in models");
  bool list_json = false;
  list->add_flag("--json", list_json, "machine-readable catalog with parameter schemas");

  auto* schema = app.add_subcommand("schema", "print the experiment config schema or a model's parameter schema");
  std::string schema_model;
  schema->add_option("--model", schema_model, "model name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list) {
      if (list_json) {
        json arr = json::array();
        for (const auto& e : model_registry())
          arr.push_back({{"name", e.name}, {"description", e.description}, {"schema", e.schema}});
        std::cout << arr.dump(2) << '\n';
      } else {
        for (const auto& e : model_registry()) std::cout << e.name << "  " << e.description << '\n';
      }
      return 0;
    }
    if (*schema) {
      if (schema_model.empty()) std::cout << cli::config_schema().dump(2) << '\n';
      else std::cout << find_model(schema_model).schema.dump(2) << '\n';
      return 0;
    }

    json doc = read_config(config_path);
    if (seed && doc.is_object()) doc["seed"] = *seed;
    if (workers && doc.is_object()) doc["workers"] = *workers;
    cli::ExperimentConfig cfg = cli::parse_config(doc);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (cfg.out.empty()) cfg.out = default_out_dir();
    build_model(cfg.model, cfg.params);  // parameter errors are config errors, before any simulation

    const auto res = cli::run_experiment(cfg);
    cli::write_outputs(res, cfg.out, format == "csv");
    std::cout << res.text << "outputs in " << cfg.out << '\n';
    return res.status;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime fault: " << e.what() << '\n';
    return kExitFault;
  }
}
