#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "slowfast/cli/experiment.hpp"

using namespace slowfast;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("slowfast_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run invoke(const std::string& args) {
  const fs::path log = scratch() / "stdout.txt";
  const std::string cmd = std::string(SLOWFAST_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  r.out = ss.str();
  return r;
}

fs::path write_config(const std::string& name, const json& doc) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << doc.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ConfigParsing, DefaultsAndValidation) {
  const auto c = cli::parse_config(json{{"model", "oscillator"}, {"mode", "simulate"}});
  EXPECT_EQ(c.replicas, 10000U);
  EXPECT_EQ(c.seed, 42U);
  EXPECT_THROW(cli::parse_config(json{{"model", "oscillator"}, {"mode", "simulate"}, {"replicas", 0}}), ConfigError);
  EXPECT_THROW(cli::parse_config(json{{"model", "oscillator"}, {"mode", "dance"}}), ConfigError);
  EXPECT_THROW(cli::parse_config(json{{"model", "oscillator"}, {"mode", "simulate"}, {"horizon", -1}}), ConfigError);
  EXPECT_THROW(cli::parse_config(json{{"model", "oscillator"}, {"mode", "simulate"}, {"n_grid", json::array()}}),
               ConfigError);
  EXPECT_THROW(cli::parse_config(json{{"mode", "simulate"}}), ConfigError);
}

TEST(ConfigParsing, HashIgnoresOutputDirectoryAndWorkers) {
  auto a = cli::parse_config(json{{"model", "oscillator"}, {"mode", "simulate"}, {"out", "x"}, {"workers", 1}});
  auto b = cli::parse_config(json{{"model", "oscillator"}, {"mode", "simulate"}, {"out", "y"}, {"workers", 3}});
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 43;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Cli, ReplicasZeroIsAnInvalidConfig) {
  const auto cfg = write_config("zero.json", {{"model", "two-state-toy"}, {"mode", "simulate"}, {"replicas", 0}});
  const auto r = invoke("run --config " + cfg.string() + " --out " + (scratch() / "zero").string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("replicas must be ≥ 1"), std::string::npos) << r.out;
}

TEST(Cli, UnknownModelListsValidNames) {
  const auto cfg = write_config("unknown.json", {{"model", "zebra"}, {"mode", "simulate"}});
  const auto r = invoke("run --config " + cfg.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("explosion-ladder"), std::string::npos) << r.out;
}

TEST(Cli, UnknownFieldIsRejected) {
  const auto cfg = write_config("field.json", {{"model", "two-state-toy"}, {"mode", "simulate"}, {"colour", "red"}});
  EXPECT_EQ(invoke("run --config " + cfg.string()).status, 2);
}

TEST(Cli, ListModels) {
  auto r = invoke("list-models");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("explosion-ladder"), std::string::npos);
  r = invoke("list-models --json");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), model_names().size());
  EXPECT_TRUE(j[0]["schema"].contains("parameters"));
}

TEST(Cli, SchemaSubcommand) {
  auto r = invoke("schema");
  ASSERT_EQ(r.status, 0);
  EXPECT_FALSE(json::parse(r.out)["additionalProperties"].get<bool>());
  r = invoke("schema --model contact-process");
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(json::parse(r.out)["parameters"].contains("graph"));
}

TEST(Cli, SimulateWritesArtifactsWithProvenance) {
  const auto cfg = write_config("sim.json", {{"model", "two-state-toy"}, {"mode", "simulate"}, {"n", 4},
                                             {"replicas", 300}, {"horizon", 2.0}});
  const fs::path out = scratch() / "sim";
  const auto r = invoke("run --config " + cfg.string() + " --out " + out.string() + " --seed 9 --format csv");
  ASSERT_EQ(r.status, 0) << r.out;
  const json summary = json::parse(slurp(out / "summary.json"));
  const std::string hash = summary["config_hash"].get<std::string>();
  EXPECT_EQ(summary["seed"].get<std::uint64_t>(), 9U);
  EXPECT_EQ(summary["replicas"].get<int>(), 300);
  EXPECT_NE(slurp(out / "paths.csv").find("config_hash=" + hash + " seed=9"), std::string::npos);
  EXPECT_EQ(json::parse(slurp(out / "reports.json"))["config_hash"].get<std::string>(), hash);
  EXPECT_NE(slurp(out / "reports.csv").find(hash), std::string::npos);
}

TEST(Cli, OutputIsIdenticalAcrossWorkerCounts) {
  const auto cfg = write_config("det.json", {{"model", "contact-process"}, {"mode", "simulate"}, {"n", 8},
                                             {"replicas", 500}, {"horizon", 2.0}});
  const fs::path a = scratch() / "w1", b = scratch() / "w3";
  ASSERT_EQ(invoke("run --config " + cfg.string() + " --workers 1 --out " + a.string()).status, 0);
  ASSERT_EQ(invoke("run --config " + cfg.string() + " --workers 3 --out " + b.string()).status, 0);
  EXPECT_EQ(slurp(a / "paths.csv"), slurp(b / "paths.csv"));
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto cfg = write_config("env.json", {{"model", "oscillator"}, {"mode", "limit"}, {"replicas", 10}});
  const fs::path out = scratch() / "from_env";
  ::setenv("SLOWFAST_OUT", out.string().c_str(), 1);
  const auto r2 = invoke("run --config " + cfg.string());  // no --out
  ::unsetenv("SLOWFAST_OUT");
  EXPECT_EQ(r2.status, 0);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST(Cli, ExtinctionModeCoversGaltonWatsonValue) {
  const auto cfg = write_config(
      "ext.json", {{"model", "typed-branching"}, {"mode", "extinction"}, {"n", 64}, {"replicas", 20000},
                   {"horizon", 50.0}, {"params", {{"start", {{"size", 1}, {"trait", "stationary"}}}}}});
  const fs::path out = scratch() / "ext";
  const auto r = invoke("run --config " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(r.status, 0) << r.out;
  const json e = json::parse(slurp(out / "summary.json"))["results"]["extinction"];
  EXPECT_LE(e["lower"].get<double>(), 0.5);
  EXPECT_GE(e["upper"].get<double>(), 0.5);
}

TEST(Cli, BadCommandLineIsAConfigError) {
  EXPECT_EQ(invoke("").status, 2);
  EXPECT_EQ(invoke("run").status, 2);
  EXPECT_EQ(invoke("run --config /nonexistent/file.json").status, 2);
}
