#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pilotpbr/cli/commands.hpp"
#include "pilotpbr/cli/config.hpp"
#include "pilotpbr/cli/csv.hpp"
#include "pilotpbr/error.hpp"

using namespace pilotpbr;
using namespace pilotpbr::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = PILOTPBR_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pilotpbr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int run(std::string_view cmd, const fs::path& config, const fs::path& out) {
  std::ostringstream log, err;
  return run_command(cmd, {config, out, std::nullopt}, log, err);
}

}  // namespace

TEST(Csv, NumberFormat) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, WriterLayout) {
  const auto dir = scratch("csv");
  {
    CsvWriter w(dir / "t.csv", {"a", "b", "c"});
    w.row({std::string_view("x"), std::int64_t{-3}, std::optional<double>{}});
    w.row({0.5, std::uint64_t{7}, std::optional<double>{2.0}});
  }
  EXPECT_EQ(slurp(dir / "t.csv"), "a,b,c\nx,-3,\n0.5,7,2\n");
}

TEST(Config, UnknownFieldIsNamed) {
  try {
    parse_epr_config(json::parse(R"({"version": 1, "angles": {"a": 0, "a_prime": 1, "b": 2, "b_prime": 3, "c": 1}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("angles.c"), std::string::npos) << e.what();
  }
}

TEST(Config, VersionRequired) {
  EXPECT_THROW(parse_epr_config(json::parse(R"({"samples": 10})")), ConfigError);
  EXPECT_THROW(parse_epr_config(json::parse(R"({"version": 2})")), ConfigError);
  EXPECT_NO_THROW(parse_epr_config(json::parse(R"({"version": 1})")));
}

TEST(Config, PbrNeedsExactlyOneSource) {
  EXPECT_THROW(parse_pbr_config(json::parse(R"({"version": 1})"), "."), ConfigError);
  EXPECT_THROW(parse_pbr_config(json::parse(R"({"version": 1, "preset": "segregated",
                                                "model_file": "m.json"})"), "."),
               ConfigError);
  EXPECT_THROW(parse_pbr_config(json::parse(R"({"version": 1, "preset": "other"})"), "."), ConfigError);
}

TEST(Config, BeamSplitterValidation) {
  EXPECT_NO_THROW(parse_beamsplitter_config(json::parse(R"({"version": 1})")));
  EXPECT_THROW(parse_beamsplitter_config(json::parse(R"({"version": 1, "packet": {"sigma": 0.5}})")),
               ConfigError);
  EXPECT_THROW(parse_beamsplitter_config(json::parse(R"({"version": 1, "samples": -4})")), ConfigError);
}

TEST(Config, FieldsDefaults) {
  const auto cfg = parse_fields_config(json::parse(R"({"version": 1, "state": {"kind": "eigenstate", "mode": 2}})"));
  EXPECT_EQ(cfg.kind, FieldsStateKind::Eigenstate);
  EXPECT_THROW(parse_fields_config(json::parse(R"({"version": 1, "state": {"kind": "cat"}})")), ConfigError);
}

TEST(Commands, ExitCodes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(run("pbr", kConfigs / "pbr_segregated.json", dir), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "pbr_report.json"));
  EXPECT_EQ(run("pbr", kConfigs / "pbr_overlapping.json", dir), kExitContradiction);
  EXPECT_EQ(run("pbr", kConfigs / "pbr_contextual.json", dir), kExitOk);
  EXPECT_EQ(json::parse(slurp(dir / "pbr_report.json")).at("audit").at("status"), "inapplicable");

  EXPECT_EQ(run("pbr", write_config(dir, "{not json"), dir), kExitConfig);
  EXPECT_EQ(run("epr", write_config(dir, R"({"version": 1, "bogus": 1})"), dir), kExitConfig);
  EXPECT_EQ(run("epr", write_config(dir, R"({"version": 1, "samples": 10})"), dir), kExitFailure);
  EXPECT_EQ(run("epr", dir / "missing.json", dir), kExitConfig);
}

TEST(Commands, CoarseTimeStepFails) {
  const auto dir = scratch("coarse");
  const auto cfg = write_config(dir, R"({"version": 1, "grid": {"dt": 0.05}, "samples": 50})");
  std::ostringstream log, err;
  EXPECT_EQ(run_command("beamsplitter", {cfg, dir, std::nullopt}, log, err), kExitFailure);
  EXPECT_NE(err.str().find("reduce dt"), std::string::npos) << err.str();
}

TEST(Commands, EprOutputs) {
  const auto dir = scratch("epr");
  ASSERT_EQ(run("epr", kConfigs / "epr_optimal.json", dir), kExitOk);
  const auto summary = json::parse(slurp(dir / "epr_summary.json"));
  EXPECT_TRUE(summary.at("pass").get<bool>());
  EXPECT_EQ(summary.at("chsh").at("local_bound"), 2.0);
  const auto csv = slurp(dir / "epr_counts.csv");
  EXPECT_EQ(csv.rfind("a,b,alpha,beta,count\n", 0), 0u);
}

TEST(Commands, FieldsEigenstate) {
  const auto dir = scratch("fields");
  ASSERT_EQ(run("fields", kConfigs / "fields_eigenstate.json", dir), kExitOk);
  EXPECT_TRUE(json::parse(slurp(dir / "fields_summary.json")).at("pass").get<bool>());
  EXPECT_EQ(slurp(dir / "fields.csv").rfind("t,x,rho,J,v,E\n", 0), 0u);
}

TEST(Commands, SeedOverrideChangesOutput) {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  std::ostringstream log, err;
  ASSERT_EQ(run_command("epr", {kConfigs / "epr_optimal.json", a, 1}, log, err), kExitOk);
  ASSERT_EQ(run_command("epr", {kConfigs / "epr_optimal.json", b, 2}, log, err), kExitOk);
  EXPECT_NE(slurp(a / "epr_counts.csv"), slurp(b / "epr_counts.csv"));
}

TEST(Tool, SubprocessExitCodes) {
  const auto dir = scratch("tool");
  const std::string tool = PILOTPBR_TOOL;
  auto status = [&](const std::string& args) {
    const int rc = std::system((tool + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  EXPECT_EQ(status("pbr --config " + (kConfigs / "pbr_segregated.json").string() + " --out " + dir.string()), 0);
  EXPECT_EQ(status("pbr --config " + (kConfigs / "pbr_overlapping.json").string() + " --out " + dir.string()), 3);
  EXPECT_EQ(status("pbr --config " + (dir / "nope.json").string()), 2);
  EXPECT_EQ(status("frobnicate"), 2);
}
