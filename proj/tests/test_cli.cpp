#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "grushinlab/cli/config.hpp"
#include "grushinlab/cli/run.hpp"

using namespace grushinlab::cli;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text, const FlagOverrides& flags = {}) {
  try {
    parse_config_text(text, flags);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("grushinlab_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_binary(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(GRUSHINLAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Config, MinimalFileGetsDefaults) {
  const auto c = parse_config_text(R"({"command":"verify-closed-forms","params":{"n":2,"alpha":1}})");
  EXPECT_EQ(c.command, "verify-closed-forms");
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_EQ(c.tolerances.solver, 1e-10);
  EXPECT_EQ(c.field.family, "identity");
}

TEST(Config, DefaultsWithoutParams) {
  const auto c = parse_config_text(R"({"command":"solve"})");
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.alpha, 1.0);
}

TEST(Config, NegativeAlphaNamesThePath) {
  EXPECT_EQ(error_of(R"({"command":"solve","params":{"alpha":-1}})"), "params.alpha: must be \xE2\x89\xA5 0");
}

TEST(Config, FlagsOverrideFile) {
  FlagOverrides f;
  f.alpha = 2.0;
  f.tol = 1e-8;
  const auto c = parse_config_text(R"({"command":"solve","params":{"alpha":1}})", f);
  EXPECT_EQ(c.alpha, 2.0);
  EXPECT_EQ(c.tolerances.solver, 1e-8);
}

TEST(Config, UnknownKeysAreErrors) {
  EXPECT_EQ(error_of(R"({"command":"solve","colour":1})"), "colour: unknown key");
  EXPECT_EQ(error_of(R"({"command":"solve","params":{"n":2,"beta":1}})"), "params.beta: unknown key");
  EXPECT_EQ(error_of(R"({"command":"solve","experiment":{"rh0":0.5}})"), "experiment.rh0: unknown key");
}

TEST(Config, TypeMismatchesNameThePath) {
  EXPECT_EQ(error_of(R"({"command":"solve","params":{"n":"two"}})"), "params.n: expected an integer");
  EXPECT_EQ(error_of(R"({"command":"solve","params":{"n":2.5}})"), "params.n: expected an integer");
  EXPECT_EQ(error_of(R"({"command":"solve","grid":{"counts":[3,"x"]}})"), "grid.counts[1]: expected an integer");
  EXPECT_EQ(error_of(R"({"command":"solve","field":[]})"), "field: expected an object");
  EXPECT_EQ(error_of(R"([1,2])"), "config: expected an object");
}

TEST(Config, ModulePreconditions) {
  EXPECT_EQ(error_of(R"({})"), "command: missing");
  EXPECT_EQ(error_of(R"({"command":"dance"})"), "command: unknown command 'dance'");
  EXPECT_EQ(error_of(R"({"command":"solve","params":{"n":1}})"), "params.n: must be >= 2");
  EXPECT_EQ(error_of(R"({"command":"solve","field":{"family":"decaying-perturbation","amplitude":2}})"),
            "field.amplitude: must lie in (0, 1]");
  EXPECT_EQ(error_of(R"({"command":"solve","grid":{"box_lo":[0,0.5],"box_hi":[1,1],"counts":[3,3]}})"),
            "grid.box_lo[1]: normal range must start at 0");
  EXPECT_EQ(error_of(R"({"command":"solve","tolerances":{"solver":0}})"), "tolerances.solver: must be > 0");
  EXPECT_NE(error_of(R"({"command":"supersolution-scan","experiment":{"rho":1}})").find("experiment.rho: must lie in"),
            std::string::npos);
  EXPECT_EQ(error_of(R"({"command":"decay-fit","experiment":{"inner_radius":4,"outer_radius":6}})"),
            "experiment.outer_radius: must exceed 2 * inner_radius");
}

TEST(Config, ExteriorRadiiDefaultPerCommand) {
  EXPECT_EQ(exterior_radii(parse_config_text(R"({"command":"decay-fit"})")), std::make_pair(1.0, 32.0));
  EXPECT_EQ(exterior_radii(parse_config_text(R"({"command":"global-bound"})")), std::make_pair(2.0, 64.0));
}

TEST(Config, EffectiveConfigRoundTrips) {
  const auto c = parse_config_text(R"({"command":"holder-modulus","params":{"n":3,"alpha":0.5},"seed":9})");
  const auto again = parse_config_text(to_json(c).dump());
  EXPECT_EQ(to_json(c), to_json(again));
}

TEST(Hash, GitBlobIds) {
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Hash, IgnoresOutputDirectory) {
  auto a = parse_config_text(R"({"command":"solve","output_dir":"a"})");
  auto b = parse_config_text(R"({"command":"solve","output_dir":"b"})");
  auto c = parse_config_text(R"({"command":"solve","seed":2})");
  EXPECT_EQ(input_hash(a), input_hash(b));
  EXPECT_NE(input_hash(a), input_hash(c));
}

TEST(Binary, VerifyClosedFormsPasses) {
  const auto dir = scratch_dir("verify");
  EXPECT_EQ(run_binary("--command verify-closed-forms --out " + dir.string(), dir / "log"), 0);
  const auto report = nlohmann::json::parse(slurp(dir / "verify-closed-forms.json"));
  EXPECT_EQ(report["status"], "pass");
  EXPECT_LE(report["result"]["max_residual_w"].get<double>(), 1e-9);
  EXPECT_TRUE(report["result"].contains("max_residual_gauge_power_Q"));
  EXPECT_EQ(report["config"]["params"]["alpha"], 1.0);
  EXPECT_EQ(report["input_hash"].get<std::string>().size(), 40u);
  EXPECT_TRUE(fs::exists(dir / "verify-closed-forms.csv"));
  EXPECT_FALSE(fs::exists(dir / "verify-closed-forms.json.tmp"));
  EXPECT_NE(slurp(dir / "log").find("verify-closed-forms: PASS"), std::string::npos);
}

TEST(Binary, HypothesisViolationExitsTwoWithoutReport) {
  const auto dir = scratch_dir("rho");
  std::ofstream(dir / "cfg.json") << R"({"command":"supersolution-scan","experiment":{"rho":0.9,"s":0.5}})";
  EXPECT_EQ(run_binary("--config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir / "log"), 2);
  EXPECT_NE(slurp(dir / "log").find("experiment.rho"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "supersolution-scan.json"));
}

TEST(Binary, SlopeOutsideBandExitsOneWithReport) {
  const auto dir = scratch_dir("band");
  std::ofstream(dir / "cfg.json")
      << R"({"command":"decay-fit","tolerances":{"slope_band":1e-6},"experiment":{"tangential_count":81,"normal_count":41,"outer_radius":16}})";
  EXPECT_EQ(run_binary("--config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir / "log"), 1);
  const auto report = nlohmann::json::parse(slurp(dir / "decay-fit.json"));
  EXPECT_EQ(report["status"], "fail");
  EXPECT_EQ(report["exit_code"], 1);
}

TEST(Binary, FlagOverridesFileAndBadFlagsExitTwo) {
  const auto dir = scratch_dir("flags");
  std::ofstream(dir / "cfg.json") << R"({"command":"verify-closed-forms","params":{"alpha":1},"experiment":{"points":50}})";
  EXPECT_EQ(run_binary("--config " + (dir / "cfg.json").string() + " --alpha=2 --out " + dir.string(), dir / "log"), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "verify-closed-forms.json"))["config"]["params"]["alpha"], 2.0);
  EXPECT_EQ(run_binary("--command nope", dir / "log2"), 2);
  EXPECT_EQ(run_binary("--config " + (dir / "missing.json").string(), dir / "log3"), 2);
  EXPECT_EQ(run_binary("--alpha -1 --command solve", dir / "log4"), 2);
}

TEST(Binary, RerunsAreByteIdentical) {
  const auto a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
  const std::string args = " --command supersolution-scan --seed 5";
  ASSERT_EQ(run_binary(args + " --out " + a.string(), a / "log"), 0);
  ASSERT_EQ(run_binary(args + " --out " + b.string(), b / "log"), 0);
  EXPECT_EQ(slurp(a / "supersolution-scan.csv"), slurp(b / "supersolution-scan.csv"));
  auto ja = nlohmann::json::parse(slurp(a / "supersolution-scan.json"));
  auto jb = nlohmann::json::parse(slurp(b / "supersolution-scan.json"));
  ja["config"].erase("output_dir");
  jb["config"].erase("output_dir");
  EXPECT_EQ(ja, jb);
}

TEST(Binary, SolveWritesGridFunctionCsv) {
  const auto dir = scratch_dir("solve");
  std::ofstream(dir / "cfg.json") << R"({"command":"solve","grid":{"box_lo":[1,0],"box_hi":[3,2],"counts":[9,9]}})";
  EXPECT_EQ(run_binary("--config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir / "log"), 0);
  const std::string csv = slurp(dir / "solve.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x_1,x_2,u,exact");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 82);
  const auto report = nlohmann::json::parse(slurp(dir / "solve.json"));
  for (const char* key : {"iterations", "final_residual", "dmp_ok", "wall_time_ms"}) {
    EXPECT_TRUE(report["result"]["solve"].contains(key)) << key;
  }
}
