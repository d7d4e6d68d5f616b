#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vacuumsq/config.hpp"
#include "vacuumsq/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path scratch = fs::temp_directory_path() / "vacuumsq_cli_test";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " VACUUMSQ_CLI_PATH " " + args + " > " +
                          (scratch / "stdout.txt").string() + " 2> " +
                          (scratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string config(const std::string& name) { return std::string(VACUUMSQ_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) { return vacuumsq::read_file(p); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(scratch);
    fs::create_directories(scratch);
  }
};

}  // namespace

TEST_F(Cli, EvolveWritesTraceAndSummary) {
  ASSERT_EQ(run("evolve --config " + config("oat_eta10.json") + " --out " + (scratch / "a").string()), 0);
  const auto csv = slurp(scratch / "a" / "oat_eta10.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "t_seconds,xi_unitary,xi_total,xi_db,xi_db_3dp,mean_x,var_min,angle_rad,model_tier");
  const auto summary = nlohmann::json::parse(slurp(scratch / "a" / "oat_eta10.json"));
  EXPECT_NEAR(summary["optimum"]["xi_min_db"].get<double>(), -9.085, 0.01);
  EXPECT_TRUE(summary["derived"]["regime_ok"].get<bool>());
}

TEST_F(Cli, ByteIdenticalAndRoundTrip) {
  const std::string out1 = (scratch / "r1").string(), out2 = (scratch / "r2").string();
  ASSERT_EQ(run("evolve --config " + config("oat_eta1.json") + " --out " + out1), 0);
  ASSERT_EQ(run("evolve --config " + config("oat_eta1.json") + " --out " + out2), 0);
  EXPECT_EQ(slurp(fs::path(out1) / "oat_eta1.csv"), slurp(fs::path(out2) / "oat_eta1.csv"));

  // the summary embeds a resolved config that reproduces the run
  const auto summary = nlohmann::json::parse(slurp(fs::path(out1) / "oat_eta1.json"));
  vacuumsq::write_file_atomic(scratch / "resolved.json", summary["config"].dump(2));
  const std::string out3 = (scratch / "r3").string();
  ASSERT_EQ(run("evolve --config " + (scratch / "resolved.json").string() + " --out " + out3), 0);
  EXPECT_EQ(slurp(fs::path(out1) / "oat_eta1.csv"), slurp(fs::path(out3) / "oat_eta1.csv"));
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = scratch / "from_env";
  ASSERT_EQ(run("feasibility --config " + config("feasibility.json"), "VACUUMSQ_OUT_DIR=" + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "feasibility.json"));
}

TEST_F(Cli, ExitCodes) {
  vacuumsq::write_file_atomic(scratch / "broken.json", "{\"schema_version\": 1,");
  EXPECT_EQ(run("evolve --config " + (scratch / "broken.json").string()), 2);
  const auto err = nlohmann::json::parse(slurp(scratch / "stderr.txt"));
  EXPECT_EQ(err["error"], "config");

  auto doc = nlohmann::json::parse(slurp(config("oat_eta10.json")));
  doc["system"]["delta_hz"] = 0;
  vacuumsq::write_file_atomic(scratch / "zero_delta.json", doc.dump());
  EXPECT_EQ(run("validate --config " + (scratch / "zero_delta.json").string()), 3);
  EXPECT_EQ(run("evolve --config " + (scratch / "zero_delta.json").string()), 3);

  EXPECT_EQ(run("evolve --config " + (scratch / "missing.json").string()), 5);
  vacuumsq::write_file_atomic(scratch / "blocker", "");
  EXPECT_EQ(run("evolve --config " + config("oat_eta10.json") + " --out " + (scratch / "blocker" / "x").string()), 5);
  EXPECT_EQ(run("oracle --config " + config("oat_eta10.json")), 2);  // command mismatch
  EXPECT_EQ(run("evolve"), 2);
}

TEST_F(Cli, ValidatePrintsDerivedCoupling) {
  ASSERT_EQ(run("validate --config " + config("oat_eta10.json")), 0);
  const auto j = nlohmann::json::parse(slurp(scratch / "stdout.txt"));
  EXPECT_NEAR(j["derived"]["g_hz"].get<double>(), 41.83300132670378, 1e-9);
  EXPECT_NEAR(j["derived"]["spin_S"].get<double>(), 5000.0, 0.0);
}

TEST_F(Cli, OracleArtifacts) {
  ASSERT_EQ(run("oracle --config " + config("oracle_n4.json") + " --out " + scratch.string()), 0);
  const auto j = nlohmann::json::parse(slurp(scratch / "oracle.json"));
  EXPECT_LT(j["max_shift_relative_error"].get<double>(), 1e-3);
  EXPECT_TRUE(fs::exists(scratch / "oracle_shifts.csv"));
  EXPECT_TRUE(fs::exists(scratch / "oracle_dynamics.csv"));
}
