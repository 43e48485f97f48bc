#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcsim/cli.hpp"
#include "tcsim/config.hpp"
#include "tcsim/errors.hpp"
#include "tcsim/units.hpp"

using namespace tcsim;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tcsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("SOURCE_DATE_EPOCH");
    unsetenv("TCSIM_OUT");
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const Json& j) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const Json small_chevron{{"chevron", {{"v_b", {0.0, 0.1, 0.2}}, {"tau_ns", {{"start", 0}, {"stop", 40}, {"points", 9}}}}}};

}  // namespace

TEST_F(CliTest, ZzReportsSmallCoupling) {
  ASSERT_EQ(run_cli({"zz", "--out", dir_.string()}), 0);
  const Json j = Json::parse(slurp(dir_ / "zz.json"));
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("subcommand"), "zz");
  EXPECT_TRUE(j.at("seed").is_null());
  EXPECT_TRUE(j.at("timestamp").is_null());
  EXPECT_LT(std::abs(j.at("results").at("zz_mhz").get<double>()), 0.5);
  const std::string csv = slurp(dir_ / "zz.csv");
  EXPECT_EQ(csv.rfind("# tcsim zz config_hash=" + j.at("config_hash").get<std::string>() + " seed=none\n", 0), 0u);
}

TEST_F(CliTest, ChevronIsByteReproducible) {
  const fs::path cfg = write_config("c.json", small_chevron);
  const fs::path a = dir_ / "a", b = dir_ / "b", c = dir_ / "c";
  ASSERT_EQ(run_cli({"chevron", "--config", cfg.string(), "--seed", "3", "--out", a.string()}), 0);
  ASSERT_EQ(run_cli({"chevron", "--config", cfg.string(), "--seed", "3", "--out", b.string(), "--threads", "1"}), 0);
  ASSERT_EQ(run_cli({"chevron", "--config", cfg.string(), "--seed", "3", "--out", c.string(), "--shots", "100"}), 0);
  EXPECT_EQ(slurp(a / "chevron.csv"), slurp(b / "chevron.csv"));
  EXPECT_EQ(slurp(a / "chevron.json"), slurp(b / "chevron.json"));
  EXPECT_NE(slurp(a / "chevron.csv"), slurp(c / "chevron.csv"));
}

TEST_F(CliTest, RbValidationExitsWithTwo) {
  const fs::path cfg = write_config("rb.json", {{"rb", {{"samples", 0}, {"backend", "depolarizing"}}}});
  EXPECT_EQ(run_cli({"rb", "--config", cfg.string(), "--seed", "1", "--out", dir_.string()}), 2);
  EXPECT_EQ(run_cli({"rb", "--out", dir_.string()}), 2);
  EXPECT_FALSE(fs::exists(dir_ / "rb.error.json"));
}

TEST_F(CliTest, RbDepolarizingRuns) {
  const fs::path cfg = write_config(
      "rb.json", {{"rb", {{"samples", 5}, {"lengths", {1, 5, 10, 20}}, {"backend", "depolarizing"}, {"depolarizing", 0.02}}}});
  ASSERT_EQ(run_cli({"rb", "--config", cfg.string(), "--seed", "8", "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run_cli({"rb", "--config", cfg.string(), "--seed", "8", "--out", (dir_ / "b").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "rb.csv"), slurp(dir_ / "b" / "rb.csv"));
  const Json j = Json::parse(slurp(dir_ / "a" / "rb.json"));
  EXPECT_EQ(j.at("seed"), 8);
  EXPECT_TRUE(j.at("decoherence").get<bool>());
}

TEST_F(CliTest, RuntimeFailureWritesDiagnostic) {
  const fs::path cfg = write_config("rb.json", {{"rb", {{"samples", 2}, {"lengths", {1, 2}}, {"backend", "depolarizing"}}}});
  EXPECT_EQ(run_cli({"rb", "--config", cfg.string(), "--seed", "1", "--out", dir_.string()}), 1);
  const Json j = Json::parse(slurp(dir_ / "rb.error.json"));
  EXPECT_EQ(j.at("error").at("code"), "fit");
  EXPECT_EQ(j.at("subcommand"), "rb");
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(run_cli({"nonsense", "--out", dir_.string()}), 2);
  EXPECT_EQ(run_cli({"zz", "--config", write_config("u.json", {{"bogus", 1}}).string(), "--out", dir_.string()}), 2);
  EXPECT_EQ(run_cli({"zz", "--config", write_config("k.json", {{"zz", {{"vc", 0.1}}}}).string(), "--out", dir_.string()}), 2);
  EXPECT_EQ(run_cli({"zz", "--config", write_config("d.json", {{"device", {{"alpha_mhz", {100, -300, -100}}}}}).string(),
                     "--out", dir_.string()}),
            2);
  std::ofstream(dir_ / "bad.json") << "{ not json";
  EXPECT_EQ(run_cli({"zz", "--config", (dir_ / "bad.json").string(), "--out", dir_.string()}), 2);
  EXPECT_EQ(run_cli({"chevron", "--shots", "-4", "--seed", "1", "--out", dir_.string()}), 2);
  EXPECT_EQ(run_cli({"chevron", "--shots", "10", "--out", dir_.string()}), 2);
}

TEST_F(CliTest, HashTracksConfig) {
  ASSERT_EQ(run_cli({"zz", "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run_cli({"zz", "--out", (dir_ / "b").string(), "--seed", "5"}), 0);
  const fs::path cfg = write_config("z.json", {{"zz", {{"v_c", {0.0, 0.1}}}}});
  ASSERT_EQ(run_cli({"zz", "--config", cfg.string(), "--out", (dir_ / "c").string()}), 0);
  auto hash = [&](const char* d) { return Json::parse(slurp(dir_ / d / "zz.json")).at("config_hash").get<std::string>(); };
  EXPECT_EQ(hash("a"), hash("b"));
  EXPECT_NE(hash("a"), hash("c"));
  const Json hashed{{"subcommand", "zz"}, {"config", Json::object()}, {"shots", "exact"}, {"decoherence", false}};
  EXPECT_EQ(hash("a"), hex64(fnv1a64(hashed.dump())));
}

TEST_F(CliTest, EnvironmentDefaults) {
  setenv("TCSIM_OUT", (dir_ / "env").string().c_str(), 1);
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  ASSERT_EQ(run_cli({"zz"}), 0);
  const Json j = Json::parse(slurp(dir_ / "env" / "zz.json"));
  EXPECT_EQ(j.at("timestamp"), "1970-01-02T00:00:00Z");
  ASSERT_EQ(run_cli({"zz", "--timestamp", "now-ish"}), 0);
  EXPECT_EQ(Json::parse(slurp(dir_ / "env" / "zz.json")).at("timestamp"), "now-ish");
}

TEST_F(CliTest, DeviceFileResolvedRelativeToConfig) {
  fs::create_directories(dir_ / "cfg");
  std::ofstream(dir_ / "cfg" / "dev.json") << R"({"g_12_mhz": 3.0})";
  const fs::path cfg = write_config("cfg/run.json", {{"device_file", "dev.json"}});
  ASSERT_EQ(run_cli({"zz", "--config", cfg.string(), "--out", dir_.string()}), 0);
  const Json j = Json::parse(slurp(dir_ / "zz.json"));
  EXPECT_DOUBLE_EQ(j.at("config").at("device").at("g_12_mhz").get<double>(), 3.0);
}

TEST_F(CliTest, EverySubcommandRunsOnSmallGrids) {
  const Json cfg{
      {"spectroscopy", {{"v", {0.0, 0.2, 0.4}}}},
      {"chevron", small_chevron.at("chevron")},
      {"coupling", {{"v_b", {0.2}}, {"tau_ns", {{"start", 0}, {"stop", 200}, {"points", 81}}}}},
      {"ramsey_phase", {{"duration_ns", 30}, {"v_b", 0.26}}},
      {"phase_scan", {{"v_b", {0.0, 0.1}}}},
      {"leakage_map", {{"v_b", {0.0, 0.1}}, {"v_q", {0.0, 0.1}}}},
      {"rb", {{"samples", 3}, {"lengths", {1, 3, 6}}, {"backend", "ideal"}}},
      {"pb", {{"samples", 3}, {"lengths", {1, 3, 6}}, {"backend", "over-rotation"}}},
      {"tune_adiabatic", {{"max_evaluations", 5}, {"duration_ns", 60}}},
      {"tune_diabatic", {{"max_evaluations", 5}, {"v_b", {0.1, 0.2}}, {"v_q", {0.0, 0.05}}}},
      {"zz", {{"v_c", {0.0}}}}};
  const fs::path path = write_config("all.json", cfg);
  for (const auto& sub : cli_subcommands) {
    const int rc = run_cli({sub, "--config", path.string(), "--seed", "1", "--out", dir_.string()});
    EXPECT_EQ(rc, 0) << sub;
    EXPECT_TRUE(fs::exists(dir_ / (sub + ".json"))) << sub;
    EXPECT_TRUE(fs::exists(dir_ / (sub + ".csv"))) << sub;
  }
}

TEST(Config, DeviceUnitsAndUnknownKeys) {
  const Device d = device_from_json({{"omega_max_ghz", {4.5, 4.7, 5.45}}, {"t1_us", {10, 20, 30}}});
  EXPECT_NEAR(d.params.omega_max[0], ghz(4.5), 1e-3);
  EXPECT_NEAR(d.params.t1[2], 30e-6, 1e-18);
  try {
    device_from_json({{"omega", 1}});
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
  const Json round = device_to_json(Device::nominal());
  const Device back = device_from_json(round);
  EXPECT_NEAR(back.params.g_1c, Device::nominal().params.g_1c, 1e-6);
  EXPECT_NEAR(back.idle().q1, Device::nominal().idle().q1, 1e-3);
}

TEST(Config, GridForms) {
  EXPECT_EQ(grid_from_json(Json(0.5), "x"), std::vector<double>{0.5});
  EXPECT_EQ(grid_from_json(Json::array({1.0, 2.0}), "x"), (std::vector<double>{1.0, 2.0}));
  const auto g = grid_from_json({{"start", 0.0}, {"stop", 1.0}, {"points", 5}}, "x");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[2], 0.5);
  EXPECT_THROW(grid_from_json(Json::array(), "x"), SimError);
  EXPECT_THROW(grid_from_json(Json("a"), "x"), SimError);
}

TEST(Config, Fnv1aVectors) {
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(hex64(fnv1a64("foobar")), "85944171f73967e8");
}
