#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using spectral::cli::run;

namespace {

const fs::path kData = SPECTRAL_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "spectral");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  testing::internal::CaptureStdout();
  testing::internal::CaptureStderr();
  int code = run(static_cast<int>(argv.size()), argv.data());
  testing::internal::GetCapturedStdout();
  testing::internal::GetCapturedStderr();
  return code;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("spectral_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string measure(const std::string& name) { return (kData / "measures" / (name + ".json")).string(); }

}  // namespace

TEST(Cli, ParseTimes) {
  std::vector<double> t = spectral::cli::parse_times("0:2pi:5");
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_NEAR(t[2], oracle::kPi, 1e-15);
  EXPECT_NEAR(t.back(), 2 * oracle::kPi, 1e-15);
  EXPECT_ANY_THROW(spectral::cli::parse_times("0:1"));
  EXPECT_ANY_THROW(spectral::cli::parse_times("0:1:0"));
}

TEST(Cli, SimulateIsDeterministic) {
  fs::path a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  std::vector<std::string> base{"simulate", "--measure", measure("comb"), "--times", "0:2pi:9", "--paths", "300",
                                "--bins",   "64",        "--umax",         "32",      "--seed",  "7"};
  auto with = [&](const fs::path& out, const std::string& workers) {
    auto args = base;
    args.insert(args.end(), {"--out", out.string(), "--workers", workers});
    return invoke(args);
  };
  ASSERT_EQ(with(a, "1"), 0);
  ASSERT_EQ(with(b, "1"), 0);
  ASSERT_EQ(with(c, "4"), 0);
  EXPECT_EQ(slurp(a / "paths.csv"), slurp(b / "paths.csv"));
  EXPECT_EQ(slurp(a / "paths.csv"), slurp(c / "paths.csv"));
  EXPECT_EQ(slurp(a / "paths.json"), slurp(c / "paths.json"));

  nlohmann::json side = nlohmann::json::parse(slurp(a / "paths.json"));
  EXPECT_EQ(side.at("seed"), 7);
  spectral::cli::RunConfig cfg = spectral::cli::RunConfig::from_json(side.at("config"));
  EXPECT_EQ(cfg.paths, 300u);
  EXPECT_EQ(cfg.to_json(), side.at("config"));
}

TEST(Cli, ExitCodes) {
  fs::path out = scratch("codes");
  EXPECT_EQ(invoke({"--help"}), 0);
  EXPECT_EQ(invoke({"comb-verify", "--out", out.string()}), 0);
  EXPECT_EQ(invoke({"covariance", "--measure", measure("nope"), "--times", "0:1:3"}), 2);
  EXPECT_EQ(invoke({"convolve", "--measure", measure("lebesgue"), "--measure", measure("lebesgue"), "--out",
                    out.string()}),
            2);
  EXPECT_EQ(invoke({"comb-verify", "--tol", "0", "--out", out.string()}), 3);
  EXPECT_EQ(invoke({"frobnicate"}), 2);
}

TEST(Cli, ReportsAreWritten) {
  fs::path out = scratch("reports");
  ASSERT_EQ(invoke({"qform", "eval", "--measure", measure("lebesgue"), "--testfn",
                    (kData / "testfns/gaussian.json").string(), "--out", out.string()}),
            0);
  nlohmann::json q = nlohmann::json::parse(slurp(out / "qform.json"));
  EXPECT_NEAR(q.at("q_sigma").at("value").at(0).get<double>(), 2 * std::pow(oracle::kPi, 1.5), 1e-9);

  ASSERT_EQ(invoke({"sigmaspace", "pair", "--a", (kData / "sigma/two_on_unit.json").string(), "--b",
                    (kData / "sigma/one_on_unit_x4.json").string(), "--out", out.string()}),
            0);
  nlohmann::json s = nlohmann::json::parse(slurp(out / "sigmaspace.json"));
  EXPECT_TRUE(s.at("equiv").get<bool>());
  EXPECT_FALSE(s.at("mutually_singular").get<bool>());
}
