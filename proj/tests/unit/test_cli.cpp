#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

using nlohmann::json;
using vortex::cli::ExitCode;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = vortex::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vortex_cli_test_" + name);
}

TEST(Cli, RatesBlackbody) {
  const Outcome r = invoke({"rates", "--preset", "blackbody"});
  ASSERT_EQ(r.code, ExitCode::kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["reconnection"].get<double>(), 4.270200150109, 1e-9);
  EXPECT_NEAR(j["loop_to_reconnection_ratio"].get<double>(), 0.43384501341, 1e-9);
  EXPECT_EQ(j["units"], "length^-3 time^-1");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({"rates", "--no-such-flag"}).code, ExitCode::kUsage);
  EXPECT_EQ(invoke({"verify-mc", "--preset", "blackbody"}).code, ExitCode::kUsage);
  EXPECT_EQ(invoke({"rates", "--preset", "blackbody", "--W", "-1"}).code, ExitCode::kUsage);
  EXPECT_EQ(invoke({}).code, ExitCode::kUsage);
}

TEST(Cli, FailedCheckExitCode) {
  const Outcome r = invoke({"verify-mc", "--preset", "special-dispersion", "--seed", "1",
                            "--samples", "1e4", "--sigmas", "1e-9"});
  EXPECT_EQ(r.code, ExitCode::kCheckFailed);
  EXPECT_FALSE(json::parse(r.out)["passed"].get<bool>());
}

TEST(Cli, VerifyAliasAndDeterminism) {
  const std::vector<std::string> base{"--preset", "blackbody", "--seed", "5", "--samples", "2e4"};
  auto args = base;
  args.insert(args.begin(), {"verify", "mc"});
  const Outcome a = invoke(args);
  ASSERT_EQ(a.code, ExitCode::kOk) << a.err;
  args.insert(args.end(), {"--workers", "3"});
  const Outcome b = invoke(args);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigFileAndOverride) {
  const auto cfg = temp_path("config.json");
  std::ofstream(cfg) << R"({"preset": "blackbody", "W": 2.0})";
  const Outcome r = invoke({"rates", "--config", cfg.string()});
  ASSERT_EQ(r.code, ExitCode::kOk) << r.err;
  EXPECT_NEAR(json::parse(r.out)["reconnection"].get<double>(), 16.0 * 4.270200150109, 1e-8);
  const Outcome o = invoke({"rates", "--config", cfg.string(), "--W", "1"});
  EXPECT_NEAR(json::parse(o.out)["reconnection"].get<double>(), 4.270200150109, 1e-9);
  std::ofstream(cfg) << R"({"preset": "blackbody", "bogus": 1})";
  EXPECT_EQ(invoke({"rates", "--config", cfg.string()}).code, ExitCode::kUsage);
  std::filesystem::remove(cfg);
}

TEST(Cli, OutputFile) {
  const auto path = temp_path("out.json");
  const Outcome r = invoke({"moments", "--preset", "special-dispersion", "--output", path.string()});
  ASSERT_EQ(r.code, ExitCode::kOk) << r.err;
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_EQ(j["command"], "moments");
  std::filesystem::remove(path);
}

TEST(Cli, CsvAndJsonl) {
  const std::vector<std::string> base{"verify-mc", "--preset", "special-dispersion",
                                      "--seed",    "3",        "--samples", "1e4"};
  auto csv = base;
  csv.insert(csv.end(), {"--format", "csv"});
  const Outcome c = invoke(csv);
  ASSERT_EQ(c.code, ExitCode::kOk) << c.err;
  EXPECT_EQ(c.out.rfind("group,name,value", 0), 0u);
  auto jl = base;
  jl.insert(jl.end(), {"--format", "jsonl"});
  const Outcome l = invoke(jl);
  std::istringstream lines(l.out);
  std::string line, last;
  int n = 0;
  while (std::getline(lines, line)) {
    last = line;
    EXPECT_NO_THROW(json::parse(line));
    ++n;
  }
  EXPECT_GE(n, 2);
  EXPECT_EQ(json::parse(last)["record"], "summary");
}

TEST(Cli, SweepProducesRows) {
  const Outcome r =
      invoke({"rates", "--preset", "blackbody", "--sweep", "W=1:2:3", "--format", "csv"});
  ASSERT_EQ(r.code, ExitCode::kOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 4);
}

TEST(Cli, SpectrumFile) {
  const auto path = temp_path("spectrum.json");
  std::ofstream(path) << R"({"kind": "special_dispersion", "k0": 1.0, "c": 1.0, "dimension": 2})";
  const Outcome r = invoke({"rates", "--spectrum", path.string()});
  ASSERT_EQ(r.code, ExitCode::kOk) << r.err;
  EXPECT_NEAR(json::parse(r.out)["pair_events"].get<double>(), 0.01744067808288, 1e-12);
  std::filesystem::remove(path);
}

}  // namespace
