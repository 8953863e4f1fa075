#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "holocorr/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "holocorr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = holocorr::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> error_fields(const std::string& err) {
  std::vector<std::string> out;
  const auto j = json::parse(err);
  for (const auto& f : j["fields"]) out.push_back(f["field"].get<std::string>());
  return out;
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("holocorr_cli_test_" + name);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, LimitsetCircle) {
  const auto r = run({"limitset", "--family", "rational-inverse", "--p", "0,0,1", "--q", "1", "--x", "2", "--depth", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# points_at_infinity=0", 0), 0u);
  int rows = 0;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    const double re = std::stod(line.substr(0, comma)), im = std::stod(line.substr(comma + 1));
    EXPECT_NEAR(std::hypot(re, im), 1.0, 1e-3);
    ++rows;
  }
  EXPECT_GT(rows, 1000);
}

TEST(Cli, InvalidDepthNamesField) {
  const auto r = run({"delta", "--family", "rational-inverse", "--p", "0,0,1", "--q", "1", "--x", "1", "--depth", "-1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["error"], "invalid_config");
  EXPECT_TRUE(has(error_fields(r.err), "depth"));
}

TEST(Cli, AllFieldErrorsReported) {
  const auto r = run({"report", "--family", "nonsense", "--x", "abc", "--depth", "x", "--tol", "-3"});
  EXPECT_EQ(r.code, 2);
  const auto f = error_fields(r.err);
  EXPECT_TRUE(has(f, "family"));
  EXPECT_TRUE(has(f, "x"));
  EXPECT_TRUE(has(f, "depth"));
  EXPECT_TRUE(has(f, "tol"));
}

TEST(Cli, MissingCorrespondence) {
  const auto r = run({"fixedpoints"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(error_fields(r.err), "family"));
}

TEST(Cli, UnknownFlagIsConfigError) {
  const auto r = run({"delta", "--family", "rational-inverse", "--p", "0,0,1", "--frobnicate", "3"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, RuntimeErrorExitsOne) {
  // The cauliflower basepoint at the parabolic point makes the series diverge.
  const auto r = run({"delta", "--family", "rational-inverse", "--p", "0.25,0,1", "--q", "1", "--x", "0.5", "--depth", "6"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err)["error"], "parabolic_basepoint");
}

TEST(Cli, DeltaJsonAndRhoCsv) {
  const auto dir = scratch("delta");
  const auto csv = (dir / "rho.csv").string();
  const auto r = run({"delta", "--family", "rational-inverse", "--p", "0,0,1", "--q", "1", "--x", "1", "--depth", "14", "--rho-csv", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["estimate"]["delta"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(j["command"], "delta");
  std::ifstream is(csv);
  std::string head;
  std::getline(is, head);
  EXPECT_EQ(head, "s,rho,r2");
}

TEST(Cli, FixedpointsBullettPenrose) {
  const auto r = run({"fixedpoints", "--family", "bullett-penrose", "--a", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  bool zero_indifferent = false;
  for (const auto& f : j["fixed_points"]) {
    if (!f["point"].is_array()) continue;
    const double re = f["point"][0], im = f["point"][1];
    if (std::hypot(re, im) < 1e-8 && f["class"] == "indifferent") zero_indifferent = true;
  }
  EXPECT_TRUE(zero_indifferent);
  EXPECT_TRUE(j["critical_values_backward"].is_array());
}

TEST(Cli, InlinePolyAndConfigFile) {
  const auto dir = scratch("config");
  const auto cfg = (dir / "cfg.json").string();
  {
    std::ofstream os(cfg);
    os << R"({"kind_ignored": 1})";
  }
  // unknown config key
  auto bad = run({"measure", "--config", cfg});
  EXPECT_EQ(bad.code, 2);
  {
    std::ofstream os(cfg);
    os << R"({"poly": {"kind": "anti", "poly": {"coeffs": [[0, 1], [-1, 0]]}}, "x": "0.5+0.5i", "s": 1.0, "depth": 3})";
  }
  const auto r = run({"measure", "--config", cfg, "--depth", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  // config beats the flag
  EXPECT_EQ(j["depth"], 3);
  EXPECT_EQ(j["atoms"].size(), 4u);
  EXPECT_EQ(j["meta"]["correspondence"]["kind"], "anti");
}

TEST(Cli, ConformalityReportsAndSkips) {
  const auto r = run({"conformality", "--family", "rational-inverse", "--p", "0,0,1", "--q", "1", "--x", "1", "--s", "1", "--delta", "1",
                      "--depth", "10", "--disk", "0,1,0.5", "--disk", "0,0,0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["reports"].size(), 2u);  // both square-root branches over the arc
  EXPECT_EQ(j["skipped"].size(), 2u);  // the disk around the critical value 0
}

TEST(Cli, ReportWritesArtifacts) {
  const auto dir = scratch("report");
  const auto r = run({"report", "--family", "rational-inverse", "--p", "0,0,1", "--q", "1", "--x", "2", "--depth", "14", "--out",
                      (dir / "r.json").string(), "--cloud-csv", (dir / "c.csv").string(), "--pgm", (dir / "c.pgm").string(),
                      "--counts-csv", (dir / "n.csv").string(), "--width", "64", "--height", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(dir / "r.json");
  const auto j = json::parse(is);
  EXPECT_TRUE(j["report"]["inequality_ok"].get<bool>());
  EXPECT_EQ(std::filesystem::file_size(dir / "c.pgm"), std::string("P5\n64 64\n255\n").size() + 64u * 64u);
  EXPECT_GT(std::filesystem::file_size(dir / "c.csv"), 100u);
  EXPECT_GT(std::filesystem::file_size(dir / "n.csv"), 10u);
}

TEST(Cli, BinaryExitCodes) {
  const std::string cli = HOLOCORR_CLI_PATH;
  const int ok = std::system((cli + " fixedpoints --family rational-inverse --p 0,0,1 --q 1 > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int bad = std::system((cli + " delta --family rational-inverse --p 0,0,1 --depth -1 > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}

TEST(Cli, MeasureParabolicMassNearFixedPoint) {
  // x = 1 is fixed by one branch of sqrt; other level-n atoms are 2^n-th roots
  // of unity at least 2 sin(pi/64) away, so only the atom at 1 on each level counts.
  const auto r = run({"measure", "--family", "rational-inverse", "--p", "0,0,1", "--x", "1", "--s", "1", "--depth", "6", "--omega", "1",
                      "--radius", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  double expect = 0.0;
  for (int n = 0; n <= 6; ++n) expect += std::pow(2.0, -n) / 7.0;
  EXPECT_NEAR(j["parabolic_mass"]["mass"].get<double>(), expect, 1e-12);
  EXPECT_EQ(j["parabolic_mass"]["radius"].get<double>(), 0.05);
}
