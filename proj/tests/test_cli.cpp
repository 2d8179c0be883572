#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run lab(const std::string& args) {
  const std::string cmd = std::string(MBPM_LAB_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string spec(const std::string& name) { return std::string(MBPM_SPEC_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, MomentsSuitePasses) {
  const auto dir = fs::temp_directory_path() / "mbpm_cli_moments";
  fs::remove_all(dir);
  const auto r = lab("--spec " + spec("coupled2.json") + " --suite moments --reps 100000 --out " + dir.string());
  EXPECT_EQ(r.status, 0) << r.out;
  const auto doc = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_EQ(doc["parameters"]["state"], nlohmann::json::array({50, 30}));
  EXPECT_TRUE(doc["results"].contains("exact"));
  EXPECT_TRUE(doc.contains("spec_digest"));
  EXPECT_TRUE(doc.contains("thresholds"));
  EXPECT_TRUE(fs::exists(dir / "moments.tsv"));
  fs::remove_all(dir);
}

TEST(Cli, PureDeathExplosionIsZero) {
  const auto r = lab("--spec " + spec("pure_death.json") + " --suite explosion --n 50 --reps 500");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["results"]["terminal"]["fraction"].get<double>(), 0.0);
}

TEST(Cli, MissingOffspringIsAFieldNamedError) {
  const auto bad = fs::temp_directory_path() / "mbpm_bad_spec.json";
  std::ofstream(bad) << R"({"initial": {"state": [1]}})";
  const auto r = lab("--spec " + bad.string() + " --suite moments");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("offspring"), std::string::npos) << r.out;
  fs::remove(bad);
}

TEST(Cli, UnknownSuiteIsRejected) {
  const auto r = lab("--spec " + spec("gamma1.json") + " --suite nonsense");
  EXPECT_NE(r.status, 0);
}

TEST(Cli, InfeasibleGammaLimitCitesTheCondition) {
  const auto r = lab("--spec " + spec("drift_quarter.json") + " --suite gamma-limit");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find(">= 2 u'c"), std::string::npos) << r.out;
}

TEST(Cli, ReportIsIdenticalAcrossWorkerCountsApartFromHeader) {
  const std::string base = "--spec " + spec("coupled2.json") + " --suite classify --n 100 --reps 300 --seed 17";
  auto a = lab(base + " --workers 1");
  auto b = lab(base + " --workers 5");
  ASSERT_NE(a.status, 2) << a.out;
  auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
  EXPECT_EQ(ja["header"]["tool"], "mbpm-lab");
  ja.erase("header");
  jb.erase("header");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(ja["seed"], 17);
}

TEST(Cli, FixedTimestampGivesByteIdenticalReports) {
  const std::string base = "--spec " + spec("gamma1.json") + " --suite feller --n 50 --reps 100 --timestamp 2026-01-01T00:00:00Z";
  const auto a = lab(base), b = lab(base + " --workers 3");
  ASSERT_EQ(a.status, b.status);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ThresholdOverridesAreRecorded) {
  const auto r = lab("--spec " + spec("gamma1.json") + " --suite gamma-limit --n 200 --reps 500 --threshold-ks 0.2");
  ASSERT_NE(r.status, 2) << r.out;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["thresholds"]["ks"].get<double>(), 0.2);
}
