#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gridbus/scenario/runner.hpp"

namespace fs = std::filesystem;
using namespace gridbus;
using namespace gridbus::scenario;

namespace {

const fs::path kData = GRIDBUS_TEST_DATA;
const fs::path kScenarios = GRIDBUS_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("gridbus-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool mentions(const std::vector<Finding>& findings, const std::string& needle) {
  for (const auto& f : findings)
    if (f.str().find(needle) != std::string::npos) return true;
  return false;
}

struct Cli {
  int code = -1;
  std::string out;
  std::string err;
};

Cli cli(const std::string& args, const std::string& tag) {
  const fs::path dir = scratch("cli-" + tag);
  const std::string cmd = std::string(GRIDBUS_CLI) + " " + args + " > " + (dir / "stdout").string() + " 2> " +
                          (dir / "stderr").string();
  const int status = std::system(cmd.c_str());
  Cli r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

}  // namespace

TEST(ScenarioLoad, TinyScenarioIsValid) {
  const auto res = load_file(kData / "tiny.toml");
  ASSERT_EQ(res.status, LoadStatus::Ok) << (res.findings.empty() ? "" : res.findings[0].str());
  ASSERT_EQ(res.scenario->sessions.size(), 1u);
  EXPECT_EQ(res.scenario->sessions[0].jobs.size(), 2u);
}

TEST(ScenarioLoad, NegativeBudgetNamesTheSession) {
  const auto res = load_file(kData / "bad-budget.toml");
  EXPECT_EQ(res.status, LoadStatus::Invalid);
  ASSERT_EQ(res.findings.size(), 1u);
  EXPECT_NE(res.findings[0].str().find("pair"), std::string::npos) << res.findings[0].str();
  EXPECT_NE(res.findings[0].str().find("budget"), std::string::npos);
}

TEST(ScenarioLoad, PlanSyntaxErrorCarriesTheLine) {
  const auto res = load_file(kData / "plan-syntax.toml");
  EXPECT_EQ(res.status, LoadStatus::Invalid);
  EXPECT_TRUE(mentions(res.findings, "plan line 3: expected ')'")) << (res.findings.empty() ? "" : res.findings[0].str());
}

TEST(ScenarioLoad, DanglingFileIsNamed) {
  const auto res = load_file(kData / "dangling.toml");
  EXPECT_EQ(res.status, LoadStatus::Invalid);
  EXPECT_TRUE(mentions(res.findings, "missing-1.dat"));
}

TEST(ScenarioLoad, TomlSyntaxError) {
  EXPECT_EQ(load_file(kData / "broken.toml").status, LoadStatus::SyntaxError);
  EXPECT_EQ(load_file(kData / "no-such-file.toml").status, LoadStatus::SyntaxError);
}

TEST(ScenarioLoad, UnknownKeysAndReferences) {
  const auto text = slurp(kData / "tiny.toml");
  auto res = load_text(text + "\nmystery = 3\n", kData / "x.toml");
  EXPECT_EQ(res.status, LoadStatus::Invalid);
  EXPECT_TRUE(mentions(res.findings, "mystery"));

  std::string bad_site = text;
  bad_site.replace(bad_site.find("site = \"home\""), 13, "site = \"mars\"");
  res = load_text(bad_site, kData / "x.toml");
  EXPECT_EQ(res.status, LoadStatus::Invalid);
  EXPECT_TRUE(mentions(res.findings, "mars"));
}

TEST(ScenarioLoad, BundledScenariosAreValid) {
  for (const char* name : {"belle.toml", "newswire.toml", "cluster.toml", "synthetic_10k.toml"}) {
    const auto res = prepare(kScenarios / name, {});
    EXPECT_EQ(res.status, LoadStatus::Ok) << name << ": " << (res.findings.empty() ? "" : res.findings[0].str());
  }
}

TEST(ScenarioLoad, NewswireInputVolume) {
  const auto res = load_file(kScenarios / "newswire.toml");
  ASSERT_EQ(res.status, LoadStatus::Ok);
  double mb = 0.0;
  for (const auto& j : res.scenario->sessions[0].jobs)
    for (const auto& f : j.inputs) mb += f.size_mb;
  EXPECT_EQ(res.scenario->sessions[0].jobs.size(), 12u);
  EXPECT_EQ(mb, 84.0);
}

TEST(ScenarioRun, TinyCompletesAndWritesOutputs) {
  const fs::path out = scratch("tiny");
  RunOptions opt;
  opt.out_dir = out;
  opt.trace = true;
  const auto res = run_scenario(kData / "tiny.toml", opt);
  EXPECT_EQ(res.exit_code, kExitOk) << res.reason;
  EXPECT_EQ(res.summary["status"], "ok");
  EXPECT_TRUE(res.summary["conservation_ok"].get<bool>());
  EXPECT_EQ(res.summary["sessions"][0]["total_cost"].get<double>(), 3.0);

  const auto jobs = slurp(out / "jobs.csv");
  EXPECT_EQ(jobs.substr(0, jobs.find('\n')), "job,resource,submit,start,finish,compute_cost,data_cost,status");
  EXPECT_NE(jobs.find("box"), std::string::npos);
  const auto ledger = slurp(out / "ledger.csv");
  EXPECT_EQ(ledger.substr(0, ledger.find('\n')), "time,job,consumer,provider,resource,pe_seconds,data_mb,amount");
  EXPECT_NE(ledger.find(",user,owner,box,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "events.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST(ScenarioRun, OverspendingBudgetIsIncomplete) {
  RunOptions opt;
  opt.out_dir = scratch("overspend");
  const auto res = run_scenario(kData / "overspend.toml", opt);
  EXPECT_EQ(res.exit_code, kExitIncomplete);
  EXPECT_EQ(res.reason, "session-incomplete");
}

TEST(ScenarioRun, SeedOverrideIsRecorded) {
  RunOptions opt;
  opt.out_dir = scratch("seed");
  opt.overrides.seed = 99;
  const auto res = run_scenario(kData / "tiny.toml", opt);
  EXPECT_EQ(res.summary["seed"].get<std::uint64_t>(), 99u);
}

TEST(ScenarioRun, StrategyOverride) {
  RunOptions opt;
  opt.out_dir = scratch("strategy");
  opt.overrides.strategy = broker::Strategy::TimeOpt;
  const auto res = run_scenario(kData / "tiny.toml", opt);
  EXPECT_EQ(res.summary["sessions"][0]["strategy"], "time");
}

// Command line --------------------------------------------------------------------

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(cli("validate " + (kData / "tiny.toml").string(), "v0").code, 0);
  EXPECT_EQ(cli("validate " + (kData / "broken.toml").string(), "v2").code, 2);
  EXPECT_EQ(cli("validate " + (kData / "absent.toml").string(), "v2b").code, 2);
  const auto bad = cli("validate " + (kData / "bad-budget.toml").string(), "v3");
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("pair"), std::string::npos);
  const auto dangling = cli("validate " + (kData / "dangling.toml").string(), "v3b");
  EXPECT_EQ(dangling.code, 3);
  EXPECT_NE(dangling.err.find("missing-1.dat"), std::string::npos);
}

TEST(Cli, RunExitCodes) {
  const fs::path out = scratch("cli-run-out");
  const auto ok = cli("run " + (kData / "tiny.toml").string() + " --out " + out.string(), "r0");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("pair: completed, 2/2 jobs"), std::string::npos) << ok.out;
  EXPECT_EQ(cli("run " + (kData / "overspend.toml").string() + " --out " + out.string(), "r1").code, 1);
  EXPECT_EQ(cli("run " + (kData / "broken.toml").string() + " --out " + out.string(), "r2").code, 2);
  EXPECT_EQ(cli("run " + (kData / "tiny.toml").string() + " --strategy fastest --out " + out.string(), "r3").code, 3);
}

TEST(Cli, SameSeedGivesIdenticalTraces) {
  const fs::path a = scratch("cli-seed-a"), b = scratch("cli-seed-b");
  const std::string scn = (kScenarios / "newswire.toml").string();
  ASSERT_EQ(cli("run " + scn + " --seed 42 --trace --out " + a.string(), "sa").code, 0);
  ASSERT_EQ(cli("run " + scn + " --seed 42 --trace --out " + b.string(), "sb").code, 0);
  for (const char* f : {"events.csv", "jobs.csv", "ledger.csv"}) {
    const auto x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
}

TEST(Cli, ExpandPrintsOneRowPerJob) {
  const auto r = cli("expand " + (kScenarios / "plans" / "newswire.plan").string(), "e0");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, line;
  std::getline(lines, header);
  EXPECT_EQ(header, "job,month,length_mi,inputs,input_mb,output_mb");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 12);
  EXPECT_NE(r.out.find("0,1,62000,news-1.xml,7,0.2"), std::string::npos) << r.out;

  const fs::path bad = scratch("bad-plan") / "bad.plan";
  std::ofstream(bad) << "parameter x integer range 1 3 step 1;\ntask t\n  length x +\nendtask\n";
  const auto e = cli("expand " + bad.string(), "e3");
  EXPECT_EQ(e.code, 3);
  EXPECT_NE(e.err.find(":3:"), std::string::npos) << e.err;
  EXPECT_EQ(cli("expand /nonexistent.plan", "e2").code, 2);
}
