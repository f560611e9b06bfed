// Command-line front end: run, validate and expand.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridbus/scenario/runner.hpp"
#include "gridbus/sweep/plan.hpp"

namespace {

using namespace gridbus;

void print_findings(const std::vector<scenario::Finding>& findings) {
  for (const auto& f : findings) std::cerr << f.str() << '\n';
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_dir, bool trace,
            const std::string& strategy) {
  scenario::RunOptions opt;
  opt.overrides.seed = seed;
  opt.out_dir = out_dir;
  opt.trace = trace;
  if (!strategy.empty()) {
    auto s = broker::parse_strategy(strategy);
    if (!s) {
      std::cerr << "unknown strategy '" << strategy << "' (expected cost, time or cost-time)\n";
      return scenario::kExitInvalid;
    }
    opt.overrides.strategy = *s;
  }
  const auto outcome = scenario::run_scenario(path, opt);
  print_findings(outcome.findings);
  if (!outcome.summary.is_null()) {
    for (const auto& s : outcome.summary["sessions"]) {
      std::cout << s["name"].get<std::string>() << ": " << s["status"].get<std::string>() << ", "
                << s["jobs_done"].get<std::size_t>() << "/" << s["jobs_total"].get<std::size_t>() << " jobs, cost "
                << s["total_cost"].get<double>() << " of " << s["budget"].get<double>() << ", makespan "
                << s["makespan"].get<double>() << '\n';
    }
  }
  if (outcome.exit_code != scenario::kExitOk) std::cerr << "error: " << outcome.reason << '\n';
  return outcome.exit_code;
}

int cmd_validate(const std::string& path) {
  const auto res = scenario::prepare(path, {});
  print_findings(res.findings);
  switch (res.status) {
    case scenario::LoadStatus::Ok:
      std::cout << "ok\n";
      return scenario::kExitOk;
    case scenario::LoadStatus::SyntaxError:
      return scenario::kExitParse;
    case scenario::LoadStatus::Invalid:
      break;
  }
  return scenario::kExitInvalid;
}

int cmd_expand(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot read file\n";
    return scenario::kExitParse;
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  sweep::JobSet set;
  sweep::Plan plan;
  try {
    plan = sweep::parse_plan(text);
    set = sweep::expand(plan);
  } catch (const sweep::PlanError& e) {
    std::cerr << path << ":" << e.line() << ": " << e.message() << '\n';
    return scenario::kExitInvalid;
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return scenario::kExitInvalid;
  }
  std::cout << "job";
  for (const auto& p : plan.parameters) std::cout << ',' << p.name;
  std::cout << ",length_mi,inputs,input_mb,output_mb\n";
  for (const auto& job : set.jobs) {
    std::cout << job.index;
    for (const auto& [name, v] : job.point) std::cout << ',' << sweep::format_value(v);
    double mb = 0.0;
    std::string names;
    for (const auto& f : job.inputs) {
      if (!names.empty()) names += ';';
      names += f.name;
      mb += f.size_mb;
    }
    std::cout << ',' << format_number(job.length_mi) << ',' << names << ',' << format_number(mb) << ','
              << format_number(job.output_mb) << '\n';
  }
  return scenario::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Economy-driven grid scheduling simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write jobs.csv, ledger.csv and summary.json");
  std::string run_path, out_dir = ".", strategy;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  run->add_option("scenario", run_path, "Scenario file (TOML)")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--trace", trace, "Also write events.csv");
  run->add_option("--strategy", strategy, "Override every broker session's strategy: cost, time or cost-time");

  auto* validate = app.add_subcommand("validate", "Check a scenario without simulating it");
  std::string validate_path;
  validate->add_option("scenario", validate_path, "Scenario file (TOML)")->required();

  auto* expand = app.add_subcommand("expand", "Print the jobs a plan file expands to");
  std::string plan_path;
  expand->add_option("plan", plan_path, "Plan file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_path, seed, out_dir, trace, strategy);
    if (*validate) return cmd_validate(validate_path);
    if (*expand) return cmd_expand(plan_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return scenario::kExitInvariant;
  }
  return 0;
}
