#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridbus/core/format.hpp"
#include "gridbus/scenario/scenario.hpp"
#include "gridbus/simulation.hpp"

namespace gridbus::scenario {

enum ExitCode : int {
  kExitOk = 0,
  kExitIncomplete = 1,
  kExitParse = 2,
  kExitInvalid = 3,
  kExitInvariant = 4,
};

namespace detail {

inline std::string opt_time(const std::optional<SimTime>& t) { return t ? format_number(*t) : std::string(); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_jobs_csv(std::ostream& os, const World& w) {
  os << "job,resource,submit,start,finish,compute_cost,data_cost,status\n";
  for (const auto& j : w.jobs) {
    os << j.id.value << ',' << detail::csv_field(j.resource_label) << ',' << detail::opt_time(j.submit_time) << ','
       << detail::opt_time(j.start_time) << ',' << detail::opt_time(j.finish_time) << ',' << format_money(j.compute_cost)
       << ',' << format_money(j.data_cost) << ',' << grid::to_string(j.status) << '\n';
  }
}

inline void write_ledger_csv(std::ostream& os, const World& w) {
  os << "time,job,consumer,provider,resource,pe_seconds,data_mb,amount\n";
  for (const auto& tx : w.bank.ledger()) {
    const auto& r = tx.record;
    os << format_number(r.time) << ',' << r.job.value << ',' << detail::csv_field(w.bank.account(r.consumer).owner) << ','
       << detail::csv_field(w.bank.account(r.provider).owner) << ',' << detail::csv_field(r.resource) << ','
       << format_number(r.pe_seconds) << ',' << format_number(r.data_mb) << ',' << format_money(r.amount) << '\n';
  }
}

/// Streams every delivered event as one CSV row.
class TraceWriter {
 public:
  TraceWriter(std::ostream& os, const World& w) : os_(os), w_(w) {
    os_ << "time,seq,entity,kind,job,resource,value\n";
  }

  void operator()(const Event& ev) {
    const Message& m = ev.payload;
    os_ << format_number(ev.time) << ',' << ev.seq << ',' << detail::csv_field(w_.kernel.entity_name(ev.target)) << ','
        << to_string(m.kind) << ',';
    if (m.job.valid()) os_ << m.job.value;
    os_ << ',';
    if (m.resource.valid()) os_ << detail::csv_field(w_.grid.resource(m.resource).name);
    os_ << ',';
    if (!std::isnan(m.value)) os_ << format_number(m.value);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  const World& w_;
};

inline nlohmann::ordered_json session_json(const SessionReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["mode"] = r.mode;
  if (!r.strategy.empty()) j["strategy"] = r.strategy;
  j["status"] = std::string(to_string(r.status));
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["jobs_total"] = r.jobs_total;
  j["jobs_done"] = r.jobs_done;
  j["jobs_failed"] = r.jobs_failed;
  j["start"] = r.start;
  j["deadline"] = r.deadline;
  j["makespan"] = r.makespan;
  j["budget"] = r.budget.gd();
  j["total_cost"] = r.total_cost.gd();
  j["deadline_met"] = r.deadline_met;
  j["budget_respected"] = r.budget_respected;
  j["replans"] = r.replans;
  auto& per = j["per_resource"] = nlohmann::ordered_json::object();
  for (const auto& [name, t] : r.per_resource) per[name] = {{"jobs", t.jobs}, {"cost", t.cost.gd()}};
  auto& fails = j["failures"] = nlohmann::ordered_json::object();
  for (const auto& [why, n] : r.failures) fails[why] = n;
  return j;
}

struct RunOptions {
  Overrides overrides;
  std::filesystem::path out_dir = ".";
  bool trace = false;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string reason;
  std::vector<Finding> findings;
  nlohmann::ordered_json summary;
};

/// Loads, validates and builds a scenario without running it. Construction
/// problems that slip past validation are reported as findings too.
inline LoadResult prepare(const std::filesystem::path& path, const Overrides& ov,
                          std::unique_ptr<Simulation>* out = nullptr) {
  LoadResult res = load_file(path);
  if (res.status != LoadStatus::Ok) return res;
  try {
    auto sim = build(*res.scenario, ov);
    if (out) *out = std::move(sim);
  } catch (const Error& e) {
    res.status = LoadStatus::Invalid;
    res.findings.push_back({"", e.what()});
  }
  return res;
}

inline std::vector<Finding> validate_scenario(const std::filesystem::path& path) {
  return prepare(path, {}).findings;
}

inline RunOutcome run_scenario(const std::filesystem::path& path, const RunOptions& opt) {
  RunOutcome out;
  std::unique_ptr<Simulation> sim;
  LoadResult loaded = prepare(path, opt.overrides, &sim);
  if (loaded.status != LoadStatus::Ok) {
    out.exit_code = loaded.status == LoadStatus::SyntaxError ? kExitParse : kExitInvalid;
    out.reason = loaded.status == LoadStatus::SyntaxError ? "config-parse-error" : "validation-error";
    out.findings = std::move(loaded.findings);
    return out;
  }
  const Scenario& scn = *loaded.scenario;
  World& w = sim->world();

  std::filesystem::create_directories(opt.out_dir);
  std::ofstream events;
  std::optional<TraceWriter> trace;
  if (opt.trace) {
    events.open(opt.out_dir / "events.csv", std::ios::binary);
    trace.emplace(events, w);
    w.kernel.set_observer([&trace](const Event& ev) { (*trace)(ev); });
  }

  const auto t0 = std::chrono::steady_clock::now();
  const sim::RunStats stats = sim->run(scn.end_time);
  const auto t1 = std::chrono::steady_clock::now();
  if (events.is_open()) events.close();

  {
    std::ofstream jobs(opt.out_dir / "jobs.csv", std::ios::binary);
    write_jobs_csv(jobs, w);
    std::ofstream ledger(opt.out_dir / "ledger.csv", std::ios::binary);
    write_ledger_csv(ledger, w);
  }

  InvariantReport inv = sim->check_invariants();
  std::size_t done = 0;
  for (const auto& s : sim->sessions()) done += s->report().jobs_done;
  if (w.bank.ledger().size() != done) inv.violations.push_back("ledger rows do not match completed jobs");

  const bool conservation = w.bank.total_balance() == w.bank.total_initial();
  if (!inv.ok()) {
    out.exit_code = kExitInvariant;
    out.reason = "invariant-violation";
  } else if (!sim->all_sessions_completed()) {
    out.exit_code = kExitIncomplete;
    bool aborted = false;
    for (const auto& s : sim->sessions()) aborted = aborted || s->report().status == SessionStatus::Aborted;
    out.reason = aborted ? "session-aborted" : "session-incomplete";
  }

  nlohmann::ordered_json& j = out.summary;
  j["sessions"] = nlohmann::ordered_json::array();
  for (const auto& s : sim->sessions()) j["sessions"].push_back(session_json(s->report()));
  j["conservation_ok"] = conservation;
  j["events"] = stats.events_delivered;
  j["runtime_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  j["status"] = out.exit_code == kExitOk ? "ok" : out.reason;
  j["seed"] = opt.overrides.seed.value_or(scn.seed);
  j["final_time"] = stats.final_time;
  j["violations"] = inv.violations;
  auto& accounts = j["accounts"] = nlohmann::ordered_json::array();
  for (const auto& a : w.bank.accounts()) {
    accounts.push_back({{"name", a.owner}, {"initial", a.initial.gd()}, {"balance", a.balance.gd()}});
  }
  std::ofstream summary(opt.out_dir / "summary.json", std::ios::binary);
  summary << j.dump(2) << '\n';
  return out;
}

}  // namespace gridbus::scenario
