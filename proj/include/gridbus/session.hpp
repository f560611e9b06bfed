#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridbus/broker/planning.hpp"
#include "gridbus/sweep/plan.hpp"
#include "gridbus/world.hpp"

namespace gridbus {

/// What a user asks for: a job set, QoS terms and where to run it.
struct SessionConfig {
  std::string name;
  broker::QoSRequest qos;
  SimTime start = 0.0;
  SimTime reschedule_interval = 10.0;
  std::vector<sweep::JobSpec> jobs;

  // Staging of the application itself to resources that lack it.
  bool stage_code = false;
  double code_mb = 0.0;

  // Set to submit to a cluster instead of brokering across the grid.
  std::optional<std::size_t> cluster;
  SimTime arrival_gap = 0.0;
};

struct ResourceTally {
  std::size_t jobs = 0;
  Money cost;
};

enum class SessionStatus { Pending, Completed, Incomplete, Aborted };

constexpr std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Pending: return "pending";
    case SessionStatus::Completed: return "completed";
    case SessionStatus::Incomplete: return "incomplete";
    case SessionStatus::Aborted: return "aborted";
  }
  return "?";
}

struct SessionReport {
  std::string name;
  std::string mode;      // "broker" or "cluster"
  std::string strategy;  // empty for cluster sessions
  SessionStatus status = SessionStatus::Pending;
  std::string reason;    // why the session aborted, if it did

  std::size_t jobs_total = 0;
  std::size_t jobs_done = 0;
  std::size_t jobs_failed = 0;
  SimTime start = 0.0;
  SimTime deadline = 0.0;
  SimTime last_completion = 0.0;
  SimTime makespan = 0.0;
  Money budget;
  Money total_cost;
  bool deadline_met = false;
  bool budget_respected = false;
  std::size_t replans = 0;

  std::map<std::string, ResourceTally> per_resource;
  std::map<std::string, std::size_t> failures;
};

class Session {
 public:
  virtual ~Session() = default;
  virtual const SessionReport& report() const = 0;
  virtual EntityId entity() const = 0;
  virtual const std::vector<JobId>& jobs() const = 0;
  virtual const SessionConfig& config() const = 0;
  bool finished() const { return report().status != SessionStatus::Pending; }
};

namespace detail {

inline std::vector<JobId> create_jobs(World& w, const SessionConfig& cfg, std::size_t session, EntityId owner) {
  std::vector<JobId> ids;
  ids.reserve(cfg.jobs.size());
  const double per_job_budget = cfg.jobs.empty() ? 0.0 : cfg.qos.budget / static_cast<double>(cfg.jobs.size());
  for (const auto& spec : cfg.jobs) {
    grid::Job j;
    j.length_mi = spec.length_mi;
    j.output_mb = spec.output_mb;
    for (const auto& in : spec.inputs) j.input_files.push_back(in.name);
    ids.push_back(w.add_job(std::move(j), {session, owner, cfg.qos.consumer, cfg.qos.deadline, per_job_budget}));
  }
  return ids;
}

/// Fills the outcome part of a report once every job is terminal.
inline void finalize(SessionReport& r, const World& w, std::span<const JobId> jobs, Money charged) {
  r.jobs_total = jobs.size();
  r.jobs_done = r.jobs_failed = 0;
  r.last_completion = r.start;
  r.per_resource.clear();
  r.failures.clear();
  for (JobId id : jobs) {
    const auto& j = w.jobs[id.index()];
    if (j.status == grid::JobStatus::Done) {
      ++r.jobs_done;
      const SimTime done_at = j.completion_time.value_or(j.finish_time.value_or(r.start));
      r.last_completion = std::max(r.last_completion, done_at);
      auto& tally = r.per_resource[j.resource_label];
      ++tally.jobs;
      tally.cost += j.cost_incurred;
    } else {
      ++r.jobs_failed;
      ++r.failures[j.failure_reason];
    }
  }
  r.total_cost = charged;
  r.makespan = r.jobs_done > 0 ? r.last_completion - r.start : 0.0;
  r.deadline_met = r.jobs_failed == 0 && r.last_completion <= r.deadline;
  r.budget_respected = r.total_cost <= r.budget;
  if (r.status != SessionStatus::Aborted) {
    r.status = r.jobs_failed == 0 ? SessionStatus::Completed : SessionStatus::Incomplete;
  }
}

inline void fail_remaining(World& w, std::span<const JobId> jobs, const std::string& reason) {
  for (JobId id : jobs) {
    auto& j = w.job(id);
    if (!grid::is_terminal(j.status)) grid::fail(j, reason);
  }
}

inline bool all_terminal(const World& w, std::span<const JobId> jobs) {
  return std::all_of(jobs.begin(), jobs.end(), [&](JobId id) { return grid::is_terminal(w.jobs[id.index()].status); });
}

}  // namespace detail

}  // namespace gridbus
