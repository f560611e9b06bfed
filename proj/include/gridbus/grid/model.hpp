#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridbus/core/types.hpp"

namespace gridbus::grid {

struct Site {
  SiteId id;
  std::string name;
  int utc_offset_hours = 0;
};

/// Daily interval [start_hour, end_hour) in site-local time. start == end is
/// the empty window.
struct PeakWindow {
  double start_hour = 0.0;
  double end_hour = 0.0;

  bool empty() const { return !(start_hour < end_hour); }
  bool valid() const { return empty() ? start_hour == end_hour : (start_hour >= 0.0 && end_hour <= 24.0); }
  bool contains(double local_hour) const { return !empty() && local_hour >= start_hour && local_hour < end_hour; }
};

struct GridResource {
  ResourceId id;
  std::string name;
  SiteId site;
  int n_pe = 1;
  double pe_rating_mips = 1.0;
  double base_price = 0.0;  // G$ per PE-second
  double peak_multiplier = 1.0;
  PeakWindow peak_window;
  AccountId provider_account;
  std::set<std::string> apps;
};

enum class JobStatus { Created, Queued, Dispatched, Transferring, Running, Done, Failed };

constexpr std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Created: return "created";
    case JobStatus::Queued: return "queued";
    case JobStatus::Dispatched: return "dispatched";
    case JobStatus::Transferring: return "transferring";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
  }
  return "unknown";
}

constexpr bool is_terminal(JobStatus s) { return s == JobStatus::Done || s == JobStatus::Failed; }

struct Job {
  JobId id;
  double length_mi = 0.0;
  std::vector<std::string> input_files;
  double output_mb = 0.0;
  JobStatus status = JobStatus::Created;
  std::optional<ResourceId> assigned_resource;
  std::optional<SimTime> submit_time;
  std::optional<SimTime> start_time;
  std::optional<SimTime> finish_time;
  Money cost_incurred;

  // Bookkeeping beyond the core lifecycle.
  std::string resource_label;  // name of the resource or Libra node that ran it
  std::optional<SimTime> completion_time;  // finish plus output staging
  Money compute_cost;
  Money data_cost;
  std::string failure_reason;
};

/// Legal moves of the job state machine. Failed is reachable from every
/// non-terminal state; nothing leaves a terminal state.
constexpr bool can_transition(JobStatus from, JobStatus to) {
  if (is_terminal(from)) return false;
  if (to == JobStatus::Failed) return true;
  switch (from) {
    case JobStatus::Created: return to == JobStatus::Queued;
    case JobStatus::Queued: return to == JobStatus::Dispatched;
    case JobStatus::Dispatched: return to == JobStatus::Transferring;
    case JobStatus::Transferring: return to == JobStatus::Running;
    case JobStatus::Running: return to == JobStatus::Done;
    default: return false;
  }
}

inline void transition(Job& job, JobStatus to) {
  if (!can_transition(job.status, to)) {
    throw Error(Errc::InvalidTransition, "job " + std::to_string(job.id.value) + ": " +
                                             std::string(to_string(job.status)) + " -> " +
                                             std::string(to_string(to)));
  }
  job.status = to;
}

inline void fail(Job& job, std::string reason) {
  transition(job, JobStatus::Failed);
  job.failure_reason = std::move(reason);
}

// ---------------------------------------------------------------------------
// Execution and pricing

inline SimTime job_runtime(double length_mi, double pe_rating_mips) {
  if (!(pe_rating_mips > 0.0)) throw Error(Errc::NonpositiveRating, "PE rating must be positive");
  if (length_mi < 0.0) throw Error(Errc::InvalidArgument, "job length must be non-negative");
  return length_mi / pe_rating_mips;
}

/// Hour of day in [0, 24) at the site for simulated time t.
inline double local_hour(SimTime t, int utc_offset_hours) {
  double h = std::fmod(t / 3600.0 + utc_offset_hours, 24.0);
  if (h < 0.0) h += 24.0;
  return h;
}

/// G$ per PE-second at time t.
inline double price_at(const GridResource& r, int utc_offset_hours, SimTime t) {
  return r.peak_window.contains(local_hour(t, utc_offset_hours)) ? r.base_price * r.peak_multiplier
                                                                   : r.base_price;
}

inline double price_at(const GridResource& r, const Site& site, SimTime t) {
  return price_at(r, site.utc_offset_hours, t);
}

/// Compute charge for running `length_mi` on `r`, with the rate sampled at
/// `start` and held for the whole run.
inline double compute_cost(double length_mi, const GridResource& r, const Site& site, SimTime start) {
  return job_runtime(length_mi, r.pe_rating_mips) * price_at(r, site, start);
}

inline double compute_cost(const Job& job, const GridResource& r, const Site& site, SimTime start) {
  return compute_cost(job.length_mi, r, site, start);
}

/// Planning estimate of when a job joining `backlog_jobs` identical pending
/// jobs completes on an otherwise idle resource.
inline SimTime estimate_completion(const GridResource& r, std::size_t backlog_jobs, double job_length_mi, SimTime t) {
  const auto waves = (backlog_jobs + 1 + static_cast<std::size_t>(r.n_pe) - 1) / static_cast<std::size_t>(r.n_pe);
  return t + static_cast<double>(waves) * job_runtime(job_length_mi, r.pe_rating_mips);
}

// ---------------------------------------------------------------------------
// Space-shared FCFS bookkeeping

struct Slot {
  std::size_t pe = 0;
  SimTime start = 0.0;
  SimTime end = 0.0;
};

/// Per-PE next-free times of one resource. A job takes the PE that frees up
/// first (lowest index on ties) and holds it for its whole occupancy.
class ResourceState {
 public:
  explicit ResourceState(int n_pe) : next_free_(static_cast<std::size_t>(std::max(n_pe, 1)), 0.0) {}

  std::span<const SimTime> next_free() const { return next_free_; }
  std::size_t n_pe() const { return next_free_.size(); }

  std::size_t earliest_pe() const {
    return static_cast<std::size_t>(std::min_element(next_free_.begin(), next_free_.end()) - next_free_.begin());
  }

  /// Where a job arriving at `arrival` would go, without committing.
  Slot preview(SimTime arrival, SimTime occupancy) const {
    const std::size_t pe = earliest_pe();
    const SimTime start = std::max(arrival, next_free_[pe]);
    return {pe, start, start + occupancy};
  }

  Slot submit(SimTime arrival, SimTime occupancy) {
    Slot s = preview(arrival, occupancy);
    next_free_[s.pe] = s.end;
    ++dispatched_;
    return s;
  }

  std::size_t dispatched() const { return dispatched_; }

 private:
  std::vector<SimTime> next_free_;
  std::size_t dispatched_ = 0;
};

struct Placement {
  SimTime start = 0.0;
  SimTime finish = 0.0;
};

/// Places a job with no staging on the earliest-free PE.
inline Placement submit_to_resource(ResourceState& state, const GridResource& r, const Job& job, SimTime arrival) {
  const SimTime runtime = job_runtime(job.length_mi, r.pe_rating_mips);
  const Slot s = state.submit(arrival, runtime);
  return {s.start, s.end};
}

}  // namespace gridbus::grid
