#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gridbus/core/types.hpp"
#include "gridbus/market/directory.hpp"

namespace gridbus::broker {

enum class Strategy { CostOpt, TimeOpt, CostTime };

constexpr std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::CostOpt: return "cost";
    case Strategy::TimeOpt: return "time";
    case Strategy::CostTime: return "cost-time";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "cost" || s == "cost-opt" || s == "CostOpt") return Strategy::CostOpt;
  if (s == "time" || s == "time-opt" || s == "TimeOpt") return Strategy::TimeOpt;
  if (s == "cost-time" || s == "CostTime") return Strategy::CostTime;
  return std::nullopt;
}

struct QoSRequest {
  SimTime deadline = 0.0;  // absolute
  double budget = 0.0;     // G$
  Strategy strategy = Strategy::CostOpt;
  AccountId consumer;
  SiteId home_site;
  std::string app;
};

struct CandidateResource {
  market::ServiceEntry entry;
  ResourceId resource;
  double per_job_cost = 0.0;      // compute + data, G$
  SimTime per_job_time = 0.0;     // PE occupancy: staging plus compute
  std::size_t capacity_by_deadline = 0;
  std::vector<SimTime> pe_free;   // absolute next-free time per PE
};

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Number of jobs of length `per_job_time` that can finish by `deadline` when
/// each PE starts at max(t_now, its next-free time).
inline std::size_t capacity_by_deadline(std::span<const SimTime> pe_free, SimTime t_now, SimTime per_job_time,
                                        SimTime deadline) {
  if (!(per_job_time > 0.0)) {
    for (SimTime f : pe_free)
      if (std::max(f, t_now) <= deadline) return kUnbounded;
    return 0;
  }
  std::size_t total = 0;
  for (SimTime f : pe_free) {
    const SimTime start = std::max(f, t_now);
    if (start > deadline) continue;
    auto k = static_cast<std::size_t>(std::floor((deadline - start) / per_job_time));
    while (start + static_cast<double>(k + 1) * per_job_time <= deadline) ++k;
    while (k > 0 && start + static_cast<double>(k) * per_job_time > deadline) --k;
    total += k;
  }
  return total;
}

struct SchedulePlan {
  std::vector<std::pair<JobId, ResourceId>> assignment;  // in job order
  double projected_cost = 0.0;
  SimTime projected_makespan = 0.0;  // relative to the planning time
  SimTime projected_finish = 0.0;    // absolute

  std::optional<ResourceId> resource_of(JobId j) const {
    for (const auto& [job, r] : assignment)
      if (job == j) return r;
    return std::nullopt;
  }

  std::size_t count_on(ResourceId r) const {
    return static_cast<std::size_t>(std::count_if(assignment.begin(), assignment.end(),
                                                  [r](const auto& a) { return a.second == r; }));
  }
};

/// Jobs x candidates cost/time matrices for one planning round. A cost of
/// +inf marks a pair that cannot run (for example, unreachable input data).
struct PlanningProblem {
  std::vector<JobId> jobs;
  std::vector<CandidateResource> candidates;
  std::vector<double> cost;
  std::vector<SimTime> time;
  SimTime t_now = 0.0;
  SimTime deadline = 0.0;
  double budget = 0.0;

  double cost_of(std::size_t j, std::size_t c) const { return cost[j * candidates.size() + c]; }
  SimTime time_of(std::size_t j, std::size_t c) const { return time[j * candidates.size() + c]; }
  bool usable(std::size_t j, std::size_t c) const { return std::isfinite(cost_of(j, c)) && std::isfinite(time_of(j, c)); }
};

/// Every job costs and takes what its candidate's per-job figures say.
inline PlanningProblem homogeneous_problem(std::span<const JobId> jobs, std::vector<CandidateResource> candidates,
                                           const QoSRequest& qos, SimTime t_now) {
  PlanningProblem p;
  p.jobs.assign(jobs.begin(), jobs.end());
  p.candidates = std::move(candidates);
  p.t_now = t_now;
  p.deadline = qos.deadline;
  p.budget = qos.budget;
  p.cost.reserve(p.jobs.size() * p.candidates.size());
  p.time.reserve(p.jobs.size() * p.candidates.size());
  for (std::size_t j = 0; j < p.jobs.size(); ++j) {
    for (const auto& c : p.candidates) {
      p.cost.push_back(c.per_job_cost);
      p.time.push_back(c.per_job_time);
    }
  }
  return p;
}

namespace detail {

/// Projected PE availability of one candidate during planning.
class Timeline {
 public:
  Timeline(std::span<const SimTime> pe_free, SimTime t_now) {
    free_.reserve(std::max<std::size_t>(pe_free.size(), 1));
    for (SimTime f : pe_free) free_.push_back(std::max(f, t_now));
    if (free_.empty()) free_.push_back(t_now);
    refresh();
  }

  SimTime earliest() const { return free_[min_]; }
  SimTime finish_if_added(SimTime duration) const { return free_[min_] + duration; }

  SimTime add(SimTime duration) {
    free_[min_] += duration;
    const SimTime f = free_[min_];
    refresh();
    return f;
  }

 private:
  void refresh() { min_ = static_cast<std::size_t>(std::min_element(free_.begin(), free_.end()) - free_.begin()); }

  std::vector<SimTime> free_;
  std::size_t min_ = 0;
};

inline std::vector<Timeline> timelines(const PlanningProblem& p) {
  std::vector<Timeline> out;
  out.reserve(p.candidates.size());
  for (const auto& c : p.candidates) out.emplace_back(c.pe_free, p.t_now);
  return out;
}

struct PlanBuilder {
  const PlanningProblem& problem;
  SchedulePlan plan;
  SimTime last = 0.0;

  explicit PlanBuilder(const PlanningProblem& p) : problem(p), last(p.t_now) { plan.assignment.reserve(p.jobs.size()); }

  void assign(std::size_t j, std::size_t c, SimTime finish) {
    plan.assignment.emplace_back(problem.jobs[j], problem.candidates[c].resource);
    plan.projected_cost += problem.cost_of(j, c);
    last = std::max(last, finish);
  }

  SchedulePlan finish() {
    plan.projected_finish = last;
    plan.projected_makespan = last - problem.t_now;
    return std::move(plan);
  }
};

inline void require_candidates(const PlanningProblem& p) {
  if (p.candidates.empty()) throw Error(Errc::NoCandidates, "no candidate resources to plan on");
}

inline void check_budget(const SchedulePlan& plan, const PlanningProblem& p) {
  if (plan.projected_cost > p.budget) {
    throw Error(Errc::BudgetInfeasible, "projected cost " + std::to_string(plan.projected_cost) + " exceeds budget " +
                                            std::to_string(p.budget));
  }
}

inline void check_deadline(const SchedulePlan& plan, const PlanningProblem& p) {
  if (plan.projected_finish > p.deadline) {
    throw Error(Errc::DeadlineInfeasible, "projected finish " + std::to_string(plan.projected_finish) +
                                              " is after the deadline " + std::to_string(p.deadline));
  }
}

}  // namespace detail

/// Cost optimisation: each job, in id order, goes to the cheapest candidate
/// that can still finish it by the deadline. For identical jobs this fills
/// candidates cheapest-first up to their capacity_by_deadline, which is the
/// minimum-cost deadline-feasible assignment.
inline SchedulePlan schedule_cost_opt(const PlanningProblem& p) {
  detail::require_candidates(p);
  auto lines = detail::timelines(p);
  detail::PlanBuilder b(p);
  const std::size_t nc = p.candidates.size();

  std::vector<std::size_t> order(nc);
  const double* prev_row = nullptr;
  for (std::size_t j = 0; j < p.jobs.size(); ++j) {
    const double* row = p.cost.data() + j * nc;
    if (!prev_row || !std::equal(row, row + nc, prev_row)) {
      for (std::size_t c = 0; c < nc; ++c) order[c] = c;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        return std::pair(row[a], p.candidates[a].resource) < std::pair(row[c], p.candidates[c].resource);
      });
      prev_row = row;
    }
    bool placed = false;
    for (std::size_t c : order) {
      if (!p.usable(j, c)) continue;
      const SimTime finish = lines[c].finish_if_added(p.time_of(j, c));
      if (finish <= p.deadline) {
        lines[c].add(p.time_of(j, c));
        b.assign(j, c, finish);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw Error(Errc::DeadlineInfeasible, "capacity before the deadline is exhausted at job " +
                                                std::to_string(p.jobs[j].value));
    }
  }
  SchedulePlan plan = b.finish();
  detail::check_budget(plan, p);
  return plan;
}

/// Greedy earliest completion time with no deadline or budget check: each
/// job, in id order, goes where it would finish first (ties: lower cost, then
/// lower resource id).
inline SchedulePlan greedy_earliest_completion(const PlanningProblem& p) {
  detail::require_candidates(p);
  auto lines = detail::timelines(p);
  detail::PlanBuilder b(p);
  for (std::size_t j = 0; j < p.jobs.size(); ++j) {
    std::optional<std::size_t> best;
    SimTime best_finish = kNever;
    for (std::size_t c = 0; c < p.candidates.size(); ++c) {
      if (!p.usable(j, c)) continue;
      const SimTime finish = lines[c].finish_if_added(p.time_of(j, c));
      if (!best || std::tuple(finish, p.cost_of(j, c), p.candidates[c].resource) <
                       std::tuple(best_finish, p.cost_of(j, *best), p.candidates[*best].resource)) {
        best = c;
        best_finish = finish;
      }
    }
    if (!best) throw Error(Errc::DeadlineInfeasible, "no candidate can run job " + std::to_string(p.jobs[j].value));
    lines[*best].add(p.time_of(j, *best));
    b.assign(j, *best, best_finish);
  }
  return b.finish();
}

/// Time optimisation: earliest-completion greedy, rejected if it overruns the
/// budget or the deadline.
inline SchedulePlan schedule_time_opt(const PlanningProblem& p) {
  SchedulePlan plan = greedy_earliest_completion(p);
  detail::check_budget(plan, p);
  detail::check_deadline(plan, p);
  return plan;
}

/// Cost-time optimisation: candidates are grouped by equal per-job cost and
/// groups are used cheapest first; inside a group jobs go to the earliest
/// completion. A group is left only once nothing in it can meet the deadline.
inline SchedulePlan schedule_cost_time(const PlanningProblem& p) {
  detail::require_candidates(p);
  auto lines = detail::timelines(p);
  detail::PlanBuilder b(p);
  const std::size_t nc = p.candidates.size();
  std::vector<std::size_t> order(nc);
  for (std::size_t j = 0; j < p.jobs.size(); ++j) {
    for (std::size_t c = 0; c < nc; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return p.cost_of(j, a) < p.cost_of(j, c); });

    bool placed = false;
    for (std::size_t g = 0; g < nc && !placed;) {
      std::size_t end = g;
      while (end < nc && p.cost_of(j, order[end]) == p.cost_of(j, order[g])) ++end;
      std::optional<std::size_t> best;
      SimTime best_finish = kNever;
      for (std::size_t k = g; k < end; ++k) {
        const std::size_t c = order[k];
        if (!p.usable(j, c)) continue;
        const SimTime finish = lines[c].finish_if_added(p.time_of(j, c));
        if (finish > p.deadline) continue;
        if (!best || std::pair(finish, p.candidates[c].resource) < std::pair(best_finish, p.candidates[*best].resource)) {
          best = c;
          best_finish = finish;
        }
      }
      if (best) {
        lines[*best].add(p.time_of(j, *best));
        b.assign(j, *best, best_finish);
        placed = true;
      }
      g = end;
    }
    if (!placed) {
      throw Error(Errc::DeadlineInfeasible, "capacity before the deadline is exhausted at job " +
                                                std::to_string(p.jobs[j].value));
    }
  }
  SchedulePlan plan = b.finish();
  detail::check_budget(plan, p);
  return plan;
}

inline SchedulePlan schedule(const PlanningProblem& p, Strategy s) {
  switch (s) {
    case Strategy::CostOpt: return schedule_cost_opt(p);
    case Strategy::TimeOpt: return schedule_time_opt(p);
    case Strategy::CostTime: return schedule_cost_time(p);
  }
  return schedule_cost_opt(p);
}

// Convenience overloads for sets of identical jobs.

inline SchedulePlan schedule_cost_opt(std::span<const JobId> jobs, std::vector<CandidateResource> candidates,
                                      const QoSRequest& qos, SimTime t_now) {
  return schedule_cost_opt(homogeneous_problem(jobs, std::move(candidates), qos, t_now));
}

inline SchedulePlan schedule_time_opt(std::span<const JobId> jobs, std::vector<CandidateResource> candidates,
                                      const QoSRequest& qos, SimTime t_now) {
  return schedule_time_opt(homogeneous_problem(jobs, std::move(candidates), qos, t_now));
}

inline SchedulePlan schedule_cost_time(std::span<const JobId> jobs, std::vector<CandidateResource> candidates,
                                       const QoSRequest& qos, SimTime t_now) {
  return schedule_cost_time(homogeneous_problem(jobs, std::move(candidates), qos, t_now));
}

}  // namespace gridbus::broker
