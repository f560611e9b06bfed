#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "gridbus/broker/planning.hpp"
#include "gridbus/data/data_grid.hpp"
#include "gridbus/grid/grid.hpp"
#include "gridbus/market/directory.hpp"

namespace gridbus::broker {

/// Replica choice that matches the scheduling objective.
constexpr data::Objective replica_objective(Strategy s) {
  return s == Strategy::CostOpt ? data::Objective::MinCost : data::Objective::MinTime;
}

struct CodeStaging {
  bool enabled = false;
  double code_mb = 0.0;
};

/// Time-independent figures for running one job on one resource. Compute cost
/// is left out because it depends on when the job starts.
struct PairEstimate {
  bool usable = false;
  SimTime input_time = 0.0;   // inputs plus application code
  SimTime runtime = 0.0;
  SimTime output_time = 0.0;
  double data_cost = 0.0;
  double data_mb = 0.0;       // megabytes moved between sites

  SimTime occupancy() const { return input_time + runtime + output_time; }
};

inline PairEstimate estimate_pair(const grid::Grid& g, const data::DataGrid& dg, const grid::Job& job, ResourceId rid,
                                  const QoSRequest& qos, CodeStaging code) {
  PairEstimate e;
  const auto& r = g.resource(rid);
  const SiteId site = r.site;
  try {
    const auto in = dg.data_overhead(job.input_files, site, replica_objective(qos.strategy));
    e.input_time = in.transfer_time;
    e.data_cost = in.transfer_cost;
    e.data_mb = in.data_mb;
  } catch (const Error&) {
    return e;
  }
  if (job.output_mb > 0.0) {
    auto back = dg.route(site, qos.home_site);
    if (!back) return e;
    e.output_time = data::transfer_time(job.output_mb, *back);
    e.data_cost += data::transfer_cost(job.output_mb, *back);
    if (site != qos.home_site) e.data_mb += job.output_mb;
  }
  if (code.enabled && code.code_mb > 0.0 && !r.apps.contains(qos.app)) {
    auto there = dg.route(qos.home_site, site);
    if (!there) return e;
    e.input_time += data::transfer_time(code.code_mb, *there);
    e.data_cost += data::transfer_cost(code.code_mb, *there);
    if (site != qos.home_site) e.data_mb += code.code_mb;
  }
  e.runtime = grid::job_runtime(job.length_mi, r.pe_rating_mips);
  e.usable = true;
  return e;
}

/// Directory entries the broker may use: those offering the application, or
/// any compute entry when the code can be shipped.
inline std::vector<market::ServiceEntry> eligible_entries(const std::vector<market::ServiceEntry>& found,
                                                          const QoSRequest& qos, CodeStaging code) {
  std::vector<market::ServiceEntry> out;
  for (const auto& e : found) {
    if (e.service_type != "compute") continue;
    if (qos.app.empty() || e.apps.contains(qos.app) || code.enabled) out.push_back(e);
  }
  return out;
}

/// Per-job figures of a candidate for a reference job, priced at t_now.
inline CandidateResource make_candidate(const grid::Grid& g, const market::ServiceEntry& entry, const PairEstimate& ref,
                                        SimTime t_now, SimTime deadline) {
  CandidateResource c;
  c.entry = entry;
  c.resource = entry.resource;
  const auto next_free = g.state(entry.resource).next_free();
  c.pe_free.assign(next_free.begin(), next_free.end());
  if (ref.usable) {
    c.per_job_cost = ref.runtime * g.price_at(entry.resource, t_now) + ref.data_cost;
    c.per_job_time = ref.occupancy();
    c.capacity_by_deadline = capacity_by_deadline(c.pe_free, t_now, c.per_job_time, deadline);
  } else {
    c.per_job_cost = std::numeric_limits<double>::infinity();
    c.per_job_time = kNever;
  }
  return c;
}

/// Candidates for a job set from a directory answer, cheapest per-job cost
/// first (ties by resource id). `reference` prices the per-job figures.
inline std::vector<CandidateResource> discover(const std::vector<market::ServiceEntry>& found, const grid::Grid& g,
                                               const data::DataGrid& dg, const QoSRequest& qos,
                                               const grid::Job& reference, SimTime t_now, CodeStaging code = {}) {
  std::vector<CandidateResource> out;
  for (const auto& e : eligible_entries(found, qos, code)) {
    out.push_back(make_candidate(g, e, estimate_pair(g, dg, reference, e.resource, qos, code), t_now, qos.deadline));
  }
  if (out.empty()) throw Error(Errc::NoCandidates, "no resource offers '" + qos.app + "'");
  std::stable_sort(out.begin(), out.end(), [](const CandidateResource& a, const CandidateResource& b) {
    return std::pair(a.per_job_cost, a.resource) < std::pair(b.per_job_cost, b.resource);
  });
  return out;
}

}  // namespace gridbus::broker
