#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gridbus/broker/session.hpp"
#include "gridbus/libra/session.hpp"
#include "gridbus/session.hpp"
#include "gridbus/world.hpp"

namespace gridbus {

struct InvariantReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// A world plus the clusters and sessions living in it.
class Simulation {
 public:
  explicit Simulation(std::uint64_t seed = 0) : world_(std::make_unique<World>(seed)) {}

  World& world() { return *world_; }
  const World& world() const { return *world_; }

  std::size_t add_cluster(libra::ClusterConfig cfg) {
    clusters_.push_back(std::make_unique<libra::ClusterEntity>(*world_, std::move(cfg)));
    return clusters_.size() - 1;
  }

  Session& add_session(SessionConfig cfg) {
    const std::size_t index = sessions_.size();
    if (cfg.cluster) {
      auto& cluster = *clusters_.at(*cfg.cluster);
      sessions_.push_back(std::make_unique<libra::ClusterSession>(*world_, index, std::move(cfg), cluster));
    } else {
      sessions_.push_back(std::make_unique<broker::BrokerSession>(*world_, index, std::move(cfg)));
    }
    return *sessions_.back();
  }

  sim::RunStats run(SimTime limit = kNever) { return world_->kernel.run_until(limit); }

  const std::vector<std::unique_ptr<Session>>& sessions() const { return sessions_; }
  const std::vector<std::unique_ptr<libra::ClusterEntity>>& clusters() const { return clusters_; }

  bool all_sessions_completed() const {
    for (const auto& s : sessions_)
      if (s->report().status != SessionStatus::Completed) return false;
    return true;
  }

  /// Checks the properties every run must keep, whatever the workload.
  InvariantReport check_invariants() const {
    InvariantReport out;
    const World& w = *world_;
    if (w.bank.total_balance() != w.bank.total_initial()) {
      out.violations.push_back("credit not conserved");
    }
    for (const auto& a : w.bank.accounts()) {
      if (a.balance < Money{}) out.violations.push_back("negative balance for " + a.owner);
      if (w.bank.statement(a.id).closing != a.balance) out.violations.push_back("statement mismatch for " + a.owner);
    }
    for (const auto& s : sessions_) {
      const auto& r = s->report();
      if (r.total_cost > r.budget) out.violations.push_back("session " + r.name + " overspent its budget");
    }
    for (const auto& j : w.jobs) {
      if (j.status != grid::JobStatus::Done) continue;
      if (!j.start_time || !j.finish_time || !j.submit_time) {
        out.violations.push_back("job " + std::to_string(j.id.value) + " is done without timestamps");
        continue;
      }
      if (*j.start_time < *j.submit_time || *j.finish_time < *j.start_time) {
        out.violations.push_back("job " + std::to_string(j.id.value) + " has out-of-order timestamps");
      }
      if (j.assigned_resource) {
        const auto& r = w.grid.resource(*j.assigned_resource);
        if (*j.finish_time != *j.start_time + grid::job_runtime(j.length_mi, r.pe_rating_mips)) {
          out.violations.push_back("job " + std::to_string(j.id.value) + " ran for the wrong time");
        }
      }
    }
    return out;
  }

 private:
  std::unique_ptr<World> world_;
  std::vector<std::unique_ptr<libra::ClusterEntity>> clusters_;
  std::vector<std::unique_ptr<Session>> sessions_;
};

}  // namespace gridbus
