#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridbus/libra/libra.hpp"
#include "gridbus/session.hpp"
#include "gridbus/world.hpp"

namespace gridbus::libra {

struct ClusterConfig {
  std::string name;
  SiteId site;
  AccountId provider;
  PricingParams pricing;
  std::vector<double> node_ratings;
};

/// Simulation entity wrapping a Cluster. Submissions arrive as LibraSubmit
/// messages; completions go back to the submitting entity as JobComplete.
class ClusterEntity {
 public:
  ClusterEntity(World& w, ClusterConfig cfg) : w_(w), cfg_(std::move(cfg)), cluster_(cfg_.node_ratings, cfg_.pricing) {
    w_.bank.account(cfg_.provider);
    entity_ = w_.kernel.add_entity(cfg_.name, [this](const Event& ev) { on_event(ev); });
  }

  ClusterEntity(const ClusterEntity&) = delete;
  ClusterEntity& operator=(const ClusterEntity&) = delete;

  EntityId entity() const { return entity_; }
  const ClusterConfig& config() const { return cfg_; }
  const Cluster& cluster() const { return cluster_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }
  std::size_t node_of(JobId id) const { return node_of_.at(id); }

  std::string node_label(std::size_t node) const { return cfg_.name + "/node" + std::to_string(node); }

 private:
  void on_event(const Event& ev) {
    const SimTime now = w_.kernel.now();
    deliver(cluster_.advance_to(now));
    if (ev.payload.kind == MsgKind::LibraSubmit) submit(ev.payload.job, now);
    if (ev.payload.kind == MsgKind::LibraCheck && ev.payload.token != check_token_) return;
    arm_check();
  }

  void submit(JobId id, SimTime now) {
    auto& job = w_.job(id);
    const auto& meta = w_.meta(id);
    job.submit_time = now;
    LibraJob lj;
    lj.job = id;
    lj.length_mi = job.length_mi;
    lj.submit = now;
    lj.deadline = meta.deadline;
    lj.budget = meta.budget;

    bool credit_ok = true;
    if (meta.deadline > now) {
      const Money price = Money::from_gd(job_price(job.length_mi, now, meta.deadline, cluster_.pricing()));
      credit_ok = w_.available_credit(meta.consumer) >= price;
    }
    const Admission a = cluster_.admit(lj, now, credit_ok);
    Message reply;
    reply.job = id;
    if (!a.accepted) {
      ++rejected_;
      reply.kind = MsgKind::JobRejected;
      reply.value = a.reason == Rejection::DeadlineInfeasible ? 0.0 : 1.0;
      w_.kernel.schedule_at(now, meta.owner, reply);
      return;
    }
    ++accepted_;
    const Money price = Money::from_gd(a.price);
    w_.committed[meta.consumer] += price;
    grid::transition(job, grid::JobStatus::Dispatched);
    grid::transition(job, grid::JobStatus::Transferring);
    grid::transition(job, grid::JobStatus::Running);
    job.start_time = now;
    job.resource_label = node_label(a.node);
    job.compute_cost = price;
    node_of_[id] = a.node;
  }

  void deliver(const std::vector<Completion>& done) {
    for (const auto& c : done) {
      auto& job = w_.job(c.job);
      job.finish_time = c.time;
      job.completion_time = c.time;
      Message m;
      m.kind = MsgKind::JobComplete;
      m.job = c.job;
      m.value = c.price;
      w_.kernel.schedule_at(w_.kernel.now(), w_.meta(c.job).owner, m);
    }
  }

  void arm_check() {
    const SimTime next = cluster_.next_completion();
    if (next == kNever) return;
    Message m;
    m.kind = MsgKind::LibraCheck;
    m.token = ++check_token_;
    w_.kernel.schedule_at(std::max(next, w_.kernel.now()), entity_, m);
  }

  World& w_;
  ClusterConfig cfg_;
  Cluster cluster_;
  EntityId entity_;
  std::uint64_t check_token_ = 0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::unordered_map<JobId, std::size_t> node_of_;
};

/// A user submitting its jobs one by one to a cluster with deadline and
/// per-job budget, paying each job's price on completion.
class ClusterSession final : public Session {
 public:
  ClusterSession(World& w, std::size_t index, SessionConfig cfg, ClusterEntity& cluster)
      : w_(w), cfg_(std::move(cfg)), cluster_(cluster) {
    entity_ = w_.kernel.add_entity(cfg_.name, [this](const Event& ev) { on_event(ev); });
    jobs_ = gridbus::detail::create_jobs(w_, cfg_, index, entity_);
    report_.name = cfg_.name;
    report_.mode = "cluster";
    report_.start = cfg_.start;
    report_.deadline = cfg_.qos.deadline;
    report_.budget = Money::from_gd(cfg_.qos.budget);
    report_.jobs_total = jobs_.size();
    w_.kernel.schedule_at(cfg_.start, entity_, Message::of(MsgKind::SessionStart));
  }

  const SessionReport& report() const override { return report_; }
  EntityId entity() const override { return entity_; }
  const std::vector<JobId>& jobs() const override { return jobs_; }
  const SessionConfig& config() const override { return cfg_; }

 private:
  void on_event(const Event& ev) {
    if (finished()) return;
    switch (ev.payload.kind) {
      case MsgKind::SessionStart: start(); break;
      case MsgKind::JobComplete: on_complete(ev.payload.job); break;
      case MsgKind::JobRejected:
        grid::fail(w_.job(ev.payload.job), ev.payload.value == 0.0 ? "deadline-infeasible" : "budget-insufficient");
        break;
      default: break;
    }
    if (!finished() && gridbus::detail::all_terminal(w_, jobs_)) finish();
  }

  void start() {
    for (JobId id : jobs_) grid::transition(w_.job(id), grid::JobStatus::Queued);
    if (!w_.bank.check_credit(cfg_.qos.consumer, report_.budget)) {
      report_.status = SessionStatus::Aborted;
      report_.reason = std::string(to_string(Errc::InsufficientCredit));
      gridbus::detail::fail_remaining(w_, jobs_, report_.reason);
      finish();
      return;
    }
    for (std::size_t k = 0; k < jobs_.size(); ++k) {
      Message m;
      m.kind = MsgKind::LibraSubmit;
      m.job = jobs_[k];
      w_.kernel.schedule_in(cfg_.arrival_gap * static_cast<double>(k), cluster_.entity(), m);
    }
  }

  void on_complete(JobId id) {
    auto& job = w_.job(id);
    const Money amount = job.compute_cost;
    const std::size_t node = cluster_.node_of(id);
    bank::UsageRecord rec;
    rec.consumer = cfg_.qos.consumer;
    rec.provider = cluster_.config().provider;
    rec.resource = job.resource_label;
    rec.job = id;
    rec.pe_seconds = job.length_mi / cluster_.cluster().nodes().at(node).rating();
    rec.data_mb = 0.0;
    rec.amount = amount;
    rec.time = w_.kernel.now();
    w_.bank.charge(rec);
    w_.committed[cfg_.qos.consumer] -= amount;
    charged_ += amount;
    job.cost_incurred = amount;
    grid::transition(job, grid::JobStatus::Done);
  }

  void finish() { gridbus::detail::finalize(report_, w_, jobs_, charged_); }

  World& w_;
  SessionConfig cfg_;
  ClusterEntity& cluster_;
  EntityId entity_;
  std::vector<JobId> jobs_;
  SessionReport report_;
  Money charged_;
};

}  // namespace gridbus::libra
