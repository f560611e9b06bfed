#pragma once

#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridbus/broker/discovery.hpp"
#include "gridbus/broker/planning.hpp"
#include "gridbus/session.hpp"
#include "gridbus/world.hpp"

namespace gridbus::broker {

/// A user's broker: discovers priced resources, plans the job set under the
/// deadline and budget, and dispatches jobs while metering what they cost.
///
/// Jobs wait in per-resource queues and at most n_pe of them are in flight on
/// a resource. Every dispatch is checked against the remaining budget and the
/// consumer's uncommitted credit using the price at its actual compute start.
class BrokerSession final : public Session {
 public:
  BrokerSession(World& w, std::size_t index, SessionConfig cfg) : w_(w), cfg_(std::move(cfg)) {
    entity_ = w_.kernel.add_entity(cfg_.name, [this](const Event& ev) { on_event(ev); });
    jobs_ = gridbus::detail::create_jobs(w_, cfg_, index, entity_);
    report_.name = cfg_.name;
    report_.mode = "broker";
    report_.strategy = std::string(to_string(cfg_.qos.strategy));
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

  const std::vector<CandidateResource>& candidates() const { return cands_; }
  const std::optional<SchedulePlan>& initial_plan() const { return initial_plan_; }
  Money charged() const { return charged_; }
  Money committed() const { return committed_; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void on_event(const Event& ev) {
    if (finished()) return;
    switch (ev.payload.kind) {
      case MsgKind::SessionStart: start(); break;
      case MsgKind::GmdReply: on_discovery(ev.payload.token); break;
      case MsgKind::Replan: on_replan(); break;
      case MsgKind::JobComplete: on_complete(ev.payload.job); break;
      default: break;
    }
  }

  void start() {
    const SimTime now = w_.kernel.now();
    for (JobId id : jobs_) {
      auto& j = w_.job(id);
      grid::transition(j, grid::JobStatus::Queued);
      j.submit_time = now;
    }
    if (!w_.bank.check_credit(cfg_.qos.consumer, report_.budget)) {
      report_.status = SessionStatus::Aborted;
      report_.reason = std::string(to_string(Errc::InsufficientCredit));
      gridbus::detail::fail_remaining(w_, jobs_, report_.reason);
      finish();
      return;
    }
    if (jobs_.empty()) {
      finish();
      return;
    }
    w_.request_discovery("compute", entity_);
  }

  void on_discovery(std::uint64_t token) {
    const CodeStaging code{cfg_.stage_code, cfg_.code_mb};
    const SimTime now = w_.kernel.now();
    try {
      cands_ = discover(w_.gmd_requests.at(token).result, w_.grid, w_.data, cfg_.qos, w_.job(jobs_.front()), now, code);
    } catch (const Error& e) {
      gridbus::detail::fail_remaining(w_, jobs_, std::string(to_string(e.code())));
      finish();
      return;
    }
    const std::size_t nc = cands_.size();
    est_.assign(jobs_.size() * nc, PairEstimate{});
    for (std::size_t l = 0; l < jobs_.size(); ++l) {
      const auto& job = w_.jobs[jobs_[l].index()];
      for (std::size_t c = 0; c < nc; ++c) {
        est_[l * nc + c] = estimate_pair(w_.grid, w_.data, job, cands_[c].resource, cfg_.qos, code);
      }
    }
    for (std::size_t c = 0; c < nc; ++c) cand_of_[cands_[c].resource] = c;
    queue_.assign(cands_.size(), {});
    in_flight_.assign(cands_.size(), 0);
    placed_on_.assign(jobs_.size(), kNone);

    try {
      SchedulePlan plan = schedule(problem(now), cfg_.qos.strategy);
      apply(plan);
      initial_plan_ = std::move(plan);
    } catch (const Error& e) {
      gridbus::detail::fail_remaining(w_, jobs_, std::string(to_string(e.code())));
      finish();
      return;
    }
    dispatch_all();
    after_round();
  }

  void on_replan() {
    const SimTime now = w_.kernel.now();
    if (queued_count() == 0) return;
    try {
      SchedulePlan plan = schedule(problem(now), cfg_.qos.strategy);
      apply(plan);
      ++report_.replans;
    } catch (const Error&) {
      // No feasible plan from here on: keep working through the current one.
    }
    dispatch_all();
    after_round();
  }

  void after_round() {
    if (gridbus::detail::all_terminal(w_, jobs_)) {
      finish();
      return;
    }
    if (queued_count() > 0 && cfg_.reschedule_interval > 0.0) {
      w_.kernel.schedule_in(cfg_.reschedule_interval, entity_, Message::of(MsgKind::Replan));
    }
  }

  /// Cost/time matrix for the jobs that are still waiting, priced now.
  PlanningProblem problem(SimTime now) const {
    PlanningProblem p;
    p.t_now = now;
    p.deadline = cfg_.qos.deadline;
    p.budget = remaining_budget().gd();
    const std::size_t nc = cands_.size();
    std::vector<std::size_t> waiting;
    for (std::size_t l = 0; l < jobs_.size(); ++l) {
      if (w_.jobs[jobs_[l].index()].status == grid::JobStatus::Queued) waiting.push_back(l);
    }
    std::vector<double> price(nc);
    for (std::size_t c = 0; c < nc; ++c) price[c] = w_.grid.price_at(cands_[c].resource, now);
    p.candidates = cands_;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto nf = w_.grid.state(cands_[c].resource).next_free();
      p.candidates[c].pe_free.assign(nf.begin(), nf.end());
      if (!waiting.empty()) {
        const auto& ref = est(waiting.front(), c);
        if (ref.usable) {
          p.candidates[c].per_job_cost = ref.runtime * price[c] + ref.data_cost;
          p.candidates[c].capacity_by_deadline =
              capacity_by_deadline(p.candidates[c].pe_free, now, ref.occupancy(), p.deadline);
        }
      }
    }
    p.jobs.reserve(waiting.size());
    p.cost.reserve(waiting.size() * nc);
    p.time.reserve(waiting.size() * nc);
    for (std::size_t l : waiting) {
      p.jobs.push_back(jobs_[l]);
      for (std::size_t c = 0; c < nc; ++c) {
        const auto& e = est(l, c);
        p.cost.push_back(e.usable ? e.runtime * price[c] + e.data_cost : std::numeric_limits<double>::infinity());
        p.time.push_back(e.usable ? e.occupancy() : kNever);
      }
    }
    return p;
  }

  void apply(const SchedulePlan& plan) {
    for (auto& q : queue_) q.clear();
    for (const auto& [job, rid] : plan.assignment) queue_[cand_of_.at(rid)].push_back(local(job));
  }

  void dispatch_all() {
    for (std::size_t c = 0; c < cands_.size(); ++c) dispatch(c);
  }

  void dispatch(std::size_t c) {
    const ResourceId rid = cands_[c].resource;
    const auto& res = w_.grid.resource(rid);
    auto& state = w_.grid.state(rid);
    const SimTime now = w_.kernel.now();
    while (in_flight_[c] < static_cast<std::size_t>(res.n_pe) && !queue_[c].empty()) {
      const std::size_t l = queue_[c].front();
      queue_[c].pop_front();
      auto& job = w_.job(jobs_[l]);
      if (job.status != grid::JobStatus::Queued) continue;
      const PairEstimate& e = est(l, c);

      const grid::Slot preview = state.preview(now, e.occupancy());
      const SimTime compute_start = preview.start + e.input_time;
      const Money compute = Money::from_gd(e.runtime * w_.grid.price_at(rid, compute_start));
      const Money data = Money::from_gd(e.data_cost);
      const Money amount = compute + data;
      if (amount > remaining_budget() || amount > w_.available_credit(cfg_.qos.consumer)) {
        grid::fail(job, "budget-exhausted");
        continue;
      }

      const grid::Slot slot = state.submit(now, e.occupancy());
      committed_ += amount;
      w_.committed[cfg_.qos.consumer] += amount;
      grid::transition(job, grid::JobStatus::Dispatched);
      job.assigned_resource = rid;
      job.resource_label = res.name;
      job.start_time = compute_start;
      job.finish_time = compute_start + e.runtime;
      job.completion_time = slot.end;
      job.compute_cost = compute;
      job.data_cost = data;
      placed_on_[l] = c;
      ++in_flight_[c];

      const EntityId target = w_.resource_entities.at(rid.index());
      Message m;
      m.job = job.id;
      m.resource = rid;
      m.kind = MsgKind::JobStage;
      m.value = e.data_mb;
      w_.kernel.schedule_at(slot.start, target, m);
      m.kind = MsgKind::JobRun;
      m.value = e.runtime;
      w_.kernel.schedule_at(compute_start, target, m);
      m.kind = MsgKind::JobDone;
      m.value = amount.gd();
      w_.kernel.schedule_at(slot.end, target, m);
    }
  }

  void on_complete(JobId id) {
    const std::size_t l = local(id);
    const std::size_t c = placed_on_.at(l);
    auto& job = w_.job(id);
    const auto& res = w_.grid.resource(cands_[c].resource);
    const PairEstimate& e = est(l, c);
    const Money amount = job.compute_cost + job.data_cost;

    bank::UsageRecord rec;
    rec.consumer = cfg_.qos.consumer;
    rec.provider = res.provider_account;
    rec.resource = res.name;
    rec.job = id;
    rec.pe_seconds = e.runtime;
    rec.data_mb = e.data_mb;
    rec.amount = amount;
    rec.time = w_.kernel.now();
    w_.bank.charge(rec);

    committed_ -= amount;
    w_.committed[cfg_.qos.consumer] -= amount;
    charged_ += amount;
    job.cost_incurred = amount;
    grid::transition(job, grid::JobStatus::Done);
    --in_flight_[c];
    dispatch(c);
    if (gridbus::detail::all_terminal(w_, jobs_)) finish();
  }

  void finish() { gridbus::detail::finalize(report_, w_, jobs_, charged_); }

  Money remaining_budget() const { return report_.budget - charged_ - committed_; }

  std::size_t queued_count() const {
    std::size_t n = 0;
    for (JobId id : jobs_) n += w_.jobs[id.index()].status == grid::JobStatus::Queued;
    return n;
  }

  std::size_t local(JobId id) const { return id.index() - jobs_.front().index(); }
  const PairEstimate& est(std::size_t l, std::size_t c) const { return est_[l * cands_.size() + c]; }

  World& w_;
  SessionConfig cfg_;
  EntityId entity_;
  std::vector<JobId> jobs_;
  SessionReport report_;

  std::vector<CandidateResource> cands_;
  std::unordered_map<ResourceId, std::size_t> cand_of_;
  std::vector<PairEstimate> est_;
  std::vector<std::deque<std::size_t>> queue_;
  std::vector<std::size_t> in_flight_;
  std::vector<std::size_t> placed_on_;
  std::optional<SchedulePlan> initial_plan_;

  Money charged_;
  Money committed_;
};

}  // namespace gridbus::broker
