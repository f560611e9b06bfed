#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "gridbus/simulation.hpp"
#include "oracles/oracles.hpp"
#include "support/worlds.hpp"

using namespace gridbus;
using gridbus::testing::plain_job;

TEST(BrokerSession, WorkedExampleUnderCostOpt) {
  auto ex = gridbus::testing::worked_example(100.0);
  ex.sim->run();
  const auto& r = ex.session->report();
  EXPECT_EQ(r.status, SessionStatus::Completed);
  EXPECT_EQ(r.jobs_done, 4u);
  EXPECT_EQ(r.total_cost, Money::from_gd(5.0));
  EXPECT_TRUE(r.deadline_met);
  EXPECT_TRUE(r.budget_respected);
  EXPECT_EQ(r.makespan, 2.0);
  const World& w = ex.sim->world();
  EXPECT_EQ(w.bank.balance(ex.user), Money::from_gd(95.0));
  EXPECT_EQ(w.bank.balance(ex.provider), Money::from_gd(5.0));
  EXPECT_EQ(r.per_resource.at("R1").jobs, 2u);
  EXPECT_EQ(r.per_resource.at("R2").jobs, 2u);
  EXPECT_TRUE(ex.sim->check_invariants().ok());
}

TEST(BrokerSession, WorkedExampleUnderTimeOpt) {
  auto ex = gridbus::testing::worked_example(100.0, broker::Strategy::TimeOpt);
  ex.sim->run();
  const auto& r = ex.session->report();
  EXPECT_EQ(r.status, SessionStatus::Completed);
  EXPECT_EQ(r.total_cost, Money::from_gd(5.5));
  EXPECT_EQ(r.makespan, 1.5);
}

TEST(BrokerSession, InsufficientCreditAbortsBeforeDispatch) {
  auto ex = gridbus::testing::worked_example(3.0);
  ex.sim->run();
  const auto& r = ex.session->report();
  EXPECT_EQ(r.status, SessionStatus::Aborted);
  EXPECT_EQ(r.reason, "insufficient-credit");
  EXPECT_EQ(r.jobs_done, 0u);
  EXPECT_TRUE(ex.sim->world().bank.ledger().empty());
  for (const auto& j : ex.sim->world().jobs) EXPECT_FALSE(j.assigned_resource.has_value());
}

TEST(BrokerSession, NoCandidatesFailsEveryJob) {
  Simulation sim;
  World& w = sim.world();
  const SiteId home = w.grid.add_site("home", 0);
  const auto user = w.bank.open_account("user", 10.0);
  SessionConfig cfg;
  cfg.name = "lonely";
  cfg.qos = {100, 10, broker::Strategy::CostOpt, user, home, "app"};
  cfg.jobs = {plain_job(0, 10), plain_job(1, 10)};
  auto& s = sim.add_session(std::move(cfg));
  sim.run();
  EXPECT_EQ(s.report().status, SessionStatus::Incomplete);
  EXPECT_EQ(s.report().jobs_failed, 2u);
  EXPECT_EQ(s.report().failures.at("no-candidates"), 2u);
}

TEST(BrokerSession, InfeasiblePlanFailsWithTheReason) {
  Simulation sim;
  World& w = sim.world();
  const SiteId home = w.grid.add_site("home", 0);
  const auto user = w.bank.open_account("user", 100.0);
  const auto prov = w.bank.open_account("prov", 0.0);
  grid::GridResource r;
  r.name = "R";
  r.site = home;
  r.pe_rating_mips = 100;
  r.base_price = 1.0;
  r.provider_account = prov;
  r.apps = {"app"};
  w.add_resource(r);
  SessionConfig cfg;
  cfg.name = "tight";
  cfg.qos = {100, 1.5, broker::Strategy::CostOpt, user, home, "app"};
  cfg.jobs = {plain_job(0, 100), plain_job(1, 100)};
  auto& s = sim.add_session(std::move(cfg));
  sim.run();
  EXPECT_EQ(s.report().failures.at("budget-infeasible"), 2u);
  EXPECT_EQ(s.report().total_cost, Money{});
}

TEST(BrokerSession, DirectoryLatencyDelaysThePlan) {
  auto ex = gridbus::testing::worked_example(100.0);
  ex.sim->world().gmd.set_latency(3.0);
  ex.sim->run();
  const auto& r = ex.session->report();
  // Deadline 2.5 is gone by the time the directory answers.
  EXPECT_EQ(r.jobs_done, 0u);
  EXPECT_EQ(r.failures.at("deadline-infeasible"), 4u);
}

TEST(BrokerSession, StagingTimesAddUp) {
  Simulation sim;
  World& w = sim.world();
  const SiteId home = w.grid.add_site("home", 0);
  const SiteId far = w.grid.add_site("far", 0);
  const auto user = w.bank.open_account("user", 100.0);
  const auto prov = w.bank.open_account("prov", 0.0);
  w.data.add_link({home, far, 2.0, 0.5});
  w.data.add_file({"in", 4.0, {home}});
  grid::GridResource r;
  r.name = "R";
  r.site = far;
  r.pe_rating_mips = 10;
  r.base_price = 1.0;
  r.provider_account = prov;
  r.apps = {"app"};
  const ResourceId rid = w.add_resource(r);
  SessionConfig cfg;
  cfg.name = "staged";
  cfg.qos = {100, 100, broker::Strategy::CostOpt, user, home, "app"};
  cfg.jobs = {plain_job(0, 50, {{"in", 4.0}}, 1.0)};
  auto& s = sim.add_session(std::move(cfg));
  sim.run();
  const auto& j = w.jobs.at(s.jobs()[0].index());
  ASSERT_EQ(j.status, grid::JobStatus::Done);
  EXPECT_EQ(j.assigned_resource, rid);
  EXPECT_EQ(*j.start_time, 2.0);        // 4 MB over 2 MB/s
  EXPECT_EQ(*j.finish_time, 7.0);       // 5 s of compute
  EXPECT_EQ(*j.completion_time, 7.5);   // 1 MB back home
  EXPECT_EQ(j.compute_cost, Money::from_gd(5.0));
  EXPECT_EQ(j.data_cost, Money::from_gd(2.5));
  const auto& tx = w.bank.ledger().at(0);
  EXPECT_EQ(tx.record.pe_seconds, 5.0);
  EXPECT_EQ(tx.record.data_mb, 5.0);
  EXPECT_EQ(tx.amount, Money::from_gd(7.5));
  EXPECT_EQ(s.report().makespan, 7.5);
}

TEST(BrokerSession, OneUsageRecordPerDoneJob) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    for (auto strategy : {broker::Strategy::CostOpt, broker::Strategy::TimeOpt, broker::Strategy::CostTime}) {
      auto rw = gridbus::testing::random_world(seed, strategy);
      rw.sim->run();
      const World& w = rw.sim->world();
      std::map<JobId, int> records;
      for (const auto& tx : w.bank.ledger()) ++records[tx.record.job];
      for (const auto& j : w.jobs) {
        const int expected = j.status == grid::JobStatus::Done ? 1 : 0;
        ASSERT_EQ(records[j.id], expected) << "seed " << seed << " job " << j.id.value;
        ASSERT_TRUE(grid::is_terminal(j.status)) << "seed " << seed;
      }
      ASSERT_TRUE(rw.sim->check_invariants().ok()) << "seed " << seed;
    }
  }
}

TEST(BrokerSession, NeverRunsMoreJobsThanPes) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    auto rw = gridbus::testing::random_world(seed, broker::Strategy::TimeOpt);
    World& w = rw.sim->world();
    std::map<ResourceId, int> live;
    bool ok = true;
    w.kernel.set_observer([&](const Event& ev) {
      const auto kind = ev.payload.kind;
      if (kind == MsgKind::JobStage && ++live[ev.payload.resource] > w.grid.resource(ev.payload.resource).n_pe) ok = false;
      if (kind == MsgKind::JobDone) --live[ev.payload.resource];
    });
    rw.sim->run();
    ASSERT_TRUE(ok) << "seed " << seed;
  }
}

TEST(BrokerSession, LedgerReplaysToLiveBalances) {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    auto rw = gridbus::testing::random_world(seed, broker::Strategy::CostTime);
    rw.sim->run();
    const World& w = rw.sim->world();
    const auto replayed = oracles::replay_ledger(oracles::opening_balances(w.bank), w.bank.ledger());
    for (const auto& a : w.bank.accounts()) ASSERT_EQ(replayed.at(a.id), a.balance) << "seed " << seed;
    const auto& report = rw.sim->sessions()[0]->report();
    ASSERT_EQ(gridbus::testing::ledger_debits(w, rw.consumer), report.total_cost);
    ASSERT_LE(report.total_cost, report.budget);
  }
}

// Cluster sessions ---------------------------------------------------------------

namespace {

struct ClusterWorld {
  Simulation sim;
  AccountId user;
  Session* session = nullptr;
};

std::unique_ptr<ClusterWorld> cluster_world(double balance, double deadline, double budget, std::size_t n_jobs,
                                            double length) {
  auto cw = std::make_unique<ClusterWorld>();
  World& w = cw->sim.world();
  const SiteId site = w.grid.add_site("lab", 0);
  cw->user = w.bank.open_account("user", balance);
  const auto prov = w.bank.open_account("lab-admin", 0.0);
  libra::ClusterConfig cc;
  cc.name = "farm";
  cc.site = site;
  cc.provider = prov;
  cc.node_ratings = {100, 100};
  const auto idx = cw->sim.add_cluster(cc);
  SessionConfig cfg;
  cfg.name = "batch";
  cfg.qos = {deadline, budget, broker::Strategy::CostOpt, cw->user, site, ""};
  cfg.cluster = idx;
  cfg.arrival_gap = 1.0;
  for (std::size_t i = 0; i < n_jobs; ++i) cfg.jobs.push_back(plain_job(i, length));
  cw->session = &cw->sim.add_session(std::move(cfg));
  return cw;
}

}  // namespace

TEST(ClusterSession, AdmittedJobsMeetTheirDeadlines) {
  auto cw = cluster_world(10000, 100, 4000, 6, 1000);
  cw->sim.run();
  const auto& r = cw->session->report();
  EXPECT_EQ(r.status, SessionStatus::Completed);
  EXPECT_EQ(r.jobs_done, 6u);
  EXPECT_TRUE(r.deadline_met);
  for (const auto& j : cw->sim.world().jobs) {
    EXPECT_LE(*j.finish_time, 100.0);
    EXPECT_EQ(j.resource_label.rfind("farm/node", 0), 0u);
  }
  // price = 0.01 * 1000 + 1000 / (100 - submit) for each job
  Money expected;
  for (int k = 0; k < 6; ++k) expected += Money::from_gd(10.0 + 1000.0 / (100.0 - k));
  EXPECT_EQ(r.total_cost, expected);
  EXPECT_TRUE(cw->sim.check_invariants().ok());
}

TEST(ClusterSession, OverloadIsRejectedNotLate) {
  auto cw = cluster_world(1e6, 20, 1e5, 10, 1000);
  cw->sim.run();
  const auto& r = cw->session->report();
  EXPECT_EQ(r.status, SessionStatus::Incomplete);
  EXPECT_GT(r.failures.at("deadline-infeasible"), 0u);
  for (const auto& j : cw->sim.world().jobs) {
    if (j.status == grid::JobStatus::Done) {
      EXPECT_LE(*j.finish_time, 20.0);
    }
  }
}

TEST(ClusterSession, BudgetGatesAdmission) {
  auto cw = cluster_world(1e6, 100, 6 * 15.0, 6, 1000);  // 15 G$ per job, price is over 20
  cw->sim.run();
  EXPECT_EQ(cw->session->report().failures.at("budget-insufficient"), 6u);
  EXPECT_TRUE(cw->sim.world().bank.ledger().empty());
}

TEST(ClusterSession, CreditCheckAborts) {
  auto cw = cluster_world(10, 100, 4000, 3, 1000);
  cw->sim.run();
  EXPECT_EQ(cw->session->report().status, SessionStatus::Aborted);
  EXPECT_EQ(cw->session->report().reason, "insufficient-credit");
}
