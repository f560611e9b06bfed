#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "gridbus/bank/grid_bank.hpp"
#include "gridbus/core/rng.hpp"
#include "gridbus/data/data_grid.hpp"
#include "gridbus/market/directory.hpp"
#include "oracles/oracles.hpp"

using namespace gridbus;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ReplayError;
}

}  // namespace

// Data grid ------------------------------------------------------------------

TEST(Transfer, TimeAndCostOfALink) {
  const data::NetworkLink l{SiteId(0u), SiteId(1u), 10.0, 0.5};
  EXPECT_EQ(data::transfer_time(100, l), 10.0);
  EXPECT_EQ(data::transfer_cost(100, l), 50.0);
  EXPECT_EQ(data::transfer_time(0, l), 0.0);
}

TEST(Transfer, SameSiteIsFree) {
  data::DataGrid dg;
  EXPECT_EQ(dg.transfer_time(500, SiteId(2u), SiteId(2u)), 0.0);
  EXPECT_EQ(dg.transfer_cost(500, SiteId(2u), SiteId(2u)), 0.0);
}

TEST(Transfer, UnlinkedSitesHaveNoRoute) {
  data::DataGrid dg;
  EXPECT_EQ(code_of([&] { dg.transfer_time(1, SiteId(0u), SiteId(1u)); }), Errc::NoRoute);
}

TEST(Links, AreUndirectedAndUnique) {
  data::DataGrid dg;
  dg.add_link({SiteId(0u), SiteId(1u), 5, 1});
  EXPECT_TRUE(dg.has_link(SiteId(1u), SiteId(0u)));
  EXPECT_EQ(code_of([&] { dg.add_link({SiteId(1u), SiteId(0u), 3, 1}); }), Errc::DuplicateLink);
  EXPECT_THROW(dg.add_link({SiteId(2u), SiteId(2u), 3, 1}), Error);
  EXPECT_THROW(dg.add_link({SiteId(2u), SiteId(3u), 0, 1}), Error);
}

TEST(BestReplica, ObjectiveDecides) {
  // Two replicas of a 30 MB file: A is slow and cheap, B is fast and dear.
  const SiteId a(0u), b(1u), dest(2u);
  data::DataGrid dg;
  dg.add_link({a, dest, 1.0, 0.1});
  dg.add_link({b, dest, 10.0, 0.2});
  dg.add_file({"f", 30.0, {a, b}});

  const auto fast = dg.best_replica("f", dest, data::Objective::MinTime);
  EXPECT_EQ(fast.source_site, b);
  EXPECT_DOUBLE_EQ(fast.transfer_time, 3.0);
  EXPECT_DOUBLE_EQ(fast.transfer_cost, 6.0);

  const auto cheap = dg.best_replica("f", dest, data::Objective::MinCost);
  EXPECT_EQ(cheap.source_site, a);
  EXPECT_DOUBLE_EQ(cheap.transfer_time, 30.0);
  EXPECT_DOUBLE_EQ(cheap.transfer_cost, 3.0);
}

TEST(BestReplica, LocalCopyWins) {
  data::DataGrid dg;
  dg.add_link({SiteId(0u), SiteId(1u), 100, 0});
  dg.add_file({"f", 8, {SiteId(0u), SiteId(1u)}});
  const auto o = dg.best_replica("f", SiteId(1u), data::Objective::MinTime);
  EXPECT_EQ(o.source_site, SiteId(1u));
  EXPECT_EQ(o.transfer_time, 0.0);
}

TEST(BestReplica, UnreachableAndUnknownFiles) {
  data::DataGrid dg;
  dg.add_file({"f", 1, {SiteId(0u)}});
  EXPECT_EQ(code_of([&] { dg.best_replica("f", SiteId(1u), data::Objective::MinTime); }), Errc::UnreachableFile);
  EXPECT_EQ(code_of([&] { dg.best_replica("g", SiteId(1u), data::Objective::MinTime); }), Errc::UnknownFile);
}

TEST(DataOverhead, SumsThePerFileChoices) {
  const SiteId home(0u), dest(1u);
  data::DataGrid dg;
  dg.add_link({home, dest, 2.0, 0.5});
  dg.add_file({"x", 4, {home}});
  dg.add_file({"y", 6, {home}});
  dg.add_file({"z", 9, {dest}});
  const std::vector<std::string> inputs{"x", "y", "z"};
  const auto o = dg.data_overhead(inputs, dest, data::Objective::MinTime);
  EXPECT_DOUBLE_EQ(o.transfer_time, 5.0);
  EXPECT_DOUBLE_EQ(o.transfer_cost, 5.0);
  EXPECT_DOUBLE_EQ(o.data_mb, 10.0);
  ASSERT_EQ(o.per_file.size(), 3u);

  const auto none = dg.data_overhead({}, dest, data::Objective::MinCost);
  EXPECT_EQ(none.transfer_time, 0.0);
  EXPECT_EQ(none.transfer_cost, 0.0);
}

TEST(BestReplica, MatchesEnumerationOnRandomGraphs) {
  SeededRng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n_sites = static_cast<std::uint32_t>(rng.uniform_int(2, 8));
    data::DataGrid dg;
    std::vector<data::NetworkLink> raw;
    for (std::uint32_t i = 0; i < n_sites; ++i)
      for (std::uint32_t j = i + 1; j < n_sites; ++j) {
        if (!rng.bernoulli(0.6)) continue;
        data::NetworkLink l{SiteId(i), SiteId(j), static_cast<double>(rng.uniform_int(1, 4)),
                            static_cast<double>(rng.uniform_int(0, 3)) / 4.0};
        dg.add_link(l);
        raw.push_back(l);
      }
    data::LogicalFile f{"f", static_cast<double>(rng.uniform_int(1, 50)), {}};
    const auto copies = rng.uniform_int(1, 6);
    for (int c = 0; c < copies; ++c) f.replicas.insert(SiteId(static_cast<std::uint32_t>(rng.uniform_int(0, n_sites - 1))));
    const SiteId dest(static_cast<std::uint32_t>(rng.uniform_int(0, n_sites - 1)));

    for (auto obj : {data::Objective::MinTime, data::Objective::MinCost}) {
      const auto expected = oracles::best_replica_by_enumeration(f, dest, raw, obj);
      if (!expected) {
        EXPECT_THROW(dg.best_replica(f, dest, obj), Error);
        continue;
      }
      const auto got = dg.best_replica(f, dest, obj);
      ASSERT_EQ(got.source_site, expected->site) << "trial " << trial;
      ASSERT_EQ(got.transfer_time, expected->time);
      ASSERT_EQ(got.transfer_cost, expected->cost);
    }
  }
}

// Market directory ------------------------------------------------------------

namespace {

market::ServiceEntry entry(std::uint32_t resource, double price, std::set<std::string> apps = {"povray"}) {
  market::ServiceEntry e;
  e.resource = ResourceId(resource);
  e.provider_account = AccountId(0u);
  e.apps = std::move(apps);
  e.price_summary = {price, 1.0};
  return e;
}

}  // namespace

TEST(Directory, QueryIsSortedByPriceThenResource) {
  market::MarketDirectory d;
  d.publish(entry(2, 3.0));
  d.publish(entry(0, 1.0));
  d.publish(entry(1, 1.0));
  const auto hits = d.query("compute");
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].resource, ResourceId(0u));
  EXPECT_EQ(hits[1].resource, ResourceId(1u));
  EXPECT_EQ(hits[2].resource, ResourceId(2u));
}

TEST(Directory, FiltersByAppAndPrice) {
  market::MarketDirectory d;
  d.publish(entry(0, 1.0, {"povray"}));
  d.publish(entry(1, 2.0, {"blast"}));
  d.publish(entry(2, 5.0, {"povray", "blast"}));
  EXPECT_EQ(d.query("compute", "blast").size(), 2u);
  EXPECT_EQ(d.query("compute", "blast", 4.0).size(), 1u);
  EXPECT_TRUE(d.query("compute", "gauss").empty());
  EXPECT_TRUE(d.query("storage").empty());
}

TEST(Directory, OneLiveEntryPerResourceAndType) {
  market::MarketDirectory d;
  const auto id = d.publish(entry(0, 1.0));
  EXPECT_EQ(code_of([&] { d.publish(entry(0, 2.0)); }), Errc::DuplicateEntry);
  auto storage = entry(0, 0.5);
  storage.service_type = "storage";
  EXPECT_NO_THROW(d.publish(storage));
  d.unpublish(id);
  EXPECT_FALSE(d.is_live(id));
  EXPECT_NO_THROW(d.publish(entry(0, 2.0)));
  EXPECT_EQ(code_of([&] { d.unpublish(id); }), Errc::UnknownEntry);
}

TEST(Directory, RejectsUnknownResources) {
  market::MarketDirectory d([](ResourceId r) { return r.value < 2; });
  EXPECT_NO_THROW(d.publish(entry(1, 1.0)));
  EXPECT_EQ(code_of([&] { d.publish(entry(5, 1.0)); }), Errc::UnknownResource);
}

TEST(Directory, PublishedEntryRoundTrips) {
  market::MarketDirectory d;
  auto e = entry(3, 2.5, {"a", "b"});
  e.published_at = 12.0;
  e.id = d.publish(e);
  const auto hits = d.query("compute");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0], e);
}

// Grid bank --------------------------------------------------------------------

namespace {

bank::UsageRecord usage(AccountId from, AccountId to, double gd) {
  bank::UsageRecord r;
  r.consumer = from;
  r.provider = to;
  r.resource = "r";
  r.amount = Money::from_gd(gd);
  return r;
}

}  // namespace

TEST(GridBank, ChargeMovesCredit) {
  bank::GridBank b;
  const auto user = b.open_account("user", 100.0);
  const auto prov = b.open_account("prov", 0.0);
  b.charge(usage(user, prov, 20));
  EXPECT_EQ(b.balance(user), Money::from_gd(80));
  EXPECT_EQ(b.balance(prov), Money::from_gd(20));
  EXPECT_EQ(b.total_balance(), b.total_initial());
}

TEST(GridBank, ZeroChargeIsRecorded) {
  bank::GridBank b;
  const auto user = b.open_account("user", 5.0);
  const auto prov = b.open_account("prov", 0.0);
  b.charge(usage(user, prov, 0));
  EXPECT_EQ(b.ledger().size(), 1u);
  EXPECT_EQ(b.balance(user), Money::from_gd(5));
}

TEST(GridBank, InsufficientFundsLeavesBalancesAlone) {
  bank::GridBank b;
  const auto user = b.open_account("user", 10.0);
  const auto prov = b.open_account("prov", 0.0);
  EXPECT_EQ(code_of([&] { b.charge(usage(user, prov, 10.5)); }), Errc::InsufficientFunds);
  EXPECT_EQ(b.balance(user), Money::from_gd(10));
  EXPECT_TRUE(b.ledger().empty());
  EXPECT_TRUE(b.check_credit(user, Money::from_gd(10)));
  EXPECT_FALSE(b.check_credit(user, Money::from_gd(10.000001)));
}

TEST(GridBank, RejectsBadAccounts) {
  bank::GridBank b;
  EXPECT_EQ(code_of([&] { b.open_account("x", -1.0); }), Errc::NegativeCredit);
  EXPECT_EQ(code_of([&] { b.balance(AccountId(4u)); }), Errc::UnknownAccount);
}

TEST(GridBank, StatementReconciles) {
  bank::GridBank b;
  const auto user = b.open_account("user", 100.0);
  const auto prov = b.open_account("prov", 0.0);
  b.charge(usage(user, prov, 30));
  b.charge(usage(user, prov, 20));
  const auto s = b.statement(user);
  EXPECT_EQ(s.opening, Money::from_gd(100));
  EXPECT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.closing, Money::from_gd(50));
  EXPECT_EQ(s.closing, b.balance(user));
}

TEST(GridBank, LedgerReplayMatchesLiveBalances) {
  SeededRng rng(5);
  bank::GridBank b;
  std::vector<AccountId> ids;
  for (int i = 0; i < 6; ++i) ids.push_back(b.open_account("a" + std::to_string(i), static_cast<double>(rng.uniform_int(0, 200))));
  for (int i = 0; i < 500; ++i) {
    const auto from = ids[static_cast<std::size_t>(rng.uniform_int(0, 5))];
    const auto to = ids[static_cast<std::size_t>(rng.uniform_int(0, 5))];
    const auto amount = Money::from_micros(rng.uniform_int(0, 40'000'000));
    if (!b.check_credit(from, amount)) continue;
    auto r = usage(from, to, 0);
    r.amount = amount;
    b.charge(r);
  }
  const auto replayed = oracles::replay_ledger(oracles::opening_balances(b), b.ledger());
  for (const auto& a : b.accounts()) {
    EXPECT_GE(a.balance, Money{});
    EXPECT_EQ(replayed.at(a.id), a.balance);
  }
  EXPECT_EQ(b.total_balance(), b.total_initial());
}

TEST(Oracle, ReplayRejectsOverdraft) {
  std::map<AccountId, Money> opening{{AccountId(0u), Money::from_gd(1)}, {AccountId(1u), Money{}}};
  bank::Transaction tx;
  tx.debit_account = AccountId(0u);
  tx.credit_account = AccountId(1u);
  tx.amount = Money::from_gd(2);
  EXPECT_EQ(code_of([&] { oracles::replay_ledger(opening, {tx}); }), Errc::ReplayError);
  tx.amount = Money::from_gd(1);
  const auto out = oracles::replay_ledger(opening, {tx});
  EXPECT_EQ(out.at(AccountId(1u)), Money::from_gd(1));
}
