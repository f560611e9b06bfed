#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridbus/bank/grid_bank.hpp"
#include "gridbus/core/rng.hpp"
#include "gridbus/core/types.hpp"
#include "gridbus/data/data_grid.hpp"
#include "gridbus/grid/grid.hpp"
#include "gridbus/market/directory.hpp"
#include "gridbus/sim/kernel.hpp"

namespace gridbus {

enum class MsgKind : std::uint8_t {
  SessionStart,
  GmdQuery,
  GmdReply,
  Replan,
  JobStage,
  JobRun,
  JobDone,
  JobComplete,
  JobRejected,
  LibraSubmit,
  LibraCheck,
};

constexpr std::string_view to_string(MsgKind k) {
  switch (k) {
    case MsgKind::SessionStart: return "session-start";
    case MsgKind::GmdQuery: return "gmd-query";
    case MsgKind::GmdReply: return "gmd-reply";
    case MsgKind::Replan: return "replan";
    case MsgKind::JobStage: return "job-stage";
    case MsgKind::JobRun: return "job-run";
    case MsgKind::JobDone: return "job-done";
    case MsgKind::JobComplete: return "job-complete";
    case MsgKind::JobRejected: return "job-rejected";
    case MsgKind::LibraSubmit: return "libra-submit";
    case MsgKind::LibraCheck: return "libra-check";
  }
  return "?";
}

struct Message {
  MsgKind kind = MsgKind::SessionStart;
  JobId job;
  ResourceId resource;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t token = 0;

  static Message of(MsgKind k) {
    Message m;
    m.kind = k;
    return m;
  }
};

using Event = sim::Event<Message>;

/// Per-job facts owned by whoever submitted the job.
struct JobMeta {
  std::size_t session = 0;
  EntityId owner;
  AccountId consumer;
  SimTime deadline = 0.0;
  double budget = 0.0;  // per-job budget; used by cluster admission
};

struct GmdRequest {
  std::string service_type;
  EntityId reply_to;
  std::vector<market::ServiceEntry> result;
};

/// Everything one simulation instance owns. Entities keep a reference to the
/// world, so it is neither copyable nor movable.
class World {
 public:
  explicit World(std::uint64_t seed = 0)
      : gmd([this](ResourceId r) { return grid.has_resource(r); }), rng(seed) {
    gmd_entity = kernel.add_entity("gmd", [this](const Event& ev) { on_gmd(ev); });
  }

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  sim::Kernel<Message> kernel;
  grid::Grid grid;
  data::DataGrid data;
  market::MarketDirectory gmd;
  bank::GridBank bank;
  SeededRng rng;

  std::vector<grid::Job> jobs;
  std::vector<JobMeta> job_meta;

  /// Credit promised to work that is dispatched but not yet charged.
  std::map<AccountId, Money> committed;

  std::vector<GmdRequest> gmd_requests;
  EntityId gmd_entity;
  std::vector<EntityId> resource_entities;

  ResourceId add_resource(grid::GridResource r, bool publish = true) {
    bank.account(r.provider_account);
    const ResourceId id = grid.add_resource(std::move(r));
    const auto& res = grid.resource(id);
    resource_entities.push_back(kernel.add_entity(res.name, [this, id](const Event& ev) { on_resource(id, ev); }));
    if (publish) {
      market::ServiceEntry e;
      e.provider_account = res.provider_account;
      e.resource = id;
      e.service_type = "compute";
      e.apps = res.apps;
      e.price_summary = {res.base_price, res.peak_multiplier};
      e.published_at = kernel.now();
      gmd.publish(std::move(e));
    }
    return id;
  }

  JobId add_job(grid::Job job, JobMeta meta) {
    job.id = JobId(jobs.size());
    jobs.push_back(std::move(job));
    job_meta.push_back(meta);
    return jobs.back().id;
  }

  grid::Job& job(JobId id) { return jobs.at(id.index()); }
  const JobMeta& meta(JobId id) const { return job_meta.at(id.index()); }

  Money available_credit(AccountId a) const {
    auto it = committed.find(a);
    return bank.balance(a) - (it == committed.end() ? Money{} : it->second);
  }

  /// Files a directory lookup; the answer arrives at `reply_to` as a
  /// GmdReply carrying the returned token after the directory latency.
  std::uint64_t request_discovery(std::string service_type, EntityId reply_to) {
    const std::uint64_t token = gmd_requests.size();
    gmd_requests.push_back({std::move(service_type), reply_to, {}});
    Message m;
    m.kind = MsgKind::GmdQuery;
    m.token = token;
    kernel.schedule_at(kernel.now(), gmd_entity, m);
    return token;
  }

 private:
  void on_gmd(const Event& ev) {
    if (ev.payload.kind != MsgKind::GmdQuery) return;
    auto& req = gmd_requests.at(ev.payload.token);
    req.result = gmd.query(req.service_type);
    Message reply;
    reply.kind = MsgKind::GmdReply;
    reply.token = ev.payload.token;
    reply.value = static_cast<double>(req.result.size());
    kernel.schedule_in(gmd.latency(), req.reply_to, reply);
  }

  void on_resource(ResourceId id, const Event& ev) {
    auto& j = job(ev.payload.job);
    switch (ev.payload.kind) {
      case MsgKind::JobStage:
        grid::transition(j, grid::JobStatus::Transferring);
        break;
      case MsgKind::JobRun:
        grid::transition(j, grid::JobStatus::Running);
        break;
      case MsgKind::JobDone: {
        Message m;
        m.kind = MsgKind::JobComplete;
        m.job = j.id;
        m.resource = id;
        m.value = ev.payload.value;
        kernel.schedule_at(kernel.now(), meta(j.id).owner, m);
        break;
      }
      default:
        break;
    }
  }
};

}  // namespace gridbus
