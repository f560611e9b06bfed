#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "gridbus/core/types.hpp"

namespace gridbus::sim {

using EventId = std::uint64_t;

template <class Payload>
struct Event {
  SimTime time = 0.0;
  EventId seq = 0;
  EntityId target;
  Payload payload;
};

struct RunStats {
  std::uint64_t events_delivered = 0;
  SimTime final_time = 0.0;
};

/// Discrete-event engine.
///
/// Events are delivered in lexicographic (time, seq) order, where seq is a
/// counter assigned at scheduling time; events at equal times are therefore
/// delivered in the order they were scheduled. There is no cancellation:
/// entities drop stale messages by checking their own state.
///
/// The clock only ever moves to the time of a delivered event. run_until()
/// never advances it to `limit` on its own.
template <class Payload>
class Kernel {
 public:
  using EventType = Event<Payload>;
  using Handler = std::function<void(const EventType&)>;
  using Observer = std::function<void(const EventType&)>;

  Kernel() = default;
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;
  Kernel(Kernel&&) noexcept = default;
  Kernel& operator=(Kernel&&) noexcept = default;

  EntityId add_entity(std::string name, Handler handler) {
    EntityId id(entities_.size());
    entities_.push_back({std::move(name), std::move(handler)});
    return id;
  }

  /// Replaces the handler of an existing entity.
  void set_handler(EntityId id, Handler handler) {
    check_target(id);
    entities_[id.index()].handler = std::move(handler);
  }

  const std::string& entity_name(EntityId id) const {
    check_target(id);
    return entities_[id.index()].name;
  }

  std::size_t entity_count() const { return entities_.size(); }

  /// Called for every event just before it is handed to its target.
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  EventId schedule_at(SimTime time, EntityId target, Payload payload) {
    if (!(time >= now_) || !std::isfinite(time)) {
      throw Error(Errc::TimeInPast, "event at t=" + std::to_string(time) +
                                        " scheduled when now=" + std::to_string(now_));
    }
    check_target(target);
    const EventId seq = next_seq_++;
    queue_.push(EventType{time, seq, target, std::move(payload)});
    return seq;
  }

  EventId schedule_in(SimTime delay, EntityId target, Payload payload) {
    return schedule_at(now_ + delay, target, std::move(payload));
  }

  RunStats run_until(SimTime limit) {
    if (limit < now_) throw Error(Errc::TimeInPast, "run limit precedes current clock");
    RunStats stats;
    while (!queue_.empty() && queue_.top().time <= limit) {
      EventType ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      if (observer_) observer_(ev);
      auto& handler = entities_[ev.target.index()].handler;
      if (handler) handler(ev);
      ++stats.events_delivered;
      ++delivered_;
    }
    stats.final_time = now_;
    return stats;
  }

  RunStats run() { return run_until(kNever); }

  SimTime now() const { return now_; }
  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t delivered() const { return delivered_; }

 private:
  struct Entity {
    std::string name;
    Handler handler;
  };

  struct Later {
    bool operator()(const EventType& a, const EventType& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void check_target(EntityId id) const {
    if (!id.valid() || id.index() >= entities_.size()) {
      throw Error(Errc::UnknownTarget, "entity " + std::to_string(id.value));
    }
  }

  std::vector<Entity> entities_;
  std::priority_queue<EventType, std::vector<EventType>, Later> queue_;
  SimTime now_ = 0.0;
  EventId next_seq_ = 0;
  std::uint64_t delivered_ = 0;
  Observer observer_;
};

}  // namespace gridbus::sim
