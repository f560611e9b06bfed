#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridbus/core/types.hpp"

namespace gridbus::market {

struct PriceSummary {
  double base_price = 0.0;
  double peak_multiplier = 1.0;

  friend bool operator==(const PriceSummary&, const PriceSummary&) = default;
};

struct ServiceEntry {
  EntryId id;  // assigned by publish()
  AccountId provider_account;
  ResourceId resource;
  std::string service_type = "compute";
  std::set<std::string> apps;
  PriceSummary price_summary;
  SimTime published_at = 0.0;

  friend bool operator==(const ServiceEntry&, const ServiceEntry&) = default;
};

/// Registry of priced services. At most one live entry exists per
/// (resource, service_type).
class MarketDirectory {
 public:
  using ResourceCheck = std::function<bool(ResourceId)>;

  explicit MarketDirectory(ResourceCheck known_resource = {}) : known_resource_(std::move(known_resource)) {}

  EntryId publish(ServiceEntry entry) {
    if (known_resource_ && !known_resource_(entry.resource)) {
      throw Error(Errc::UnknownResource, "cannot publish for resource " + std::to_string(entry.resource.value));
    }
    const auto key = std::pair(entry.resource, entry.service_type);
    if (live_keys_.contains(key)) {
      throw Error(Errc::DuplicateEntry, entry.service_type + " entry for resource " + std::to_string(entry.resource.value));
    }
    entry.id = EntryId(next_id_++);
    live_keys_.insert(key);
    const EntryId id = entry.id;
    entries_.emplace(id, std::move(entry));
    return id;
  }

  void unpublish(EntryId id) {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(Errc::UnknownEntry, "entry " + std::to_string(id.value));
    live_keys_.erase(std::pair(it->second.resource, it->second.service_type));
    entries_.erase(it);
  }

  /// Live entries of `service_type`, optionally restricted to those offering
  /// `app` and to base prices at or below `max_base_price`. Sorted by
  /// (base_price, resource).
  std::vector<ServiceEntry> query(const std::string& service_type, const std::optional<std::string>& app = std::nullopt,
                                  std::optional<double> max_base_price = std::nullopt) const {
    std::vector<ServiceEntry> out;
    for (const auto& [id, e] : entries_) {
      if (e.service_type != service_type) continue;
      if (app && !e.apps.contains(*app)) continue;
      if (max_base_price && e.price_summary.base_price > *max_base_price) continue;
      out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const ServiceEntry& a, const ServiceEntry& b) {
      return std::pair(a.price_summary.base_price, a.resource) < std::pair(b.price_summary.base_price, b.resource);
    });
    return out;
  }

  std::vector<ServiceEntry> entries() const {
    std::vector<ServiceEntry> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_) out.push_back(e);
    return out;
  }

  bool is_live(EntryId id) const { return entries_.contains(id); }
  std::size_t size() const { return entries_.size(); }

  /// Fixed delay applied to every query made through the simulation.
  SimTime latency() const { return latency_; }
  void set_latency(SimTime s) {
    if (s < 0.0) throw Error(Errc::InvalidArgument, "directory latency must be non-negative");
    latency_ = s;
  }

 private:
  ResourceCheck known_resource_;
  std::map<EntryId, ServiceEntry> entries_;
  std::set<std::pair<ResourceId, std::string>> live_keys_;
  std::uint32_t next_id_ = 0;
  SimTime latency_ = 0.0;
};

}  // namespace gridbus::market
