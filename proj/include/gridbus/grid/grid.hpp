#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "gridbus/grid/model.hpp"

namespace gridbus::grid {

/// Registry of sites and resources plus the live FCFS state of each resource.
class Grid {
 public:
  SiteId add_site(std::string name, int utc_offset_hours) {
    if (utc_offset_hours < -12 || utc_offset_hours > 14) {
      throw Error(Errc::InvalidArgument, "utc offset out of range for site " + name);
    }
    if (site_index_.contains(name)) throw Error(Errc::InvalidArgument, "duplicate site " + name);
    SiteId id(sites_.size());
    site_index_.emplace(name, id);
    sites_.push_back({id, std::move(name), utc_offset_hours});
    return id;
  }

  ResourceId add_resource(GridResource r) {
    if (!r.site.valid() || r.site.index() >= sites_.size()) throw Error(Errc::InvalidArgument, "unknown site for " + r.name);
    if (r.n_pe < 1) throw Error(Errc::InvalidArgument, "resource needs at least one PE: " + r.name);
    if (!(r.pe_rating_mips > 0.0)) throw Error(Errc::NonpositiveRating, r.name);
    if (r.base_price < 0.0 || !(r.peak_multiplier >= 1.0) || !r.peak_window.valid()) {
      throw Error(Errc::InvalidArgument, "bad pricing for " + r.name);
    }
    if (resource_index_.contains(r.name)) throw Error(Errc::InvalidArgument, "duplicate resource " + r.name);
    r.id = ResourceId(resources_.size());
    resource_index_.emplace(r.name, r.id);
    states_.emplace_back(r.n_pe);
    resources_.push_back(std::move(r));
    return resources_.back().id;
  }

  bool has_resource(ResourceId id) const { return id.valid() && id.index() < resources_.size(); }

  const Site& site(SiteId id) const { return sites_.at(id.index()); }
  const GridResource& resource(ResourceId id) const {
    if (!has_resource(id)) throw Error(Errc::UnknownResource, "resource " + std::to_string(id.value));
    return resources_[id.index()];
  }
  const Site& site_of(ResourceId id) const { return site(resource(id).site); }

  ResourceState& state(ResourceId id) { return states_.at(id.index()); }
  const ResourceState& state(ResourceId id) const { return states_.at(id.index()); }

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<GridResource>& resources() const { return resources_; }

  std::optional<SiteId> find_site(const std::string& name) const {
    auto it = site_index_.find(name);
    if (it == site_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ResourceId> find_resource(const std::string& name) const {
    auto it = resource_index_.find(name);
    if (it == resource_index_.end()) return std::nullopt;
    return it->second;
  }

  double price_at(ResourceId id, SimTime t) const {
    const auto& r = resource(id);
    return grid::price_at(r, site(r.site), t);
  }

 private:
  std::vector<Site> sites_;
  std::vector<GridResource> resources_;
  std::vector<ResourceState> states_;
  std::unordered_map<std::string, SiteId> site_index_;
  std::unordered_map<std::string, ResourceId> resource_index_;
};

}  // namespace gridbus::grid
