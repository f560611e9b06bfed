#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gridbus/core/types.hpp"

namespace gridbus::data {

struct LogicalFile {
  std::string name;
  double size_mb = 0.0;
  std::set<SiteId> replicas;
};

struct NetworkLink {
  SiteId a;
  SiteId b;
  double bandwidth_mb_s = 1.0;
  double price_per_mb = 0.0;
};

/// Effective metrics between two sites. Intra-site routes have infinite
/// bandwidth and zero price.
struct Route {
  double bandwidth_mb_s = std::numeric_limits<double>::infinity();
  double price_per_mb = 0.0;
  bool intra_site = true;
};

struct DataOverhead {
  SiteId source_site;
  SimTime transfer_time = 0.0;
  double transfer_cost = 0.0;
};

/// Sum of the per-file choices for one job at one destination.
struct JobDataOverhead {
  SimTime transfer_time = 0.0;
  double transfer_cost = 0.0;
  double data_mb = 0.0;  // megabytes actually moved between sites
  std::vector<DataOverhead> per_file;
};

enum class Objective { MinTime, MinCost };

inline SimTime transfer_time(double size_mb, const Route& r) {
  if (r.intra_site) return 0.0;
  if (!(r.bandwidth_mb_s > 0.0)) throw Error(Errc::InvalidArgument, "bandwidth must be positive");
  return size_mb / r.bandwidth_mb_s;
}

inline double transfer_cost(double size_mb, const Route& r) {
  if (r.intra_site) return 0.0;
  return size_mb * r.price_per_mb;
}

inline SimTime transfer_time(double size_mb, const NetworkLink& l) {
  return transfer_time(size_mb, Route{l.bandwidth_mb_s, l.price_per_mb, l.a == l.b});
}

inline double transfer_cost(double size_mb, const NetworkLink& l) {
  return transfer_cost(size_mb, Route{l.bandwidth_mb_s, l.price_per_mb, l.a == l.b});
}

/// Replica catalog plus the flat site graph. Only direct links exist; a
/// missing link means the two sites cannot exchange data.
class DataGrid {
 public:
  void add_link(NetworkLink link) {
    if (link.a == link.b) throw Error(Errc::InvalidArgument, "link endpoints must differ");
    if (!(link.bandwidth_mb_s > 0.0)) throw Error(Errc::InvalidArgument, "link bandwidth must be positive");
    if (link.price_per_mb < 0.0) throw Error(Errc::InvalidArgument, "link price must be non-negative");
    const auto key = ordered(link.a, link.b);
    if (links_.contains(key)) throw Error(Errc::DuplicateLink, "sites " + std::to_string(key.first.value) + "-" + std::to_string(key.second.value));
    links_.emplace(key, link);
  }

  bool has_link(SiteId a, SiteId b) const { return a == b || links_.contains(ordered(a, b)); }

  void add_file(LogicalFile f) {
    if (!(f.size_mb > 0.0)) throw Error(Errc::InvalidArgument, "file size must be positive: " + f.name);
    if (f.replicas.empty()) throw Error(Errc::InvalidArgument, "file needs a replica: " + f.name);
    auto it = files_.find(f.name);
    if (it != files_.end()) throw Error(Errc::InvalidArgument, "duplicate file " + f.name);
    std::string name = f.name;
    files_.emplace(std::move(name), std::move(f));
  }

  /// Adds a replica of an existing file, or creates the file.
  void add_replica(const std::string& name, double size_mb, SiteId site) {
    auto it = files_.find(name);
    if (it == files_.end()) {
      add_file({name, size_mb, {site}});
      return;
    }
    if (it->second.size_mb != size_mb) throw Error(Errc::InvalidArgument, "replica size mismatch for " + name);
    it->second.replicas.insert(site);
  }

  bool has_file(const std::string& name) const { return files_.contains(name); }

  const LogicalFile& file(const std::string& name) const {
    auto it = files_.find(name);
    if (it == files_.end()) throw Error(Errc::UnknownFile, name);
    return it->second;
  }

  const std::map<std::string, LogicalFile>& files() const { return files_; }
  const std::map<std::pair<SiteId, SiteId>, NetworkLink>& links() const { return links_; }

  std::optional<Route> route(SiteId from, SiteId to) const {
    if (from == to) return Route{};
    auto it = links_.find(ordered(from, to));
    if (it == links_.end()) return std::nullopt;
    return Route{it->second.bandwidth_mb_s, it->second.price_per_mb, false};
  }

  Route require_route(SiteId from, SiteId to) const {
    auto r = route(from, to);
    if (!r) throw Error(Errc::NoRoute, "sites " + std::to_string(from.value) + " and " + std::to_string(to.value) + " are not linked");
    return *r;
  }

  SimTime transfer_time(double size_mb, SiteId from, SiteId to) const {
    return data::transfer_time(size_mb, require_route(from, to));
  }

  double transfer_cost(double size_mb, SiteId from, SiteId to) const {
    return data::transfer_cost(size_mb, require_route(from, to));
  }

  /// The replica minimising the objective; ties go to the other metric and
  /// then to the lowest site id.
  DataOverhead best_replica(const LogicalFile& f, SiteId dest, Objective objective) const {
    std::optional<DataOverhead> best;
    auto key = [objective](const DataOverhead& o) {
      return objective == Objective::MinTime ? std::tuple(o.transfer_time, o.transfer_cost, o.source_site)
                                             : std::tuple(o.transfer_cost, o.transfer_time, o.source_site);
    };
    for (SiteId src : f.replicas) {
      auto r = route(src, dest);
      if (!r) continue;
      DataOverhead o{src, data::transfer_time(f.size_mb, *r), data::transfer_cost(f.size_mb, *r)};
      if (!best || key(o) < key(*best)) best = o;
    }
    if (!best) throw Error(Errc::UnreachableFile, f.name + " has no replica linked to site " + std::to_string(dest.value));
    return *best;
  }

  DataOverhead best_replica(const std::string& name, SiteId dest, Objective objective) const {
    return best_replica(file(name), dest, objective);
  }

  JobDataOverhead data_overhead(std::span<const std::string> input_files, SiteId dest, Objective objective) const {
    JobDataOverhead total;
    total.per_file.reserve(input_files.size());
    for (const auto& name : input_files) {
      const auto& f = file(name);
      auto o = best_replica(f, dest, objective);
      total.transfer_time += o.transfer_time;
      total.transfer_cost += o.transfer_cost;
      if (o.source_site != dest) total.data_mb += f.size_mb;
      total.per_file.push_back(o);
    }
    return total;
  }

 private:
  static std::pair<SiteId, SiteId> ordered(SiteId a, SiteId b) { return a < b ? std::pair(a, b) : std::pair(b, a); }

  std::map<std::string, LogicalFile> files_;
  std::map<std::pair<SiteId, SiteId>, NetworkLink> links_;
};

}  // namespace gridbus::data
