#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <toml.hpp>

#include "gridbus/broker/planning.hpp"
#include "gridbus/simulation.hpp"
#include "gridbus/sweep/plan.hpp"

namespace gridbus::scenario {

struct Finding {
  std::string where;
  std::string what;

  std::string str() const { return where.empty() ? what : where + ": " + what; }
};

struct SiteSpec {
  std::string name;
  int utc_offset = 0;
};

struct ResourceSpec {
  std::string name;
  std::string site;
  int pes = 1;
  double mips = 0.0;
  double price = 0.0;
  double peak_multiplier = 1.0;
  grid::PeakWindow peak_window;
  std::string provider;
  std::set<std::string> apps;
  bool publish = true;
};

struct LinkSpec {
  std::string a;
  std::string b;
  double bandwidth = 0.0;
  double price_per_mb = 0.0;
};

struct AccountSpec {
  std::string name;
  std::string owner;
  double credit = 0.0;
};

struct FileSpec {
  std::string name;
  double size_mb = 0.0;
  std::vector<std::string> replicas;
};

struct ClusterSpec {
  std::string name;
  std::string site;
  std::string provider;
  double alpha = 0.01;
  double beta = 1.0;
  std::vector<double> nodes;
};

struct SessionSpec {
  std::string name;
  std::string consumer;
  std::string home_site;
  std::string app;
  broker::Strategy strategy = broker::Strategy::CostOpt;
  double deadline = 0.0;  // seconds after start
  double budget = 0.0;
  double start = 0.0;
  double reschedule_interval = 10.0;
  std::optional<std::string> cluster;
  double arrival_gap = 0.0;
  bool stage_code = false;
  double code_mb = 0.0;
  std::vector<sweep::JobSpec> jobs;
};

struct Range2 {
  double lo = 0.0;
  double hi = 0.0;
};

/// Synthetic topology drawn from the scenario seed.
struct GenerateSpec {
  int sites = 1;
  int resources = 1;
  std::string provider;
  std::set<std::string> apps;
  Range2 pes{1, 4};
  Range2 mips{100, 1000};
  Range2 price{1, 10};
  Range2 bandwidth{1, 10};
  Range2 link_price{0, 0.1};
};

struct Scenario {
  std::filesystem::path source;
  std::uint64_t seed = 0;
  double end_time = kNever;
  double gmd_latency = 0.0;
  std::vector<SiteSpec> sites;
  std::vector<ResourceSpec> resources;
  std::vector<LinkSpec> links;
  std::vector<AccountSpec> accounts;
  std::optional<std::string> default_home;
  std::vector<FileSpec> files;
  std::vector<ClusterSpec> clusters;
  std::vector<SessionSpec> sessions;
  std::optional<GenerateSpec> generate;
};

enum class LoadStatus { Ok, SyntaxError, Invalid };

struct LoadResult {
  LoadStatus status = LoadStatus::Ok;
  std::optional<Scenario> scenario;
  std::vector<Finding> findings;
};

namespace detail {

/// Typed access to one TOML table that records a finding for every missing,
/// mistyped or unknown key instead of stopping at the first.
class Fields {
 public:
  Fields(const toml::table& t, std::string where, std::vector<Finding>& out) : t_(t), where_(std::move(where)), out_(out) {}

  const std::string& where() const { return where_; }
  void problem(std::string what) { out_.push_back({where_, std::move(what)}); }

  std::optional<double> number(std::string_view key, bool required = false) {
    const toml::node* n = t_.get(key);
    if (!n) return missing(key, required);
    if (!n->is_number()) return wrong(key, "a number");
    return n->value<double>();
  }

  std::optional<std::int64_t> integer(std::string_view key, bool required = false) {
    const toml::node* n = t_.get(key);
    if (!n) return missing(key, required);
    if (!n->is_integer()) return wrong(key, "an integer");
    return n->value<std::int64_t>();
  }

  std::optional<std::string> text(std::string_view key, bool required = false) {
    const toml::node* n = t_.get(key);
    if (!n) return missing(key, required);
    if (!n->is_string()) return wrong(key, "a string");
    return n->value<std::string>();
  }

  std::optional<bool> boolean(std::string_view key) {
    const toml::node* n = t_.get(key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) return wrong(key, "true or false");
    return n->value<bool>();
  }

  std::optional<std::vector<std::string>> texts(std::string_view key, bool required = false) {
    const toml::node* n = t_.get(key);
    if (!n) return missing(key, required);
    const toml::array* a = n->as_array();
    std::vector<std::string> out;
    if (a) {
      for (const auto& e : *a) {
        if (!e.is_string()) return wrong(key, "an array of strings");
        out.push_back(*e.value<std::string>());
      }
      return out;
    }
    return wrong(key, "an array of strings");
  }

  std::optional<std::vector<double>> numbers(std::string_view key, bool required = false) {
    const toml::node* n = t_.get(key);
    if (!n) return missing(key, required);
    const toml::array* a = n->as_array();
    std::vector<double> out;
    if (a) {
      for (const auto& e : *a) {
        if (!e.is_number()) return wrong(key, "an array of numbers");
        out.push_back(*e.value<double>());
      }
      return out;
    }
    return wrong(key, "an array of numbers");
  }

  std::optional<Range2> range(std::string_view key) {
    auto v = numbers(key);
    if (!v) return std::nullopt;
    if (v->size() != 2) {
      problem(std::string(key) + " must be [low, high]");
      return std::nullopt;
    }
    if ((*v)[0] > (*v)[1]) {
      problem(std::string(key) + " has low above high");
      return std::nullopt;
    }
    return Range2{(*v)[0], (*v)[1]};
  }

  void reject_unknown(std::initializer_list<std::string_view> known) {
    for (const auto& [k, v] : t_) {
      bool ok = false;
      for (auto name : known) ok = ok || k.str() == name;
      if (!ok) problem("unknown key '" + std::string(k.str()) + "'");
    }
  }

 private:
  std::nullopt_t missing(std::string_view key, bool required) {
    if (required) problem("missing required key '" + std::string(key) + "'");
    return std::nullopt;
  }
  std::nullopt_t wrong(std::string_view key, std::string_view what) {
    problem("'" + std::string(key) + "' must be " + std::string(what));
    return std::nullopt;
  }

  const toml::table& t_;
  std::string where_;
  std::vector<Finding>& out_;
};

template <class F>
void each_table(const toml::table& root, std::string_view key, std::vector<Finding>& out, F&& fn) {
  const toml::node* n = root.get(key);
  if (!n) return;
  const toml::array* arr = n->as_array();
  if (!arr) {
    out.push_back({std::string(key), "must be an array of tables"});
    return;
  }
  std::size_t i = 0;
  for (const auto& e : *arr) {
    const std::string where = std::string(key) + "[" + std::to_string(i++) + "]";
    if (const toml::table* t = e.as_table()) {
      fn(*t, where);
    } else {
      out.push_back({where, "must be a table"});
    }
  }
}

inline std::string label(const std::string& where, const std::string& name) {
  return name.empty() ? where : where + " (" + name + ")";
}

inline std::optional<std::string> read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void read_top(const toml::table& root, Scenario& s, std::vector<Finding>& out) {
  Fields f(root, "", out);
  f.reject_unknown({"seed", "end_time", "gmd_latency", "sites", "resources", "links", "accounts", "catalog", "clusters",
                    "sessions", "generate"});
  if (auto v = f.integer("seed")) {
    if (*v < 0) f.problem("seed must be non-negative");
    else s.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = f.number("end_time")) {
    if (!(*v > 0.0)) f.problem("end_time must be positive");
    else s.end_time = *v;
  }
  if (auto v = f.number("gmd_latency")) {
    if (*v < 0.0) f.problem("gmd_latency must be non-negative");
    else s.gmd_latency = *v;
  }
}

inline void read_entities(const toml::table& root, Scenario& s, std::vector<Finding>& out) {
  each_table(root, "sites", out, [&](const toml::table& t, const std::string& where) {
    Fields f(t, where, out);
    f.reject_unknown({"name", "utc_offset"});
    SiteSpec site;
    site.name = f.text("name", true).value_or("");
    if (auto v = f.integer("utc_offset")) site.utc_offset = static_cast<int>(*v);
    s.sites.push_back(site);
  });

  each_table(root, "accounts", out, [&](const toml::table& t, const std::string& where) {
    Fields f(t, where, out);
    f.reject_unknown({"name", "owner", "credit"});
    AccountSpec a;
    a.name = f.text("name", true).value_or("");
    a.owner = f.text("owner").value_or(a.name);
    a.credit = f.number("credit", true).value_or(0.0);
    s.accounts.push_back(a);
  });

  each_table(root, "resources", out, [&](const toml::table& t, const std::string& where) {
    Fields f(t, where, out);
    f.reject_unknown({"name", "site", "pes", "mips", "price", "peak_multiplier", "peak_window", "provider", "apps", "publish"});
    ResourceSpec r;
    r.name = f.text("name", true).value_or("");
    r.site = f.text("site", true).value_or("");
    r.pes = static_cast<int>(f.integer("pes").value_or(1));
    r.mips = f.number("mips", true).value_or(0.0);
    r.price = f.number("price", true).value_or(0.0);
    r.peak_multiplier = f.number("peak_multiplier").value_or(1.0);
    if (auto w = f.numbers("peak_window")) {
      if (w->size() != 2) f.problem("peak_window must be [start_hour, end_hour]");
      else r.peak_window = {(*w)[0], (*w)[1]};
    }
    r.provider = f.text("provider", true).value_or("");
    if (auto apps = f.texts("apps")) r.apps = {apps->begin(), apps->end()};
    r.publish = f.boolean("publish").value_or(true);
    s.resources.push_back(r);
  });

  each_table(root, "links", out, [&](const toml::table& t, const std::string& where) {
    Fields f(t, where, out);
    f.reject_unknown({"sites", "bandwidth", "price_per_mb"});
    LinkSpec l;
    if (auto ends = f.texts("sites", true)) {
      if (ends->size() != 2) f.problem("sites must name exactly two sites");
      else {
        l.a = (*ends)[0];
        l.b = (*ends)[1];
      }
    }
    l.bandwidth = f.number("bandwidth", true).value_or(0.0);
    l.price_per_mb = f.number("price_per_mb").value_or(0.0);
    s.links.push_back(l);
  });

  if (const toml::node* n = root.get("catalog")) {
    if (const toml::table* cat = n->as_table()) {
      Fields f(*cat, "catalog", out);
      f.reject_unknown({"default_home", "files"});
      s.default_home = f.text("default_home");
      each_table(*cat, "files", out, [&](const toml::table& t, const std::string& where) {
        Fields ff(t, "catalog." + where, out);
        ff.reject_unknown({"name", "size_mb", "replicas"});
        FileSpec file;
        file.name = ff.text("name", true).value_or("");
        file.size_mb = ff.number("size_mb", true).value_or(0.0);
        file.replicas = ff.texts("replicas", true).value_or(std::vector<std::string>{});
        s.files.push_back(file);
      });
    } else {
      out.push_back({"catalog", "must be a table"});
    }
  }

  each_table(root, "clusters", out, [&](const toml::table& t, const std::string& where) {
    Fields f(t, where, out);
    f.reject_unknown({"name", "site", "provider", "alpha", "beta", "nodes"});
    ClusterSpec c;
    c.name = f.text("name", true).value_or("");
    c.site = f.text("site", true).value_or("");
    c.provider = f.text("provider", true).value_or("");
    c.alpha = f.number("alpha").value_or(0.01);
    c.beta = f.number("beta").value_or(1.0);
    c.nodes = f.numbers("nodes", true).value_or(std::vector<double>{});
    s.clusters.push_back(c);
  });

  if (const toml::node* n = root.get("generate")) {
    if (const toml::table* t = n->as_table()) {
      Fields f(*t, "generate", out);
      f.reject_unknown({"sites", "resources", "provider", "apps", "pes", "mips", "price", "bandwidth", "link_price"});
      GenerateSpec g;
      g.sites = static_cast<int>(f.integer("sites").value_or(1));
      g.resources = static_cast<int>(f.integer("resources", true).value_or(1));
      g.provider = f.text("provider", true).value_or("");
      if (auto apps = f.texts("apps")) g.apps = {apps->begin(), apps->end()};
      if (auto r = f.range("pes")) g.pes = *r;
      if (auto r = f.range("mips")) g.mips = *r;
      if (auto r = f.range("price")) g.price = *r;
      if (auto r = f.range("bandwidth")) g.bandwidth = *r;
      if (auto r = f.range("link_price")) g.link_price = *r;
      if (g.sites < 1) f.problem("sites must be at least 1");
      if (g.resources < 1) f.problem("resources must be at least 1");
      if (g.pes.lo < 1 || g.pes.lo != std::floor(g.pes.lo) || g.pes.hi != std::floor(g.pes.hi)) {
        f.problem("pes must be a range of positive integers");
      }
      if (!(g.mips.lo > 0.0)) f.problem("mips must be positive");
      if (g.price.lo < 0.0) f.problem("price must be non-negative");
      if (!(g.bandwidth.lo > 0.0)) f.problem("bandwidth must be positive");
      if (g.link_price.lo < 0.0) f.problem("link_price must be non-negative");
      s.generate = g;
    } else {
      out.push_back({"generate", "must be a table"});
    }
  }
}

inline void read_sessions(const toml::table& root, Scenario& s, std::vector<Finding>& out) {
  each_table(root, "sessions", out, [&](const toml::table& t, const std::string& where) {
    Fields f(t, where, out);
    f.reject_unknown({"name", "consumer", "home_site", "app", "strategy", "deadline", "budget", "start",
                      "reschedule_interval", "plan", "plan_file", "cluster", "arrival_gap", "stage_code", "code_mb"});
    SessionSpec ss;
    ss.name = f.text("name", true).value_or("");
    Fields g(t, label(where, ss.name), out);
    ss.consumer = g.text("consumer", true).value_or("");
    ss.cluster = g.text("cluster");
    ss.home_site = g.text("home_site", !ss.cluster).value_or("");
    ss.app = g.text("app").value_or("");
    if (auto st = g.text("strategy")) {
      if (auto parsed = broker::parse_strategy(*st)) ss.strategy = *parsed;
      else g.problem("unknown strategy '" + *st + "'");
    }
    ss.deadline = g.number("deadline", true).value_or(0.0);
    ss.budget = g.number("budget", true).value_or(0.0);
    ss.start = g.number("start").value_or(0.0);
    ss.reschedule_interval = g.number("reschedule_interval").value_or(10.0);
    ss.arrival_gap = g.number("arrival_gap").value_or(0.0);
    ss.stage_code = g.boolean("stage_code").value_or(false);
    ss.code_mb = g.number("code_mb").value_or(0.0);

    if (!(ss.budget > 0.0)) g.problem("budget must be positive");
    if (!(ss.deadline > 0.0)) g.problem("deadline must be positive (seconds after start)");
    if (ss.start < 0.0) g.problem("start must be non-negative");
    if (!(ss.reschedule_interval > 0.0)) g.problem("reschedule_interval must be positive");
    if (ss.arrival_gap < 0.0) g.problem("arrival_gap must be non-negative");
    if (ss.code_mb < 0.0) g.problem("code_mb must be non-negative");

    auto inline_plan = g.text("plan");
    auto plan_file = g.text("plan_file");
    std::optional<std::string> text;
    std::string origin = "plan";
    if (inline_plan && plan_file) {
      g.problem("give either plan or plan_file, not both");
    } else if (inline_plan) {
      text = inline_plan;
    } else if (plan_file) {
      const auto path = s.source.parent_path() / *plan_file;
      origin = *plan_file;
      text = read_text(path);
      if (!text) g.problem("cannot read plan file " + path.string());
    } else if (!t.get("plan") && !t.get("plan_file")) {
      g.problem("missing plan or plan_file");
    }
    if (text) {
      try {
        ss.jobs = sweep::expand(sweep::parse_plan(*text)).jobs;
      } catch (const sweep::PlanError& e) {
        g.problem(origin + " line " + std::to_string(e.line()) + ": " + e.message());
      } catch (const Error& e) {
        g.problem(origin + ": " + e.what());
      }
    }
    s.sessions.push_back(std::move(ss));
  });
}

template <class T>
std::map<std::string, std::size_t> index_names(const std::vector<T>& items, std::string_view kind, std::vector<Finding>& out) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string where = std::string(kind) + "[" + std::to_string(i) + "]";
    if (items[i].name.empty()) {
      out.push_back({where, "name must not be empty"});
      continue;
    }
    if (!idx.emplace(items[i].name, i).second) out.push_back({where, "duplicate name '" + items[i].name + "'"});
  }
  return idx;
}

inline void check_references(Scenario& s, std::vector<Finding>& out) {
  const auto sites = index_names(s.sites, "sites", out);
  const auto accounts = index_names(s.accounts, "accounts", out);
  const auto resources = index_names(s.resources, "resources", out);
  const auto clusters = index_names(s.clusters, "clusters", out);
  index_names(s.sessions, "sessions", out);
  auto has = [](const auto& idx, const std::string& n) { return idx.contains(n); };

  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    if (s.sites[i].utc_offset < -12 || s.sites[i].utc_offset > 14) {
      out.push_back({label("sites[" + std::to_string(i) + "]", s.sites[i].name), "utc_offset must lie in [-12, 14]"});
    }
  }
  for (std::size_t i = 0; i < s.accounts.size(); ++i) {
    if (s.accounts[i].credit < 0.0) {
      out.push_back({label("accounts[" + std::to_string(i) + "]", s.accounts[i].name), "credit must be non-negative"});
    }
  }
  for (std::size_t i = 0; i < s.resources.size(); ++i) {
    const auto& r = s.resources[i];
    const std::string where = label("resources[" + std::to_string(i) + "]", r.name);
    if (!has(sites, r.site)) out.push_back({where, "unknown site '" + r.site + "'"});
    if (!has(accounts, r.provider)) out.push_back({where, "unknown provider account '" + r.provider + "'"});
    if (r.pes < 1) out.push_back({where, "pes must be at least 1"});
    if (!(r.mips > 0.0)) out.push_back({where, "mips must be positive"});
    if (r.price < 0.0) out.push_back({where, "price must be non-negative"});
    if (!(r.peak_multiplier >= 1.0)) out.push_back({where, "peak_multiplier must be at least 1"});
    if (!r.peak_window.valid()) out.push_back({where, "peak_window must be [start, end] with 0 <= start < end <= 24, or [0, 0] for none"});
    if (has(clusters, r.name)) out.push_back({where, "name clashes with a cluster"});
  }
  std::set<std::pair<std::string, std::string>> seen_links;
  for (std::size_t i = 0; i < s.links.size(); ++i) {
    const auto& l = s.links[i];
    const std::string where = "links[" + std::to_string(i) + "]";
    if (l.a.empty()) continue;
    if (!has(sites, l.a)) out.push_back({where, "unknown site '" + l.a + "'"});
    if (!has(sites, l.b)) out.push_back({where, "unknown site '" + l.b + "'"});
    if (l.a == l.b) out.push_back({where, "a link needs two different sites"});
    if (!(l.bandwidth > 0.0)) out.push_back({where, "bandwidth must be positive"});
    if (l.price_per_mb < 0.0) out.push_back({where, "price_per_mb must be non-negative"});
    if (!seen_links.insert(std::minmax(l.a, l.b)).second) out.push_back({where, "duplicate link " + l.a + " - " + l.b});
  }
  if (s.default_home && !has(sites, *s.default_home)) {
    out.push_back({"catalog", "unknown default_home site '" + *s.default_home + "'"});
  }
  std::map<std::string, double> file_sizes;
  for (std::size_t i = 0; i < s.files.size(); ++i) {
    const auto& f = s.files[i];
    const std::string where = label("catalog.files[" + std::to_string(i) + "]", f.name);
    if (f.name.empty()) {
      out.push_back({where, "name must not be empty"});
      continue;
    }
    if (!file_sizes.emplace(f.name, f.size_mb).second) out.push_back({where, "duplicate file"});
    if (!(f.size_mb > 0.0)) out.push_back({where, "size_mb must be positive"});
    if (f.replicas.empty()) out.push_back({where, "needs at least one replica"});
    for (const auto& r : f.replicas)
      if (!has(sites, r)) out.push_back({where, "replica at unknown site '" + r + "'"});
  }
  for (std::size_t i = 0; i < s.clusters.size(); ++i) {
    const auto& c = s.clusters[i];
    const std::string where = label("clusters[" + std::to_string(i) + "]", c.name);
    if (!has(sites, c.site)) out.push_back({where, "unknown site '" + c.site + "'"});
    if (!has(accounts, c.provider)) out.push_back({where, "unknown provider account '" + c.provider + "'"});
    if (c.nodes.empty()) out.push_back({where, "needs at least one node"});
    for (double n : c.nodes)
      if (!(n > 0.0)) out.push_back({where, "node ratings must be positive"});
    if (c.alpha < 0.0 || c.beta < 0.0) out.push_back({where, "alpha and beta must be non-negative"});
  }
  if (s.generate && !has(accounts, s.generate->provider)) {
    out.push_back({"generate", "unknown provider account '" + s.generate->provider + "'"});
  }

  if (s.sessions.empty()) out.push_back({"sessions", "at least one session is required"});
  for (std::size_t i = 0; i < s.sessions.size(); ++i) {
    auto& ss = s.sessions[i];
    const std::string where = label("sessions[" + std::to_string(i) + "]", ss.name);
    if (!ss.consumer.empty() && !has(accounts, ss.consumer)) out.push_back({where, "unknown consumer account '" + ss.consumer + "'"});
    if (!ss.home_site.empty() && !has(sites, ss.home_site)) out.push_back({where, "unknown home_site '" + ss.home_site + "'"});
    if (ss.cluster && !has(clusters, *ss.cluster)) out.push_back({where, "unknown cluster '" + *ss.cluster + "'"});
    if (ss.cluster) continue;  // cluster jobs carry no data
    std::set<std::string> reported;
    for (const auto& job : ss.jobs) {
      for (const auto& in : job.inputs) {
        auto it = file_sizes.find(in.name);
        if (it == file_sizes.end()) {
          if (s.default_home) {
            file_sizes.emplace(in.name, in.size_mb);
            s.files.push_back({in.name, in.size_mb, {*s.default_home}});
          } else if (reported.insert(in.name).second) {
            out.push_back({where, "input file '" + in.name + "' is not in the catalog and no default_home is set"});
          }
        } else if (it->second != in.size_mb && reported.insert(in.name).second) {
          out.push_back({where, "input file '" + in.name + "' is " + format_number(in.size_mb) +
                                    " MB in the plan but " + format_number(it->second) + " MB in the catalog"});
        }
      }
    }
  }
}

}  // namespace detail

/// Parses and validates scenario text. `source` locates plan files given by
/// relative path.
inline LoadResult load_text(std::string_view text, const std::filesystem::path& source) {
  LoadResult res;
  toml::table root;
  try {
    root = toml::parse(text, source.string());
  } catch (const toml::parse_error& e) {
    res.status = LoadStatus::SyntaxError;
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ", column " << e.source().begin.column << ")";
    res.findings.push_back({source.filename().string(), msg.str()});
    return res;
  }
  Scenario s;
  s.source = source;
  detail::read_top(root, s, res.findings);
  detail::read_entities(root, s, res.findings);
  detail::read_sessions(root, s, res.findings);
  detail::check_references(s, res.findings);
  if (!res.findings.empty()) {
    res.status = LoadStatus::Invalid;
    return res;
  }
  res.scenario = std::move(s);
  return res;
}

inline LoadResult load_file(const std::filesystem::path& path) {
  auto text = detail::read_text(path);
  if (!text) {
    LoadResult res;
    res.status = LoadStatus::SyntaxError;
    res.findings.push_back({path.string(), "cannot read file"});
    return res;
  }
  return load_text(*text, path);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<broker::Strategy> strategy;
};

/// Wires a validated scenario into a ready-to-run simulation.
inline std::unique_ptr<Simulation> build(const Scenario& s, const Overrides& ov = {}) {
  const std::uint64_t seed = ov.seed.value_or(s.seed);
  auto sim = std::make_unique<Simulation>(seed);
  World& w = sim->world();
  w.gmd.set_latency(s.gmd_latency);

  std::map<std::string, SiteId> sites;
  std::map<std::string, AccountId> accounts;
  for (const auto& site : s.sites) sites[site.name] = w.grid.add_site(site.name, site.utc_offset);
  for (const auto& a : s.accounts) accounts[a.name] = w.bank.open_account(a.owner, a.credit);

  auto add_resource = [&](const ResourceSpec& r) {
    grid::GridResource g;
    g.name = r.name;
    g.site = sites.at(r.site);
    g.n_pe = r.pes;
    g.pe_rating_mips = r.mips;
    g.base_price = r.price;
    g.peak_multiplier = r.peak_multiplier;
    g.peak_window = r.peak_window;
    g.provider_account = accounts.at(r.provider);
    g.apps = r.apps;
    w.add_resource(std::move(g), r.publish);
  };
  for (const auto& r : s.resources) add_resource(r);

  std::set<std::pair<SiteId, SiteId>> linked;
  for (const auto& l : s.links) {
    const SiteId a = sites.at(l.a), b = sites.at(l.b);
    w.data.add_link({a, b, l.bandwidth, l.price_per_mb});
    linked.insert(std::minmax(a, b));
  }

  if (s.generate) {
    const auto& g = *s.generate;
    SeededRng rng = w.rng.split(1);
    std::vector<SiteId> gen_sites;
    for (int i = 0; i < g.sites; ++i) {
      const std::string name = "gen-site-" + std::to_string(i);
      gen_sites.push_back(w.grid.add_site(name, static_cast<int>(rng.uniform_int(-12, 14))));
      sites[name] = gen_sites.back();
    }
    for (int i = 0; i < g.resources; ++i) {
      ResourceSpec r;
      r.name = "gen-res-" + std::to_string(i);
      r.site = w.grid.site(gen_sites[static_cast<std::size_t>(rng.uniform_int(0, g.sites - 1))]).name;
      r.pes = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(g.pes.lo), static_cast<std::int64_t>(g.pes.hi)));
      r.mips = std::round(rng.uniform(g.mips.lo, g.mips.hi));
      r.price = std::round(rng.uniform(g.price.lo, g.price.hi) * 100.0) / 100.0;
      r.provider = g.provider;
      r.apps = g.apps;
      add_resource(r);
    }
    const auto& all = w.grid.sites();
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (linked.contains({all[i].id, all[j].id})) continue;
        const double bw = rng.uniform(g.bandwidth.lo, g.bandwidth.hi);
        const double price = std::round(rng.uniform(g.link_price.lo, g.link_price.hi) * 1000.0) / 1000.0;
        w.data.add_link({all[i].id, all[j].id, bw, price});
      }
    }
  }

  for (const auto& f : s.files) {
    for (const auto& site : f.replicas) w.data.add_replica(f.name, f.size_mb, sites.at(site));
  }

  std::map<std::string, std::size_t> clusters;
  for (const auto& c : s.clusters) {
    clusters[c.name] = sim->add_cluster({c.name, sites.at(c.site), accounts.at(c.provider), {c.alpha, c.beta}, c.nodes});
  }

  for (const auto& ss : s.sessions) {
    SessionConfig cfg;
    cfg.name = ss.name;
    cfg.qos.consumer = accounts.at(ss.consumer);
    if (!ss.home_site.empty()) cfg.qos.home_site = sites.at(ss.home_site);
    cfg.qos.app = ss.app;
    cfg.qos.strategy = ov.strategy.value_or(ss.strategy);
    cfg.qos.deadline = ss.start + ss.deadline;
    cfg.qos.budget = ss.budget;
    cfg.start = ss.start;
    cfg.reschedule_interval = ss.reschedule_interval;
    cfg.jobs = ss.jobs;
    cfg.stage_code = ss.stage_code;
    cfg.code_mb = ss.code_mb;
    if (ss.cluster) cfg.cluster = clusters.at(*ss.cluster);
    cfg.arrival_gap = ss.arrival_gap;
    sim->add_session(std::move(cfg));
  }
  return sim;
}

}  // namespace gridbus::scenario
