#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridbus/core/types.hpp"

namespace gridbus::libra {

/// Price of a job: a length term plus an urgency term.
///   price = alpha * length_mi + beta * length_mi / (deadline - submit)
struct PricingParams {
  double alpha = 0.01;  // G$ per MI
  double beta = 1.0;    // G$ s per MI
};

inline double job_price(double length_mi, SimTime submit, SimTime deadline, const PricingParams& p) {
  if (!(deadline > submit)) throw Error(Errc::PastDeadline, "deadline must follow submission");
  return p.alpha * length_mi + p.beta * length_mi / (deadline - submit);
}

/// Fraction of a node needed to finish the remaining work by the deadline.
/// Values above 1 mean the node cannot make it.
inline double required_share(double remaining_mi, double rating_mips, SimTime deadline, SimTime t_now) {
  if (!(t_now < deadline)) throw Error(Errc::PastDeadline, "deadline already passed");
  if (!(rating_mips > 0.0)) throw Error(Errc::NonpositiveRating, "node rating must be positive");
  return remaining_mi / (rating_mips * (deadline - t_now));
}

/// Required shares plus the spare capacity split in proportion to them.
inline std::vector<double> proportional_shares(const std::vector<double>& required) {
  double sum = 0.0;
  for (double r : required) sum += r;
  std::vector<double> out(required.size(), 0.0);
  if (required.empty()) return out;
  if (sum > 1.0 + 1e-9) throw Error(Errc::InfeasibleShares, "required shares sum to " + std::to_string(sum));
  const double spare = std::max(0.0, 1.0 - sum);
  for (std::size_t i = 0; i < required.size(); ++i) {
    out[i] = sum > 0.0 ? required[i] + spare * (required[i] / sum) : 1.0 / static_cast<double>(required.size());
  }
  return out;
}

struct LibraJob {
  JobId job;
  double length_mi = 0.0;
  SimTime submit = 0.0;
  SimTime deadline = 0.0;
  double budget = 0.0;
  double price = 0.0;
  double remaining_mi = 0.0;
  double share = 0.0;
  SimTime finish_estimate = kNever;
};

struct Completion {
  JobId job;
  SimTime time = 0.0;
  SimTime deadline = 0.0;
  double price = 0.0;
  double length_mi = 0.0;
};

/// One cluster node running its jobs under proportional sharing. Shares are
/// recomputed only when a job arrives or leaves, so between those events each
/// job progresses linearly.
class ClusterNode {
 public:
  ClusterNode(std::size_t id, double rating_mips) : id_(id), rating_(rating_mips) {
    if (!(rating_mips > 0.0)) throw Error(Errc::NonpositiveRating, "node rating must be positive");
  }

  std::size_t id() const { return id_; }
  double rating() const { return rating_; }
  SimTime clock() const { return clock_; }
  const std::vector<LibraJob>& jobs() const { return jobs_; }
  bool empty() const { return jobs_.empty(); }

  /// Sum of the jobs' required shares at `t` (call after advancing to t).
  double load(SimTime t) const {
    double sum = 0.0;
    for (const auto& j : jobs_) sum += required_share(j.remaining_mi, rating_, j.deadline, t);
    return sum;
  }

  double share_sum() const {
    double sum = 0.0;
    for (const auto& j : jobs_) sum += j.share;
    return sum;
  }

  void add(LibraJob job) {
    job.remaining_mi = job.length_mi;
    jobs_.push_back(job);
    recompute_shares();
  }

  void recompute_shares() {
    std::vector<double> req;
    req.reserve(jobs_.size());
    for (const auto& j : jobs_) req.push_back(required_share(j.remaining_mi, rating_, j.deadline, clock_));
    const auto shares = proportional_shares(req);
    for (std::size_t i = 0; i < jobs_.size(); ++i) {
      auto& j = jobs_[i];
      j.share = shares[i];
      SimTime finish = j.remaining_mi <= 0.0 ? clock_ : clock_ + j.remaining_mi / (j.share * rating_);
      // With share >= required share the exact finish is at or before the
      // deadline; anything past it is rounding in the last few bits.
      if (finish > j.deadline) {
        if (finish - j.deadline > 1e-9 * std::max(1.0, j.deadline)) {
          throw Error(Errc::InfeasibleShares, "job " + std::to_string(j.job.value) + " would miss its deadline");
        }
        finish = j.deadline;
      }
      j.finish_estimate = finish;
    }
  }

  SimTime next_completion() const {
    SimTime t = kNever;
    for (const auto& j : jobs_) t = std::min(t, j.finish_estimate);
    return t;
  }

  /// Runs the node forward to absolute time `t`, completing every job whose
  /// finish falls at or before it and re-sharing after each departure.
  std::vector<Completion> advance_to(SimTime t) {
    std::vector<Completion> done;
    if (t < clock_) throw Error(Errc::TimeInPast, "node clock is ahead of the requested time");
    while (!jobs_.empty()) {
      const SimTime next = next_completion();
      if (next > t) break;
      progress(next - clock_);
      clock_ = next;
      std::vector<LibraJob> keep;
      keep.reserve(jobs_.size());
      for (auto& j : jobs_) {
        if (j.finish_estimate <= next) {
          done.push_back({j.job, next, j.deadline, j.price, j.length_mi});
        } else {
          keep.push_back(j);
        }
      }
      jobs_ = std::move(keep);
      if (!jobs_.empty()) recompute_shares();
    }
    if (t > clock_) {
      progress(t - clock_);
      clock_ = t;
    }
    return done;
  }

  std::vector<Completion> advance(SimTime dt) {
    if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "advance needs a positive interval");
    return advance_to(clock_ + dt);
  }

 private:
  void progress(SimTime dt) {
    for (auto& j : jobs_) j.remaining_mi = std::max(0.0, j.remaining_mi - j.share * rating_ * dt);
  }

  std::size_t id_;
  double rating_;
  SimTime clock_ = 0.0;
  std::vector<LibraJob> jobs_;
};

enum class Rejection { DeadlineInfeasible, BudgetInsufficient };

constexpr std::string_view to_string(Rejection r) {
  return r == Rejection::DeadlineInfeasible ? "deadline-infeasible" : "budget-insufficient";
}

struct Admission {
  bool accepted = false;
  std::size_t node = 0;
  Rejection reason = Rejection::DeadlineInfeasible;
  double price = 0.0;
};

/// Admission control and per-node proportional sharing for a cluster.
class Cluster {
 public:
  explicit Cluster(std::vector<double> node_ratings, PricingParams pricing = {}) : pricing_(pricing) {
    if (node_ratings.empty()) throw Error(Errc::InvalidArgument, "cluster needs at least one node");
    for (std::size_t i = 0; i < node_ratings.size(); ++i) nodes_.emplace_back(i, node_ratings[i]);
  }

  const PricingParams& pricing() const { return pricing_; }
  const std::vector<ClusterNode>& nodes() const { return nodes_; }
  ClusterNode& node(std::size_t i) { return nodes_.at(i); }

  /// Brings every node to time t and returns the jobs that finished on the way.
  std::vector<Completion> advance_to(SimTime t) {
    std::vector<Completion> out;
    for (auto& n : nodes_) {
      auto c = n.advance_to(t);
      out.insert(out.end(), c.begin(), c.end());
    }
    std::stable_sort(out.begin(), out.end(), [](const Completion& a, const Completion& b) { return a.time < b.time; });
    return out;
  }

  /// Decides on `job` at `t_now` (nodes must already be at t_now). Accepted
  /// jobs join the least-loaded node that can still take their required
  /// share; rejection leaves every existing share untouched.
  Admission admit(LibraJob job, SimTime t_now, bool credit_ok = true) {
    Admission a;
    if (!(job.deadline > t_now)) return a;
    a.price = job_price(job.length_mi, job.submit, job.deadline, pricing_);
    if (a.price > job.budget || !credit_ok) {
      a.reason = Rejection::BudgetInsufficient;
      return a;
    }
    std::optional<std::size_t> best;
    double best_load = 0.0;
    for (auto& n : nodes_) {
      const double load = n.load(t_now);
      const double need = required_share(job.length_mi, n.rating(), job.deadline, t_now);
      if (load + need > 1.0) continue;
      if (!best || load < best_load) {
        best = n.id();
        best_load = load;
      }
    }
    if (!best) {
      a.reason = Rejection::DeadlineInfeasible;
      return a;
    }
    job.price = a.price;
    nodes_[*best].add(job);
    a.accepted = true;
    a.node = *best;
    return a;
  }

  SimTime next_completion() const {
    SimTime t = kNever;
    for (const auto& n : nodes_) t = std::min(t, n.next_completion());
    return t;
  }

 private:
  PricingParams pricing_;
  std::vector<ClusterNode> nodes_;
};

}  // namespace gridbus::libra
