#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gridbus {

/// Simulated seconds since the start of a run.
using SimTime = double;

inline constexpr SimTime kNever = std::numeric_limits<SimTime>::infinity();

// ---------------------------------------------------------------------------
// Errors

enum class Errc {
  TimeInPast,
  UnknownTarget,
  NonpositiveRating,
  InvalidArgument,
  InvalidTransition,
  NoRoute,
  UnreachableFile,
  UnknownFile,
  DuplicateLink,
  DuplicateEntry,
  UnknownResource,
  UnknownEntry,
  NegativeCredit,
  UnknownAccount,
  InsufficientFunds,
  Syntax,
  UndeclaredPlaceholder,
  EmptyDomain,
  DuplicateParameter,
  Arithmetic,
  NoCandidates,
  DeadlineInfeasible,
  BudgetInfeasible,
  InsufficientCredit,
  PastDeadline,
  InfeasibleShares,
  InstanceTooLarge,
  ReplayError,
};

constexpr std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::TimeInPast: return "time-in-past";
    case Errc::UnknownTarget: return "unknown-target";
    case Errc::NonpositiveRating: return "nonpositive-rating";
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::InvalidTransition: return "invalid-transition";
    case Errc::NoRoute: return "no-route";
    case Errc::UnreachableFile: return "unreachable-file";
    case Errc::UnknownFile: return "unknown-file";
    case Errc::DuplicateLink: return "duplicate-link";
    case Errc::DuplicateEntry: return "duplicate-entry";
    case Errc::UnknownResource: return "unknown-resource";
    case Errc::UnknownEntry: return "unknown-entry";
    case Errc::NegativeCredit: return "negative-credit";
    case Errc::UnknownAccount: return "unknown-account";
    case Errc::InsufficientFunds: return "insufficient-funds";
    case Errc::Syntax: return "syntax";
    case Errc::UndeclaredPlaceholder: return "undeclared-placeholder";
    case Errc::EmptyDomain: return "empty-domain";
    case Errc::DuplicateParameter: return "duplicate-parameter";
    case Errc::Arithmetic: return "arithmetic";
    case Errc::NoCandidates: return "no-candidates";
    case Errc::DeadlineInfeasible: return "deadline-infeasible";
    case Errc::BudgetInfeasible: return "budget-infeasible";
    case Errc::InsufficientCredit: return "insufficient-credit";
    case Errc::PastDeadline: return "past-deadline";
    case Errc::InfeasibleShares: return "infeasible-shares";
    case Errc::InstanceTooLarge: return "instance-too-large";
    case Errc::ReplayError: return "replay-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Strongly typed identifiers. Values are dense indices assigned in
// declaration order, so comparing ids compares declaration order.

template <class Tag>
struct Id {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
  constexpr std::size_t index() const { return value; }

  friend constexpr auto operator<=>(Id, Id) = default;
};

using SiteId = Id<struct SiteTag>;
using ResourceId = Id<struct ResourceTag>;
using AccountId = Id<struct AccountTag>;
using JobId = Id<struct JobTag>;
using EntityId = Id<struct EntityTag>;
using EntryId = Id<struct EntryTag>;

// ---------------------------------------------------------------------------
// Money: grid dollars held as integer micro-G$ so that moving credit between
// accounts is exact and the sum of all balances never drifts.

class Money {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Money() = default;

  static constexpr Money from_micros(std::int64_t m) {
    Money out;
    out.micros_ = m;
    return out;
  }

  /// Rounds to the nearest micro-G$.
  static Money from_gd(double gd) {
    if (!std::isfinite(gd)) throw Error(Errc::InvalidArgument, "non-finite amount");
    return from_micros(static_cast<std::int64_t>(std::llround(gd * static_cast<double>(kScale))));
  }

  constexpr std::int64_t micros() const { return micros_; }
  double gd() const { return static_cast<double>(micros_) / static_cast<double>(kScale); }

  constexpr Money& operator+=(Money o) { micros_ += o.micros_; return *this; }
  constexpr Money& operator-=(Money o) { micros_ -= o.micros_; return *this; }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  std::int64_t micros_ = 0;
};

}  // namespace gridbus

template <class Tag>
struct std::hash<gridbus::Id<Tag>> {
  std::size_t operator()(gridbus::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
