#pragma once

#include "rsill/runtime.hpp"
#include "rsill/typecheck.hpp"

namespace rsill {

/// Weight of a configuration: sum of potential and work over all predicates.
Nat weight(const Config& config);

struct MonotoneResult {
  bool ok = true;
  Nat step = 0;      // first violating step (1-based over the weight series)
  Nat before = 0;
  Nat after = 0;
};

/// Scans the weight series of a trace (index 0 = initial weight); reports the
/// first step whose weight exceeds its predecessor.
MonotoneResult check_monotone(const Trace& trace);

/// Same scan over an explicit weight series.
MonotoneResult check_monotone(const std::vector<Nat>& series);

struct BoundReport {
  Nat initial_potential = 0;
  Nat final_work = 0;
  Nat slack = 0;
  RunStatus status = RunStatus::Done;
  bool bound_holds = true;
};

/// Upper-bound corollary on a trace from a run with initial work 0.
BoundReport bound_report(const Trace& trace);

struct DeepCheckResult {
  bool ok = true;
  Nat step = 0;
  std::string message;
};

/// Re-types the configuration after every step (requires snapshots) and
/// checks that the configuration weight agrees with monitor weight.
DeepCheckResult deep_check(const Signature& sig, const Trace& trace, const Metric& metric);

} // namespace rsill
