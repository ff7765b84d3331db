#include "rsill/monitor.hpp"

namespace rsill {

Nat weight(const Config& config) {
  Totals t = totals(config);
  return t.work + t.potential;
}

MonotoneResult check_monotone(const std::vector<Nat>& series) {
  for (size_t i = 1; i < series.size(); ++i) {
    if (series[i] > series[i - 1])
      return {false, static_cast<Nat>(i), series[i - 1], series[i]};
  }
  return {};
}

MonotoneResult check_monotone(const Trace& trace) {
  std::vector<Nat> series;
  series.reserve(trace.events.size() + 1);
  series.push_back(trace.initial_weight);
  for (const auto& ev : trace.events) series.push_back(ev.weight_after);
  return check_monotone(series);
}

BoundReport bound_report(const Trace& trace) {
  BoundReport r;
  r.initial_potential = trace.initial_weight;
  r.final_work = totals(trace.final_config).work;
  r.slack = r.initial_potential > r.final_work ? r.initial_potential - r.final_work : 0;
  r.status = trace.status;
  r.bound_holds = r.initial_potential >= r.final_work;
  return r;
}

DeepCheckResult deep_check(const Signature& sig, const Trace& trace, const Metric& metric) {
  if (trace.snapshots.empty())
    return {false, 0, "trace has no configuration snapshots (run with keep_configs)"};
  for (size_t i = 0; i < trace.snapshots.size(); ++i) {
    const Config& cfg = trace.snapshots[i];
    // The snapshot must carry the weight the trace reported for this step;
    // a ledger edited after the fact shows up here even when it still types.
    if (i <= trace.events.size()) {
      Nat recorded = i == 0 ? trace.initial_weight : trace.events[i - 1].weight_after;
      if (weight(cfg) != recorded)
        return {false, static_cast<Nat>(i),
                "configuration weight " + std::to_string(weight(cfg)) +
                    " disagrees with the recorded trace weight " + std::to_string(recorded)};
    }
    try {
      Nat typed = typecheck_config(sig, cfg, metric);
      if (typed != weight(cfg))
        return {false, static_cast<Nat>(i),
                "configuration weight " + std::to_string(weight(cfg)) +
                    " disagrees with typed weight " + std::to_string(typed)};
    } catch (const PreservationError& e) {
      return {false, static_cast<Nat>(i), e.what()};
    }
  }
  return {};
}

} // namespace rsill
