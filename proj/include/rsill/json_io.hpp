#pragma once

#include <json.hpp>

#include "rsill/monitor.hpp"
#include "rsill/typecheck.hpp"

namespace rsill {

inline nlohmann::json to_json(const ReportEntry& e) {
  nlohmann::json j;
  j["def"] = e.def;
  j["indices"] = nlohmann::json::object();
  for (const auto& [k, v] : e.indices) j["indices"][k] = v;
  j["status"] = e.ok ? "ok" : "fail";
  if (!e.ok) {
    j["error"] = e.error;
    j["kind"] = e.error_kind;
    if (e.rhs != 0 || e.lhs != 0)
      j["failedInequality"] = std::to_string(e.lhs) + " >= " + std::to_string(e.rhs);
  }
  return j;
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : r.entries) j.push_back(to_json(e));
  return j;
}

inline nlohmann::json to_json(const TraceEvent& ev) {
  return {{"step", ev.step},          {"rule", ev.rule},      {"channels", ev.channels},
          {"workDelta", ev.work_delta}, {"potDelta", ev.pot_delta}, {"weight", ev.weight_after}};
}

inline nlohmann::json trace_summary(const Trace& tr) {
  Totals t = totals(tr.final_config);
  return {{"status", status_name(tr.status)},
          {"totalWork", t.work},
          {"totalPotential", t.potential},
          {"steps", tr.events.size()}};
}

inline nlohmann::json to_json(const BoundReport& r) {
  return {{"initialPotential", r.initial_potential},
          {"finalWork", r.final_work},
          {"slack", r.slack},
          {"status", r.bound_holds ? "ok" : "violation"}};
}

} // namespace rsill
