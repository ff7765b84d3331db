#pragma once

#include "rsill/ast.hpp"
#include "rsill/types.hpp"

namespace rsill {

struct RuntimeError : std::runtime_error {
  enum class Kind { NoSuchMain, MainNotClosed, NegativePotential, ProtocolViolation, NotEnabled };
  Kind kind;
  RuntimeError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

enum class Polarity { ProviderToClient, ClientToProvider };

/// proc(c){w, P} with its dynamic potential ledger.
struct ProcPred {
  int id = 0;
  std::string provides;
  Nat work = 0;
  Nat potential = 0;
  ProcPtr expr;
  CostMode cost_mode = CostMode::Standard;
};

/// msg(c){w, M}. The carrier channel is the one the message provides.
struct MsgPred {
  enum class Kind { Fwd, Label, Chan, Close };

  int id = 0;
  Kind kind = Kind::Close;
  std::string carrier;
  Nat work = 0;
  Nat potential = 0;
  std::string subject; // channel communicated on (Label/Chan); Fwd: provided side
  std::string label;   // Label
  std::string payload; // Chan payload; Fwd: forwarded-to channel
  std::string cont;    // Label/Chan continuation channel
  Polarity polarity = Polarity::ProviderToClient;
};

struct Config {
  std::vector<ProcPred> procs; // insertion-ordered
  std::vector<MsgPred> msgs;
  std::map<std::string, TypePtr> channels; // provider-view protocol state
  Nat fresh_counter = 0;
  int next_pred_id = 0;
  std::string root;

  std::string fresh_chan() { return "c#" + std::to_string(fresh_counter++); }

  const ProcPred* proc_by_id(int id) const;
  const MsgPred* msg_by_id(int id) const;
};

enum class Rule {
  spawn_c, fwd_s, fwd_plus_r, fwd_minus_r,
  plusC_s, plusC_r, withC_s, withC_r,
  tensorC_s, tensorC_r, lolliC_s, lolliC_r,
  oneC_s, oneC_r,
};

const char* rule_name(Rule r);

struct RuleInstance {
  Rule rule;
  int actor = -1;   // acting proc id; -1 for message-to-message fwd absorption
  int msg = -1;     // message premise, if any
  int aux_msg = -1; // fwd absorption into another message
};

struct TraceEvent {
  Nat step = 0;
  std::string rule;
  std::vector<std::string> channels;
  long long work_delta = 0; // change of total work
  long long pot_delta = 0;  // change of total potential
  Nat weight_after = 0;
  std::string label;           // label for choice sends, test instrumentation
  bool sender_cost_free = false;
};

enum class RunStatus { Done, Stuck, Budget };

const char* status_name(RunStatus s);

struct Trace {
  std::vector<TraceEvent> events;
  Config final_config;
  RunStatus status = RunStatus::Done;
  Nat initial_weight = 0;
  // Per-step configuration snapshots (index 0 = initial); kept only when
  // requested, deep re-typing is quadratic in trace length.
  std::vector<Config> snapshots;
};

struct SchedulerSpec {
  enum class Kind { RoundRobin, Random };
  Kind kind = Kind::RoundRobin;
  std::uint64_t seed = 0;

  static SchedulerSpec round_robin() { return {Kind::RoundRobin, 0}; }
  static SchedulerSpec random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

/// Initial configuration: one process with work 0 and the declared potential,
/// providing a root channel consumed by an implicit external client.
Config init_config(const Signature& sig, const std::string& main_name);

/// Every rule instance whose premise multiset is present.
std::vector<RuleInstance> enabled(const Config& config);

/// Applies one rule instance. Throws RuntimeError on ledger underflow or a
/// message/protocol mismatch.
TraceEvent step(Config& config, const RuleInstance& inst, const Signature& sig,
                const Metric& metric);

struct Totals {
  Nat work = 0;
  Nat potential = 0;
};

Totals totals(const Config& config);

Trace run(const Signature& sig, const std::string& main_name, const SchedulerSpec& sched,
          const Metric& metric, Nat max_steps, bool keep_configs = false);

} // namespace rsill
