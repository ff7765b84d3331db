#pragma once

#include <optional>

#include "rsill/types.hpp"

namespace rsill {

struct TypeError : std::runtime_error {
  enum class Kind {
    InsufficientPotential,
    ContextMismatch,
    LabelNotInType,
    LinearityViolation,
    WrongProvidedType,
    DomainViolation,
    UnknownType,
  };

  Kind kind;
  std::string location; // program point path inside the definition body
  std::string detail;   // failed inequality or missing channel, human readable
  Nat lhs = 0, rhs = 0; // both sides of a failed numeric inequality

  TypeError(Kind k, std::string loc, std::string det, Nat l = 0, Nat r = 0)
      : std::runtime_error(loc.empty() ? det : loc + ": " + det),
        kind(k),
        location(std::move(loc)),
        detail(std::move(det)),
        lhs(l),
        rhs(r) {}

  static const char* kind_name(Kind k);
};

/// One recorded step of a typing derivation.
struct DerivStep {
  std::string point;      // program point, e.g. "case s/inc/t.inc"
  std::string context;    // linear context snapshot
  Nat pot_before = 0;
  Nat pot_after = 0;
  std::string rule;       // Fig. 3 rule name
  std::string inequality; // the inequality discharged at this step
};

struct Derivation {
  std::vector<DerivStep> steps;
  std::string conclusion;
};

/// Checks one process definition at a concrete index vector against its
/// declared potential, threading exact residuals through the body.
/// The metric is forced to zero when the definition is cost-free.
/// Throws TypeError; InsufficientPotential carries the failed inequality.
Derivation check_def(const Signature& sig, const ProcDef& def, const Metric& metric,
                     const IndexEnv& index_env);

struct ReportEntry {
  std::string def;
  IndexEnv indices;
  bool ok = true;
  std::string error_kind;
  std::string error;
  Nat lhs = 0, rhs = 0;
};

struct Report {
  std::vector<ReportEntry> entries;
  size_t failures = 0;
  std::optional<ReportEntry> first_failure;

  bool all_ok() const { return failures == 0; }
};

/// Checks every definition over every index vector in its domain with all
/// components <= sample_max. Failures are data, not exceptions.
Report check_signature(const Signature& sig, const Metric& metric, Nat sample_max = 64);

struct UntypeableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least declared potential under which the definition checks at the given
/// indices (all Fig. 3 inequalities are linear in q, so this is a bottom-up
/// fold over the body). Throws UntypeableError on structural failures.
Nat min_potential(const Signature& sig, const std::string& def_name, const IndexEnv& index_env,
                  const Metric& metric);

// Mid-expression checking used by configuration typing: types `expr` with
// declared potential `have` against a concrete provided type and a concrete
// linear context.
struct ExprJudgment {
  std::string provided_name;
  TypePtr provided_type;
  std::vector<std::pair<std::string, TypePtr>> context;
};

void check_expr_judgment(const Signature& sig, const ProcPtr& expr, const ExprJudgment& j,
                         Nat have, const Metric& metric);

struct PreservationError : std::runtime_error {
  std::string predicate;
  PreservationError(std::string pred, const std::string& msg)
      : std::runtime_error(pred + ": " + msg), predicate(std::move(pred)) {}
};

struct Config;

/// Types a runtime configuration: each process with its ledger potential as
/// the declared judgment potential, each message under the cost-free
/// judgment, and returns the weight (sum of potential and work).
/// Throws PreservationError naming the predicate that fails.
Nat typecheck_config(const Signature& sig, const Config& config, const Metric& metric);

} // namespace rsill
