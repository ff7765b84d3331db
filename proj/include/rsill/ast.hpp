#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rsill/pot.hpp"

namespace rsill {

struct SType;
using TypePtr = std::shared_ptr<const SType>;

/// One alternative of an internal or external choice.
struct Branch {
  std::string label;
  PotPtr pot;
  TypePtr cont;
};

/// Resource-annotated session types, provider view.
///   TVar     — reference to a (possibly indexed) type definition
///   IChoice  — +{ l^q : S, ... }   provider sends a label
///   EChoice  — &{ l^q : S, ... }   provider receives a label
///   Tensor   — S *^q T             provider sends a channel of type S
///   Lolli    — S -o^q T            provider receives a channel of type S
///   One      — 1^q                 provider closes
struct SType {
  enum class Kind { TVar, IChoice, EChoice, Tensor, Lolli, One };

  Kind kind;
  std::string name;             // TVar
  std::vector<PotPtr> args;     // TVar index arguments
  std::vector<Branch> branches; // IChoice/EChoice, in source order
  PotPtr pot;                   // Tensor/Lolli/One annotation
  TypePtr payload;              // Tensor/Lolli payload type
  TypePtr cont;                 // Tensor/Lolli continuation

  explicit SType(Kind k) : kind(k) {}

  const Branch* find_branch(const std::string& label) const {
    for (const auto& b : branches)
      if (b.label == label) return &b;
    return nullptr;
  }
};

namespace ty {

TypePtr tvar(std::string name, std::vector<PotPtr> args = {});
TypePtr ichoice(std::vector<Branch> branches);
TypePtr echoice(std::vector<Branch> branches);
TypePtr tensor(PotPtr pot, TypePtr payload, TypePtr cont);
TypePtr lolli(PotPtr pot, TypePtr payload, TypePtr cont);
TypePtr one(PotPtr pot);

} // namespace ty

struct ProcExpr;
using ProcPtr = std::shared_ptr<const ProcExpr>;

/// Process terms. Channel names are source identifiers in definitions and
/// runtime ids (c#0, c#1, ...) once a configuration is executing.
struct ProcExpr {
  enum class Kind { Spawn, Fwd, SendLabel, CaseRecv, SendChan, RecvChan, Close, Wait };

  Kind kind;
  std::string chan;      // subject channel (Fwd: provided side)
  std::string aux;       // Fwd: used side; SendChan: payload; RecvChan/Spawn: bound name
  std::string label;     // SendLabel
  std::string def_name;  // Spawn
  std::vector<PotPtr> index_args;          // Spawn
  std::vector<std::string> chan_args;      // Spawn
  std::vector<std::pair<std::string, ProcPtr>> case_branches; // CaseRecv
  ProcPtr cont;          // absent for Fwd/Close

  explicit ProcExpr(Kind k) : kind(k) {}
};

namespace pe {

ProcPtr spawn(std::string bind, std::string def, std::vector<PotPtr> index_args,
              std::vector<std::string> chan_args, ProcPtr cont);
ProcPtr fwd(std::string provided, std::string used);
ProcPtr send_label(std::string chan, std::string label, ProcPtr cont);
ProcPtr case_recv(std::string chan, std::vector<std::pair<std::string, ProcPtr>> branches);
ProcPtr send_chan(std::string chan, std::string payload, ProcPtr cont);
ProcPtr recv_chan(std::string chan, std::string bind, ProcPtr cont);
ProcPtr close(std::string chan);
ProcPtr wait(std::string chan, ProcPtr cont);

} // namespace pe

/// Renames free channel occurrences of `from` to `to`.
ProcPtr subst_chan(const ProcPtr& p, const std::string& from, const std::string& to);

/// Replaces index variables in every embedded potential expression.
ProcPtr subst_indices(const ProcPtr& p, const IndexEnv& env);

/// Free channel names of a process expression (spawn/recv binders excluded).
void free_channels(const ProcPtr& p, std::set<std::string>& out);

/// Lower bound constraint on one index parameter: var >= bound.
struct Constraint {
  std::string var;
  Nat bound = 0;
};

struct TypeDef {
  std::string name;
  std::vector<std::string> index_params;
  std::vector<Constraint> domain;
  TypePtr body;
};

enum class CostMode { Standard, CostFree };

struct ProcDef {
  std::string name;
  std::vector<std::string> index_params;
  std::vector<Constraint> domain;
  PotPtr potential;
  std::vector<std::pair<std::string, TypePtr>> uses;
  std::pair<std::string, TypePtr> provides;
  CostMode cost_mode = CostMode::Standard;
  ProcPtr body;
};

struct Signature {
  // Source order retained for deterministic printing and reporting.
  std::vector<TypeDef> type_defs;
  std::vector<ProcDef> proc_defs;

  const TypeDef* find_type(const std::string& name) const {
    for (const auto& d : type_defs)
      if (d.name == name) return &d;
    return nullptr;
  }
  const ProcDef* find_proc(const std::string& name) const {
    for (const auto& d : proc_defs)
      if (d.name == name) return &d;
    return nullptr;
  }

  /// Closed process definitions (empty uses) — candidate entry points.
  std::vector<std::string> main_candidates() const {
    std::vector<std::string> out;
    for (const auto& d : proc_defs)
      if (d.uses.empty()) out.push_back(d.name);
    return out;
  }
};

/// Message cost metric (M^label, M^channel, M^close).
struct Metric {
  Nat label_cost = 1;
  Nat channel_cost = 1;
  Nat close_cost = 1;

  static Metric standard() { return {1, 1, 1}; }
  static Metric cost_free() { return {0, 0, 0}; }
};

/// Checks whether env satisfies a definition domain (missing constraints
/// default to var >= 0, which always holds).
bool domain_satisfied(const std::vector<Constraint>& domain, const IndexEnv& env);

} // namespace rsill
