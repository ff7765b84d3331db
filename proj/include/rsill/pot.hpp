#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace rsill {

using Nat = std::uint64_t;
using IndexEnv = std::map<std::string, Nat>;

struct PotExpr;
using PotPtr = std::shared_ptr<const PotExpr>;

/// Natural-valued potential / index expressions. All arithmetic stays in the
/// naturals: subtraction truncates at zero and clog(e) = ceil(log2(e + 1)).
struct PotExpr {
  enum class Kind { Const, IVar, Add, Mul, Monus, CLog };

  Kind kind;
  Nat value = 0;         // Const
  std::string name;      // IVar
  PotPtr left, right;    // Add/Mul/Monus; CLog uses left only

  explicit PotExpr(Kind k) : kind(k) {}
};

namespace pot {

PotPtr constant(Nat v);
PotPtr ivar(std::string name);
PotPtr add(PotPtr a, PotPtr b);
PotPtr mul(PotPtr a, PotPtr b);
PotPtr monus(PotPtr a, PotPtr b);
PotPtr clog(PotPtr a);

} // namespace pot

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ceil(log2(n + 1)), computed exactly as the bit length of n.
inline Nat clog_nat(Nat n) { return static_cast<Nat>(std::bit_width(n)); }

/// Evaluates a potential expression under a total index environment.
/// Throws EvalError (unbound index variable) if an IVar is missing.
Nat eval_pot(const PotPtr& e, const IndexEnv& env);

/// Substitutes concrete naturals for index variables; variables missing from
/// env are left in place. The result is fully reduced where closed.
PotPtr subst_pot(const PotPtr& e, const IndexEnv& env);

bool pot_equal(const PotPtr& a, const PotPtr& b);

std::string pot_to_string(const PotPtr& e);

} // namespace rsill
