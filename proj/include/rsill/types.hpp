#pragma once

#include "rsill/ast.hpp"

namespace rsill {

struct TypeOpError : std::runtime_error {
  enum class Kind { UnknownType, DomainViolation, Arity };
  Kind kind;
  TypeOpError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

/// Substitutes index variables throughout a type; closed potential
/// subexpressions reduce to constants.
TypePtr subst_type(const TypePtr& t, const IndexEnv& env);

/// Replaces a type variable by its definition instance, index arguments
/// evaluated under env. Non-variable types are returned unchanged.
/// Throws TypeOpError on unknown names, arity mismatch, or an index vector
/// outside the definition's domain.
TypePtr unfold(const TypePtr& t, const Signature& sig, const IndexEnv& env = {});

/// Unfolds until the head constructor is not a type variable.
TypePtr unfold_head(const TypePtr& t, const Signature& sig, const IndexEnv& env = {});

/// Equirecursive equality on closed types: unfold variables on demand,
/// compare constructors, labels, evaluated potentials and children,
/// memoizing visited pairs to terminate on recursive definitions.
bool type_equal(const TypePtr& a, const TypePtr& b, const Signature& sig);

std::string type_to_string(const TypePtr& t);

} // namespace rsill
