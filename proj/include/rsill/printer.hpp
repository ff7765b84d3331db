#pragma once

#include "rsill/ast.hpp"

namespace rsill {

/// Deterministic rendering; parse_program(pretty_program(sig)) is structurally
/// equal to sig (tail-call spawns re-sugar to `X[..](..) providing s`).
std::string pretty_program(const Signature& sig);

std::string pretty_proc(const ProcPtr& p, int indent = 0);

/// Raw structural equality (no unfolding), the parse/pretty roundtrip contract.
bool structural_equal(const Signature& a, const Signature& b);
bool structural_equal(const TypePtr& a, const TypePtr& b);
bool structural_equal(const ProcPtr& a, const ProcPtr& b);

} // namespace rsill
