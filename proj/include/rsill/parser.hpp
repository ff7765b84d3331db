#pragma once

#include "rsill/ast.hpp"

namespace rsill {

struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                           msg),
        line(line_),
        col(col_) {}
};

/// Reference resolution / arity failures detected after parsing.
struct ArityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses a .rsill program. Tail calls `X[e..](c..) providing s` desugar to a
/// spawn on a fresh channel (%t0, %t1, ... per definition) followed by a
/// forward. All type and process references are resolved and arity-checked.
Signature parse_program(const std::string& text);

} // namespace rsill
