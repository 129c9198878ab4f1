#pragma once

#include <string_view>

#include "nc/expr.hpp"

namespace nc {

// Parses the expression grammar:
//
//   expression := term (('+' | '-') term)*
//   term       := factor ('*' factor)*
//   factor     := '-' factor | atom
//   atom       := NUMBER | 'i' | VAR | 'inv' '(' expression ')'
//               | 'exp' '(' expression ')' | '(' expression ')' | matrix
//   matrix     := '[' row (',' row)* ']'
//   row        := '[' expression (',' expression)* ']'
//
// NUMBER is a decimal literal with optional exponent and an optional 'i'
// suffix ("2", "3.5", "2.5e-3i"); 'i' alone is the imaginary unit. VAR is
// x1..xd. There is no power operator and no implicit multiplication.
// Subtraction parses as addition of a negated term.
NcExpr parse(std::string_view text, int nvars);

}  // namespace nc
