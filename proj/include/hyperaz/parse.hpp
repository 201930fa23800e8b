#pragma once

#include <string>
#include <vector>

#include "hyperaz/telescope.hpp"

namespace hyperaz {

// Parse an integrand expression into a validated HyperTerm.
//
// Grammar:
//   expr     := ['-'] term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := base ('^' exponent)?
//   base     := number | ident | '(' expr ')' | 'exp' '(' expr ')'
//   exponent := ['-'] number | '(' expr ')'   -- the latter affine in ep
//               (and, in discrete mode, the parameter)
//
// `ep` denotes the expansion parameter.  Sums are only legal between purely
// rational subexpressions; anything else (and transcendental calls such as
// log) raises NonHyperexponential.  Syntax problems raise ParseError with a
// position.
HyperTerm parse_integrand(const std::string& text, Mode mode,
                          const std::string& param,
                          std::vector<IntVar> intvars);

// Parse a single polynomial expression (no exp, no powers with ep).
MultiPoly parse_polynomial(const std::string& text);

// Pretty operator form of a telescoper, e.g. "(n+1) - (n+2)*N" or
// "2 + x*D_x" (N shifts the parameter, D_x differentiates by it).
std::string operator_str(const Annihilator& ann);

}  // namespace hyperaz
