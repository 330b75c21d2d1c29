#pragma once

// Text syntax for differential polynomials, local functionals, operators and Miura maps.
//
//   expr    ::= ["+"|"-"] term (("+"|"-") term)*
//   term    ::= power (("*"|"/") power)*
//   power   ::= primary ["^" digits]
//   primary ::= digits | "u" | "u"digits | "ux" | "uxx" | "uxxx" | "eps" | "D" | ident
//             | "(" expr ")" | "dx(" expr ")"
//   top     ::= expr | "int(" expr ")"
//
// Products compose as operators, so "D*u" is d_x o u; D is only accepted by parse_operator.
// Division is by nonzero numbers only.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "rd/miura.hpp"

namespace rd {

struct ParseOptions {
    // Declared parameters; a bound value is substituted while parsing.
    std::map<std::string, std::optional<Rational>> params;
    Truncation truncation;
};

using Expression = std::variant<DiffPoly, LocalFunctional>;

// SyntaxError (with column) or UnknownParameter on bad input.
Expression parse(std::string_view text, const ParseOptions& options = {});
DiffPoly parse_poly(std::string_view text, const ParseOptions& options = {});
// Accepts "int(...)" or a bare density.
LocalFunctional parse_functional(std::string_view text, const ParseOptions& options = {});
DiffOperator parse_operator(std::string_view text, const ParseOptions& options = {});
// "u -> u + <shift>" or just the shift.
MiuraTransformation parse_miura(std::string_view text, int eps_order, const ParseOptions& options = {});

std::string render(const Expression& e);

} // namespace rd
