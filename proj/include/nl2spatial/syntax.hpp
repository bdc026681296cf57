#pragma once

// Canonical machine syntax for formulas.
//
//   formula  := atom
//             | "!" "(" formula ")"
//             | ("G" | "F") interval "(" formula ")"
//             | "(" formula ")"
//             | "(" formula ("&" formula)+ ")"
//             | "(" formula ("|" formula)+ ")"
//             | "(" formula "->" formula ")"
//             | "(" formula "U" interval formula ")"
//   interval := "[" int "," int "]"
//   atom     := keyword "(" ident ("," ident)* ";" number ("," number)* ")"
//
// Whitespace between tokens is ignored on input. The serializer emits a
// single canonical spelling, so serialize(parse(s)) normalizes s.

#include <string>
#include <string_view>

#include "nl2spatial/formula.hpp"

namespace nl2spatial {

// Throws SyntaxError, ArityError, IntervalError or DuplicateArgError.
Formula parse_formula(std::string_view text);

std::string serialize_formula(const Formula& f);

}  // namespace nl2spatial
