#pragma once

// Deterministic controlled-English realization of formulas and its inverse.
//
// Every atom and operator has one fixed template. Operands of negation,
// temporal operators, disjunction and implication are wrapped in "( ... )"
// whenever they are not atoms; conjunction operands are wrapped only when
// they are conjunctions themselves. Two conjuncts are joined by " and ",
// three or more by ", and ". A full rendering is one sentence that starts
// with a capitalized template word (identifiers are never re-cased) and
// ends with ".".

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nl2spatial/formula.hpp"

namespace nl2spatial {

struct RenderOptions {
  // Print constants as their symbols (ε_c, κ, ...) and hide the ones the
  // reference template table leaves implicit. Output is not invertible.
  bool symbolic_constants = false;
  // Interval bounds are step indices; they render as seconds = step / rate.
  double steps_per_second = 1.0;
};

// Half-open byte range of one subformula's clause inside the rendered text.
struct NodeSpan {
  Path path;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct CanonicalText {
  std::string text;
  std::vector<NodeSpan> node_map;  // pre-order, root first
};

CanonicalText render_canonical(const Formula& f, const RenderOptions& options = {});

struct RenderedNode {
  Path path;
  Formula formula;
  CanonicalText text;
};

// One entry per subformula in pre-order, each rendered in isolation.
std::vector<RenderedNode> render_all_nodes(const Formula& f, const RenderOptions& options = {});

// Inverse of render_canonical in numeric mode. Runs of whitespace are
// collapsed before matching and the final period is optional. Throws
// NotCanonicalError at the furthest offset any template could reach.
Formula parse_controlled_english(std::string_view text, const RenderOptions& options = {});

std::string collapse_whitespace(std::string_view text);

}  // namespace nl2spatial
