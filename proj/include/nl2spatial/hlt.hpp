#pragma once

// Hierarchical logical trees (HLTs): the instruction is refined top-down into
// nodes, each labelled with a formula and aligned to byte spans of the
// instruction. A parent label is the operator shell placed over its
// children; siblings may be combined through lateral relations.
//
// Composition rule (compose_hlt), applied bottom-up:
//   * leaf            -> its own label (an atom, possibly under unary operators)
//   * unary shell     -> shell(child) for one child; with several children the
//                        children are first joined by their Boolean lateral
//                        type (bool_and -> And, bool_or -> Or)
//   * And / Or shell  -> And/Or over the children in edge order
//   * U / -> shell    -> exactly two children, (left, right) in edge order
// The composed formula must equal the node label at every node.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nl2spatial/formula.hpp"
#include "nl2spatial/gateway.hpp"
#include "nl2spatial/renderer.hpp"

namespace nl2spatial {

enum class LateralType { bool_and, bool_or, temporal_before, temporal_after };

std::string_view to_string(LateralType t);
LateralType lateral_type_from_string(std::string_view s);  // throws HltFormatError

struct TextSpan {
  std::size_t begin = 0;  // byte offsets, half-open
  std::size_t end = 0;
  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct HltNode {
  std::string id;
  Formula label;
  std::vector<TextSpan> spans;
  int level = 0;
};

struct RefinementEdge {
  std::string parent;
  std::string child;
  friend bool operator==(const RefinementEdge&, const RefinementEdge&) = default;
};

struct LateralRelation {
  std::string from;
  std::string to;
  LateralType type = LateralType::bool_and;
  friend bool operator==(const LateralRelation&, const LateralRelation&) = default;
};

struct Hlt {
  std::string instruction;
  std::string root;
  std::vector<HltNode> nodes;         // insertion order
  std::vector<RefinementEdge> edges;  // edge order fixes child order
  std::vector<LateralRelation> lateral;

  const HltNode* find(std::string_view id) const;
  std::vector<std::string> children_of(std::string_view id) const;
  std::optional<std::string> parent_of(std::string_view id) const;
  // The node's spans cut from the instruction and joined with single spaces.
  std::string span_text(const HltNode& node) const;
  std::vector<std::string> leaves() const;
};

// A label a refinement cannot split further: an atom or a negated atom.
bool is_literal(const Formula& f);

enum class HltIssueKind {
  missing_root,
  duplicate_id,
  unknown_node,
  not_a_tree,
  unreachable_node,
  empty_spans,
  span_out_of_bounds,
  invalid_label,
  level_mismatch,
  label_not_subformula,
  lateral_not_siblings,
  mixed_lateral_types,
  temporal_lateral_under_boolean,
  composition_mismatch,
};

std::string_view to_string(HltIssueKind k);

struct HltIssue {
  HltIssueKind kind;
  std::string node;  // offending node id; empty for tree-wide issues
  std::string detail;
};

struct HltReport {
  std::vector<HltIssue> violations;  // structural problems
  std::vector<HltIssue> warnings;    // loose-but-legal trees (composition differs from the root label)
  bool ok() const { return violations.empty(); }
};

// Structural validation: one root, every node reachable through a unique
// parent, spans inside the instruction, labels well-formed, child labels
// occurring in their parent's label, lateral relations only between siblings.
HltReport validate_hlt(const Hlt& h);

// Throws HltFormatError on structural violations, InconsistentLabelsError or
// MixedLateralTypesError when composition disagrees with the labels.
Formula compose_hlt(const Hlt& h);

// One node per subformula, aligned to the canonical rendering of f (which
// becomes the instruction). Node ids are "n" followed by the dotted path
// ("n" for the root, "n.0.1" ...).
Hlt canonical_hlt(const Formula& f, const RenderOptions& options = {});

// A root-only tree spanning the whole instruction: the starting point of
// expand_frontier.
Hlt seed_hlt(std::string instruction, Formula root_label, std::string root_id = "root");

nlohmann::json hlt_to_json(const Hlt& h);
Hlt hlt_from_json(const nlohmann::json& j);  // throws HltFormatError
Hlt load_hlt(const std::string& path);       // throws IoError / HltFormatError

// --- frontier expansion -----------------------------------------------------

struct Candidate {
  std::string parent;
  std::string id;  // generated when empty
  Formula label;
  std::vector<TextSpan> spans;
  std::vector<LateralRelation> lateral;  // added once both endpoints exist
};

class NodeProposer {
public:
  virtual ~NodeProposer() = default;
  // Proposes children for `node`. Exceptions surface as ProposerFailure.
  virtual std::vector<Candidate> propose(const Hlt& tree, const HltNode& node) = 0;
};

// Replays the children of a reference tree.
class ReplayProposer final : public NodeProposer {
public:
  explicit ReplayProposer(Hlt gold) : gold_(std::move(gold)) {}
  std::vector<Candidate> propose(const Hlt& tree, const HltNode& node) override;

private:
  Hlt gold_;
};

class CallbackProposer final : public NodeProposer {
public:
  using Fn = std::function<std::vector<Candidate>(const Hlt&, const HltNode&)>;
  explicit CallbackProposer(Fn fn) : fn_(std::move(fn)) {}
  std::vector<Candidate> propose(const Hlt& tree, const HltNode& node) override { return fn_(tree, node); }

private:
  Fn fn_;
};

enum class ExpansionStatus { complete, budget_exhausted };

std::string_view to_string(ExpansionStatus s);

struct ExpansionOptions {
  std::size_t budget = 10000;  // maximum number of candidates examined
};

struct RejectedCandidate {
  Candidate candidate;
  std::string reason;
};

struct ExpansionResult {
  Hlt tree;
  ExpansionStatus status = ExpansionStatus::complete;
  std::size_t rounds = 0;
  std::size_t proposals = 0;
  std::vector<RejectedCandidate> rejected;
  std::vector<Hlt> snapshots;  // tree after each round
};

// Breadth-first refinement: each round asks the proposer once for every leaf
// whose label is not a literal, gates every candidate through the alignment
// checker and validate_hlt, and attaches the accepted ones. Stops when the
// tree is complete (all leaves literal and composition reproduces the root
// label) or nothing more can be proposed / the budget runs out, in which case
// the partial tree is returned with status budget_exhausted.
ExpansionResult expand_frontier(Hlt tree, NodeProposer& proposer, AlignmentChecker& checker,
                                const ExpansionOptions& options = {});

}  // namespace nl2spatial
