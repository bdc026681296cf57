#pragma once

// SpaTiaL formula syntax tree.
//
// A Formula is an immutable value: copies share the underlying node, and
// equality is structural (constants compared exactly). Leaves are spatial
// atoms over symbolic identifiers; internal nodes are Boolean connectives or
// bounded temporal operators whose integer bounds count trajectory steps.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nl2spatial {

enum class IdentKind { object, region };

// Symbolic identifier such as `obj_3` or `reg_s`.
class Ident {
public:
  Ident() = default;
  explicit Ident(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  // Regions follow the `reg_` prefix convention; everything else is an object.
  IdentKind kind() const noexcept;

  friend bool operator==(const Ident&, const Ident&) = default;
  friend auto operator<=>(const Ident&, const Ident&) = default;

private:
  std::string name_;
};

bool is_valid_ident_name(std::string_view name) noexcept;

enum class AtomKind {
  touch,
  close_to,
  far_from,
  ovlp,
  part_ovlp,
  encl_in,
  left_of,
  right_of,
  above,
  below,
  between_px,
  between_py,
  oriented,
};

inline constexpr AtomKind kAllAtomKinds[] = {
    AtomKind::touch,      AtomKind::close_to,   AtomKind::far_from, AtomKind::ovlp,
    AtomKind::part_ovlp,  AtomKind::encl_in,    AtomKind::left_of,  AtomKind::right_of,
    AtomKind::above,      AtomKind::below,      AtomKind::between_px,
    AtomKind::between_py, AtomKind::oriented,
};

struct AtomSignature {
  std::string_view keyword;  // canonical machine-syntax name
  std::size_t ident_count;
  std::size_t constant_count;
};

const AtomSignature& signature(AtomKind kind) noexcept;
std::optional<AtomKind> atom_kind_from_keyword(std::string_view keyword) noexcept;

// Lifted spatial predicate. Argument and constant order follow the
// machine syntax: Touch(i,j;eps), PartOvlp(i,j;tau,rho), Between(a,b,c;kappa).
struct SpatialAtom {
  AtomKind kind{};
  std::vector<Ident> args;
  std::vector<double> constants;

  friend bool operator==(const SpatialAtom&, const SpatialAtom&) = default;
};

SpatialAtom make_atom(AtomKind kind, std::initializer_list<std::string_view> args,
                      std::initializer_list<double> constants);

// Closed window [lo, hi] of step offsets.
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Op { atom, negation, conjunction, disjunction, implication, always, eventually, until };

bool is_temporal(Op op) noexcept;

class Formula {
public:
  static Formula atom(SpatialAtom a);
  static Formula negation(Formula f);
  // Throws ArityError for fewer than two operands.
  static Formula conjunction(std::vector<Formula> operands);
  static Formula disjunction(std::vector<Formula> operands);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula always(Interval window, Formula f);
  static Formula eventually(Interval window, Formula f);
  // lhs must hold until rhs becomes true within the window.
  static Formula until(Interval window, Formula lhs, Formula rhs);

  Op op() const noexcept { return node_->op; }
  bool is_atom() const noexcept { return node_->op == Op::atom; }
  const SpatialAtom& atom_value() const;  // only valid for atoms
  const Interval& window() const;         // only valid for temporal operators
  std::span<const Formula> children() const noexcept { return node_->children; }
  const Formula& child(std::size_t i) const { return node_->children.at(i); }

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node {
    Op op{};
    std::optional<SpatialAtom> atom;
    Interval window;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Child-index path from the root; the root itself is the empty path.
using Path = std::vector<std::size_t>;

struct Subformula {
  Path path;
  Formula formula;
};

// Pre-order listing; first entry is ({}, f).
std::vector<Subformula> subformulas(const Formula& f);
const Formula& at_path(const Formula& f, std::span<const std::size_t> path);

struct StructureMetrics {
  int depth = 0;        // layers, counting root and leaves
  int max_breadth = 0;  // largest child count over all nodes
  int leaf_count = 0;

  friend bool operator==(const StructureMetrics&, const StructureMetrics&) = default;
};

StructureMetrics structure_metrics(const Formula& f);

// Number of future steps the formula reads beyond the evaluation instant.
std::int64_t required_horizon(const Formula& f);

enum class ViolationKind {
  invalid_ident,
  duplicate_arg,
  wrong_ident_count,
  wrong_constant_count,
  non_positive_constant,
  non_finite_constant,
  constant_out_of_range,
  interval_order,
  negative_interval,
  operand_count,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  Path path;
  std::string detail;
};

// Empty result means the formula satisfies every syntax-tree invariant.
std::vector<Violation> validate_formula(const Formula& f);

// Idents mentioned anywhere in f, sorted and deduplicated.
std::vector<Ident> collect_idents(const Formula& f);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace nl2spatial
