#include "nl2spatial/formula.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include "nl2spatial/errors.hpp"

namespace nl2spatial {

IdentKind Ident::kind() const noexcept {
  return name_.starts_with("reg_") ? IdentKind::region : IdentKind::object;
}

bool is_valid_ident_name(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front())) return false;
  return std::all_of(name.begin() + 1, name.end(), [&](char c) { return alpha(c) || digit(c); });
}

namespace {

constexpr std::array<AtomSignature, 13> kSignatures = {{
    {"touch", 2, 1},
    {"closeTo", 2, 1},
    {"farFrom", 2, 1},
    {"ovlp", 2, 1},
    {"partOvlp", 2, 2},
    {"enclIn", 2, 1},
    {"leftOf", 2, 1},
    {"rightOf", 2, 1},
    {"above", 2, 1},
    {"below", 2, 1},
    {"betweenPx", 3, 1},
    {"betweenPy", 3, 1},
    {"oriented", 2, 1},
}};

}  // namespace

const AtomSignature& signature(AtomKind kind) noexcept {
  return kSignatures[static_cast<std::size_t>(kind)];
}

std::optional<AtomKind> atom_kind_from_keyword(std::string_view keyword) noexcept {
  for (std::size_t i = 0; i < kSignatures.size(); ++i)
    if (kSignatures[i].keyword == keyword) return static_cast<AtomKind>(i);
  return std::nullopt;
}

SpatialAtom make_atom(AtomKind kind, std::initializer_list<std::string_view> args,
                      std::initializer_list<double> constants) {
  SpatialAtom a;
  a.kind = kind;
  for (auto name : args) a.args.emplace_back(std::string(name));
  a.constants.assign(constants.begin(), constants.end());
  return a;
}

bool is_temporal(Op op) noexcept {
  return op == Op::always || op == Op::eventually || op == Op::until;
}

Formula Formula::atom(SpatialAtom a) {
  auto n = std::make_shared<Node>();
  n->op = Op::atom;
  n->atom = std::move(a);
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->op = Op::negation;
  n->children.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::conjunction(std::vector<Formula> operands) {
  if (operands.size() < 2) throw ArityError("conjunction needs at least two operands");
  auto n = std::make_shared<Node>();
  n->op = Op::conjunction;
  n->children = std::move(operands);
  return Formula(std::move(n));
}

Formula Formula::disjunction(std::vector<Formula> operands) {
  if (operands.size() < 2) throw ArityError("disjunction needs at least two operands");
  auto n = std::make_shared<Node>();
  n->op = Op::disjunction;
  n->children = std::move(operands);
  return Formula(std::move(n));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  auto n = std::make_shared<Node>();
  n->op = Op::implication;
  n->children = {std::move(lhs), std::move(rhs)};
  return Formula(std::move(n));
}

Formula Formula::always(Interval window, Formula f) {
  auto n = std::make_shared<Node>();
  n->op = Op::always;
  n->window = window;
  n->children.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::eventually(Interval window, Formula f) {
  auto n = std::make_shared<Node>();
  n->op = Op::eventually;
  n->window = window;
  n->children.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::until(Interval window, Formula lhs, Formula rhs) {
  auto n = std::make_shared<Node>();
  n->op = Op::until;
  n->window = window;
  n->children = {std::move(lhs), std::move(rhs)};
  return Formula(std::move(n));
}

const SpatialAtom& Formula::atom_value() const {
  if (!node_->atom) throw std::logic_error("atom_value() on a non-atomic formula");
  return *node_->atom;
}

const Interval& Formula::window() const {
  if (!is_temporal(node_->op)) throw std::logic_error("window() on a non-temporal formula");
  return node_->window;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.op != y.op) return false;
  if (x.op == Op::atom) return *x.atom == *y.atom;
  if (is_temporal(x.op) && !(x.window == y.window)) return false;
  return x.children == y.children;
}

namespace {

void collect(const Formula& f, Path& path, std::vector<Subformula>& out) {
  out.push_back({path, f});
  auto kids = f.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    collect(kids[i], path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<Subformula> subformulas(const Formula& f) {
  std::vector<Subformula> out;
  Path path;
  collect(f, path, out);
  return out;
}

const Formula& at_path(const Formula& f, std::span<const std::size_t> path) {
  const Formula* cur = &f;
  for (auto i : path) {
    if (i >= cur->children().size()) throw std::out_of_range("path does not resolve");
    cur = &cur->children()[i];
  }
  return *cur;
}

StructureMetrics structure_metrics(const Formula& f) {
  StructureMetrics m;
  m.depth = 1;
  if (f.is_atom()) {
    m.leaf_count = 1;
    return m;
  }
  m.max_breadth = static_cast<int>(f.children().size());
  for (const auto& c : f.children()) {
    auto cm = structure_metrics(c);
    m.depth = std::max(m.depth, cm.depth + 1);
    m.max_breadth = std::max(m.max_breadth, cm.max_breadth);
    m.leaf_count += cm.leaf_count;
  }
  return m;
}

std::int64_t required_horizon(const Formula& f) {
  std::int64_t inner = 0;
  for (const auto& c : f.children()) inner = std::max(inner, required_horizon(c));
  if (is_temporal(f.op())) return f.window().hi + inner;
  return inner;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::invalid_ident: return "InvalidIdent";
    case ViolationKind::duplicate_arg: return "DuplicateArg";
    case ViolationKind::wrong_ident_count: return "WrongIdentCount";
    case ViolationKind::wrong_constant_count: return "WrongConstantCount";
    case ViolationKind::non_positive_constant: return "NonPositiveConstant";
    case ViolationKind::non_finite_constant: return "NonFiniteConstant";
    case ViolationKind::constant_out_of_range: return "ConstantOutOfRange";
    case ViolationKind::interval_order: return "IntervalOrder";
    case ViolationKind::negative_interval: return "NegativeInterval";
    case ViolationKind::operand_count: return "OperandCount";
  }
  return "Unknown";
}

namespace {

void validate_atom(const SpatialAtom& a, const Path& path, std::vector<Violation>& out) {
  const auto& sig = signature(a.kind);
  if (a.args.size() != sig.ident_count)
    out.push_back({ViolationKind::wrong_ident_count, path,
                   std::string(sig.keyword) + " takes " + std::to_string(sig.ident_count) +
                       " identifiers"});
  if (a.constants.size() != sig.constant_count)
    out.push_back({ViolationKind::wrong_constant_count, path,
                   std::string(sig.keyword) + " takes " + std::to_string(sig.constant_count) +
                       " constants"});
  for (const auto& id : a.args)
    if (!is_valid_ident_name(id.name()))
      out.push_back({ViolationKind::invalid_ident, path, "'" + id.name() + "'"});
  for (std::size_t i = 0; i < a.args.size(); ++i)
    for (std::size_t j = i + 1; j < a.args.size(); ++j)
      if (a.args[i] == a.args[j])
        out.push_back({ViolationKind::duplicate_arg, path, a.args[i].name()});
  for (double c : a.constants) {
    if (!std::isfinite(c))
      out.push_back({ViolationKind::non_finite_constant, path, format_number(c)});
    else if (c <= 0.0)
      out.push_back({ViolationKind::non_positive_constant, path, format_number(c)});
    else if (a.kind == AtomKind::oriented && c > 2.0)
      out.push_back({ViolationKind::constant_out_of_range, path,
                     "orientation tolerance must lie in (0,2]"});
  }
}

void validate_rec(const Formula& f, Path& path, std::vector<Violation>& out) {
  const auto n = f.children().size();
  switch (f.op()) {
    case Op::atom:
      validate_atom(f.atom_value(), path, out);
      return;
    case Op::conjunction:
    case Op::disjunction:
      if (n < 2) out.push_back({ViolationKind::operand_count, path, "needs >= 2 operands"});
      break;
    case Op::negation:
    case Op::always:
    case Op::eventually:
      if (n != 1) out.push_back({ViolationKind::operand_count, path, "needs exactly 1 operand"});
      break;
    case Op::implication:
    case Op::until:
      if (n != 2) out.push_back({ViolationKind::operand_count, path, "needs exactly 2 operands"});
      break;
  }
  if (is_temporal(f.op())) {
    const auto& w = f.window();
    if (w.lo < 0) out.push_back({ViolationKind::negative_interval, path, "lower bound < 0"});
    if (w.lo > w.hi) out.push_back({ViolationKind::interval_order, path, "lower bound > upper bound"});
  }
  auto kids = f.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    validate_rec(kids[i], path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<Violation> validate_formula(const Formula& f) {
  std::vector<Violation> out;
  Path path;
  validate_rec(f, path, out);
  return out;
}

std::vector<Ident> collect_idents(const Formula& f) {
  std::set<Ident> seen;
  for (const auto& s : subformulas(f))
    if (s.formula.is_atom())
      for (const auto& id : s.formula.atom_value().args) seen.insert(id);
  return {seen.begin(), seen.end()};
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), end);
}

}  // namespace nl2spatial
