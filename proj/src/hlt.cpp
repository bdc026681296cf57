#include "nl2spatial/hlt.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "nl2spatial/errors.hpp"
#include "nl2spatial/syntax.hpp"

namespace nl2spatial {

using nlohmann::json;

namespace {

constexpr std::pair<LateralType, std::string_view> kLateralNames[] = {
    {LateralType::bool_and, "bool_and"},
    {LateralType::bool_or, "bool_or"},
    {LateralType::temporal_before, "temporal_before"},
    {LateralType::temporal_after, "temporal_after"},
};

bool is_boolean(LateralType t) { return t == LateralType::bool_and || t == LateralType::bool_or; }

bool occurs_in(const Formula& needle, const Formula& haystack) {
  if (needle == haystack) return true;
  for (const auto& c : haystack.children())
    if (occurs_in(needle, c)) return true;
  return false;
}

Formula rebuild_unary(const Formula& shell, Formula inner) {
  switch (shell.op()) {
    case Op::negation: return Formula::negation(std::move(inner));
    case Op::always: return Formula::always(shell.window(), std::move(inner));
    case Op::eventually: return Formula::eventually(shell.window(), std::move(inner));
    default: throw std::logic_error("not a unary operator");
  }
}

struct Composer {
  const Hlt& h;

  Formula compose(const HltNode& node) const {
    auto kids = h.children_of(node.id);
    if (kids.empty()) return node.label;

    std::vector<Formula> parts;
    std::set<std::string> kid_set(kids.begin(), kids.end());
    for (const auto& k : kids) parts.push_back(compose(*h.find(k)));

    std::set<LateralType> types;
    for (const auto& rel : h.lateral)
      if (kid_set.contains(rel.from) && kid_set.contains(rel.to)) types.insert(rel.type);
    if (types.contains(LateralType::bool_and) && types.contains(LateralType::bool_or))
      throw MixedLateralTypesError("children of " + node.id + " mix bool_and and bool_or relations");
    bool temporal_rel = types.contains(LateralType::temporal_before) || types.contains(LateralType::temporal_after);
    if (temporal_rel && !is_temporal(node.label.op()))
      throw MixedLateralTypesError("temporal lateral relation among children of non-temporal node " + node.id);
    std::optional<LateralType> joiner;
    if (types.contains(LateralType::bool_and)) joiner = LateralType::bool_and;
    if (types.contains(LateralType::bool_or)) joiner = LateralType::bool_or;

    auto mismatch = [&](const std::string& why) {
      return InconsistentLabelsError("node " + node.id + ": " + why);
    };

    Formula composed = node.label;
    switch (node.label.op()) {
      case Op::atom: throw mismatch("an atomic label cannot be refined into children");
      case Op::negation:
      case Op::always:
      case Op::eventually: {
        if (parts.size() == 1) {
          composed = rebuild_unary(node.label, parts[0]);
        } else {
          if (!joiner) throw mismatch("several children under a unary operator need a Boolean lateral relation");
          composed = rebuild_unary(node.label, *joiner == LateralType::bool_and ? Formula::conjunction(parts)
                                                                                : Formula::disjunction(parts));
        }
        break;
      }
      case Op::conjunction:
      case Op::disjunction: {
        bool is_and = node.label.op() == Op::conjunction;
        if (joiner && (*joiner == LateralType::bool_and) != is_and)
          throw mismatch("lateral relation type contradicts the node's connective");
        if (parts.size() < 2) throw mismatch("a connective needs at least two children");
        composed = is_and ? Formula::conjunction(parts) : Formula::disjunction(parts);
        break;
      }
      case Op::implication:
      case Op::until: {
        if (parts.size() != 2) throw mismatch("a binary operator needs exactly two children");
        composed = node.label.op() == Op::until ? Formula::until(node.label.window(), parts[0], parts[1])
                                                : Formula::implication(parts[0], parts[1]);
        break;
      }
    }
    if (composed != node.label)
      throw mismatch("children compose to " + serialize_formula(composed) + " but the label is " +
                     serialize_formula(node.label));
    return composed;
  }
};

std::string path_id(const Path& p) {
  std::string id = "n";
  for (auto i : p) id += "." + std::to_string(i);
  return id;
}

}  // namespace

std::string_view to_string(LateralType t) {
  for (auto [k, n] : kLateralNames)
    if (k == t) return n;
  return "?";
}

LateralType lateral_type_from_string(std::string_view s) {
  for (auto [k, n] : kLateralNames)
    if (n == s) return k;
  throw HltFormatError("unknown lateral relation type '" + std::string(s) + "'");
}

std::string_view to_string(HltIssueKind k) {
  switch (k) {
    case HltIssueKind::missing_root: return "missing_root";
    case HltIssueKind::duplicate_id: return "duplicate_id";
    case HltIssueKind::unknown_node: return "unknown_node";
    case HltIssueKind::not_a_tree: return "not_a_tree";
    case HltIssueKind::unreachable_node: return "unreachable_node";
    case HltIssueKind::empty_spans: return "empty_spans";
    case HltIssueKind::span_out_of_bounds: return "span_out_of_bounds";
    case HltIssueKind::invalid_label: return "invalid_label";
    case HltIssueKind::level_mismatch: return "level_mismatch";
    case HltIssueKind::label_not_subformula: return "label_not_subformula";
    case HltIssueKind::lateral_not_siblings: return "lateral_not_siblings";
    case HltIssueKind::mixed_lateral_types: return "mixed_lateral_types";
    case HltIssueKind::temporal_lateral_under_boolean: return "temporal_lateral_under_boolean";
    case HltIssueKind::composition_mismatch: return "composition_mismatch";
  }
  return "?";
}

std::string_view to_string(ExpansionStatus s) {
  return s == ExpansionStatus::complete ? "complete" : "budget_exhausted";
}

const HltNode* Hlt::find(std::string_view id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::vector<std::string> Hlt::children_of(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.parent == id) out.push_back(e.child);
  return out;
}

std::optional<std::string> Hlt::parent_of(std::string_view id) const {
  for (const auto& e : edges)
    if (e.child == id) return e.parent;
  return std::nullopt;
}

std::string Hlt::span_text(const HltNode& node) const {
  std::string out;
  for (const auto& s : node.spans) {
    if (s.end > instruction.size() || s.begin > s.end) continue;
    if (!out.empty()) out += ' ';
    out.append(instruction, s.begin, s.end - s.begin);
  }
  return out;
}

std::vector<std::string> Hlt::leaves() const {
  std::set<std::string> parents;
  for (const auto& e : edges) parents.insert(e.parent);
  std::vector<std::string> out;
  for (const auto& n : nodes)
    if (!parents.contains(n.id)) out.push_back(n.id);
  return out;
}

bool is_literal(const Formula& f) {
  return f.is_atom() || (f.op() == Op::negation && f.child(0).is_atom());
}

HltReport validate_hlt(const Hlt& h) {
  HltReport report;
  auto violate = [&](HltIssueKind k, std::string node, std::string detail) {
    report.violations.push_back({k, std::move(node), std::move(detail)});
  };

  std::map<std::string, const HltNode*> by_id;
  for (const auto& n : h.nodes)
    if (!by_id.emplace(n.id, &n).second) violate(HltIssueKind::duplicate_id, n.id, "node id used twice");
  if (!by_id.contains(h.root)) violate(HltIssueKind::missing_root, h.root, "root id names no node");

  std::map<std::string, std::string> parent;
  for (const auto& e : h.edges) {
    bool known = true;
    for (const auto* id : {&e.parent, &e.child})
      if (!by_id.contains(*id)) {
        violate(HltIssueKind::unknown_node, *id, "edge endpoint names no node");
        known = false;
      }
    if (!known) continue;
    if (e.child == h.root || e.child == e.parent) {
      violate(HltIssueKind::not_a_tree, e.child, "edge points back at the root or at itself");
      continue;
    }
    if (!parent.emplace(e.child, e.parent).second)
      violate(HltIssueKind::not_a_tree, e.child, "node has more than one parent");
  }

  // Depth from the root; nodes never reached sit on cycles or in detached parts.
  std::map<std::string, int> depth;
  if (by_id.contains(h.root)) {
    std::vector<std::string> queue{h.root};
    depth[h.root] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (const auto& c : h.children_of(queue[i]))
        if (by_id.contains(c) && parent[c] == queue[i] && !depth.contains(c)) {
          depth[c] = depth[queue[i]] + 1;
          queue.push_back(c);
        }
  }

  for (const auto& n : h.nodes) {
    if (by_id.contains(h.root) && !depth.contains(n.id))
      violate(HltIssueKind::unreachable_node, n.id, "not reachable from the root");
    else if (depth.contains(n.id) && depth[n.id] != n.level)
      violate(HltIssueKind::level_mismatch, n.id,
              "level " + std::to_string(n.level) + " but depth " + std::to_string(depth[n.id]));
    if (n.spans.empty()) violate(HltIssueKind::empty_spans, n.id, "node is aligned to no text");
    for (const auto& s : n.spans)
      if (s.begin >= s.end || s.end > h.instruction.size())
        violate(HltIssueKind::span_out_of_bounds, n.id,
                "span [" + std::to_string(s.begin) + "," + std::to_string(s.end) + ") outside the instruction");
    for (const auto& v : validate_formula(n.label))
      violate(HltIssueKind::invalid_label, n.id, std::string(to_string(v.kind)) + ": " + v.detail);
  }

  for (const auto& [child, par] : parent)
    if (!occurs_in(by_id[child]->label, by_id[par]->label))
      violate(HltIssueKind::label_not_subformula, child, "label does not occur in the label of " + par);

  std::map<std::string, std::set<LateralType>> group_types;
  for (const auto& rel : h.lateral) {
    auto pf = parent.find(rel.from);
    auto pt = parent.find(rel.to);
    if (rel.from == rel.to || pf == parent.end() || pt == parent.end() || pf->second != pt->second) {
      violate(HltIssueKind::lateral_not_siblings, rel.from, "lateral relation to " + rel.to + " is not between siblings");
      continue;
    }
    group_types[pf->second].insert(rel.type);
  }
  for (const auto& [par, types] : group_types) {
    if (types.contains(LateralType::bool_and) && types.contains(LateralType::bool_or))
      violate(HltIssueKind::mixed_lateral_types, par, "children mix bool_and and bool_or");
    bool temporal_rel = std::any_of(types.begin(), types.end(), [](LateralType t) { return !is_boolean(t); });
    if (temporal_rel && !is_temporal(by_id[par]->label.op()))
      violate(HltIssueKind::temporal_lateral_under_boolean, par, "temporal relation among children of a non-temporal node");
  }

  if (report.ok()) {
    try {
      Composer{h}.compose(*by_id[h.root]);
    } catch (const Error& e) {
      report.warnings.push_back({HltIssueKind::composition_mismatch, h.root, e.what()});
    }
  }
  return report;
}

Formula compose_hlt(const Hlt& h) {
  auto report = validate_hlt(h);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw HltFormatError(std::string(to_string(v.kind)) + " at '" + v.node + "': " + v.detail);
  }
  return Composer{h}.compose(*h.find(h.root));
}

Hlt canonical_hlt(const Formula& f, const RenderOptions& options) {
  auto ct = render_canonical(f, options);
  Hlt h;
  h.instruction = ct.text;
  h.root = path_id({});
  auto subs = subformulas(f);
  for (std::size_t k = 0; k < subs.size(); ++k) {
    const auto& [path, sub] = subs[k];
    const auto& span = ct.node_map[k];
    h.nodes.push_back({path_id(path), sub, {{span.begin, span.end}}, static_cast<int>(path.size())});
    if (!path.empty()) {
      Path par(path.begin(), path.end() - 1);
      h.edges.push_back({path_id(par), path_id(path)});
    }
    auto kids = sub.children();
    std::optional<LateralType> rel;
    if (sub.op() == Op::conjunction) rel = LateralType::bool_and;
    if (sub.op() == Op::disjunction) rel = LateralType::bool_or;
    if (sub.op() == Op::until) rel = LateralType::temporal_before;
    if (rel)
      for (std::size_t i = 0; i + 1 < kids.size(); ++i) {
        Path a = path, b = path;
        a.push_back(i);
        b.push_back(i + 1);
        h.lateral.push_back({path_id(a), path_id(b), *rel});
      }
  }
  return h;
}

Hlt seed_hlt(std::string instruction, Formula root_label, std::string root_id) {
  Hlt h;
  h.instruction = std::move(instruction);
  h.root = root_id;
  h.nodes.push_back({std::move(root_id), std::move(root_label), {{0, h.instruction.size()}}, 0});
  return h;
}

json hlt_to_json(const Hlt& h) {
  json nodes = json::array();
  for (const auto& n : h.nodes) {
    json spans = json::array();
    for (const auto& s : n.spans) spans.push_back({s.begin, s.end});
    nodes.push_back({{"id", n.id}, {"formula", serialize_formula(n.label)}, {"spans", spans}, {"level", n.level}});
  }
  json edges = json::array();
  for (const auto& e : h.edges) edges.push_back({{"parent", e.parent}, {"child", e.child}});
  json lateral = json::array();
  for (const auto& r : h.lateral) lateral.push_back({{"from", r.from}, {"to", r.to}, {"type", to_string(r.type)}});
  return {{"instruction", h.instruction}, {"root", h.root}, {"nodes", nodes}, {"edges", edges}, {"lateral", lateral}};
}

Hlt hlt_from_json(const json& j) {
  auto need = [](const json& obj, const char* key, json::value_t type, const std::string& where) -> const json& {
    if (!obj.is_object() || !obj.contains(key))
      throw HltFormatError(where + ": missing field '" + key + "'");
    const auto& v = obj.at(key);
    bool ok = v.type() == type ||
              (type == json::value_t::number_unsigned && v.is_number_integer() && v.get<std::int64_t>() >= 0);
    if (!ok) throw HltFormatError(where + ": field '" + key + "' has the wrong type");
    return v;
  };
  using vt = json::value_t;
  Hlt h;
  h.instruction = need(j, "instruction", vt::string, "hlt").get<std::string>();
  h.root = need(j, "root", vt::string, "hlt").get<std::string>();
  for (const auto& n : need(j, "nodes", vt::array, "hlt")) {
    auto id = need(n, "id", vt::string, "node").get<std::string>();
    auto where = "node '" + id + "'";
    auto text = need(n, "formula", vt::string, where).get<std::string>();
    std::optional<Formula> label;
    try {
      label = parse_formula(text);
    } catch (const Error& e) {
      throw HltFormatError(where + ": bad formula: " + e.what());
    }
    std::vector<TextSpan> spans;
    for (const auto& s : need(n, "spans", vt::array, where)) {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() || !s[1].is_number_unsigned())
        throw HltFormatError(where + ": spans must be [begin,end] pairs of non-negative integers");
      spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
    }
    int level = need(n, "level", vt::number_unsigned, where).get<int>();
    h.nodes.push_back({std::move(id), *label, std::move(spans), level});
  }
  for (const auto& e : need(j, "edges", vt::array, "hlt"))
    h.edges.push_back({need(e, "parent", vt::string, "edge").get<std::string>(),
                       need(e, "child", vt::string, "edge").get<std::string>()});
  if (j.contains("lateral"))
    for (const auto& r : need(j, "lateral", vt::array, "hlt"))
      h.lateral.push_back({need(r, "from", vt::string, "lateral").get<std::string>(),
                           need(r, "to", vt::string, "lateral").get<std::string>(),
                           lateral_type_from_string(need(r, "type", vt::string, "lateral").get<std::string>())});
  return h;
}

Hlt load_hlt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw HltFormatError(path + ": not valid JSON");
  return hlt_from_json(j);
}

std::vector<Candidate> ReplayProposer::propose(const Hlt&, const HltNode& node) {
  std::vector<Candidate> out;
  if (!gold_.find(node.id)) return out;
  auto kids = gold_.children_of(node.id);
  for (const auto& k : kids) {
    const auto* g = gold_.find(k);
    Candidate c{node.id, g->id, g->label, g->spans, {}};
    for (const auto& rel : gold_.lateral)
      if (rel.from == k && std::find(kids.begin(), kids.end(), rel.to) != kids.end()) c.lateral.push_back(rel);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

bool tree_complete(const Hlt& h) {
  for (const auto& id : h.leaves())
    if (!is_literal(h.find(id)->label)) return false;
  try {
    Composer{h}.compose(*h.find(h.root));
  } catch (const Error&) {
    return false;
  }
  return true;
}

// Returns a rejection reason, or nullopt after attaching the candidate.
std::optional<std::string> admit(Hlt& tree, Candidate& c, const HltNode& parent, AlignmentChecker& checker) {
  if (c.parent != parent.id) return "candidate names parent '" + c.parent + "' but was proposed for '" + parent.id + "'";
  if (c.id.empty()) {
    auto n = tree.children_of(parent.id).size() + 1;
    do c.id = parent.id + "." + std::to_string(n++);
    while (tree.find(c.id));
  }
  if (tree.find(c.id)) return "node id '" + c.id + "' already exists";
  if (auto v = validate_formula(c.label); !v.empty()) return "invalid label: " + v.front().detail;
  if (c.spans.empty()) return "candidate is aligned to no text";
  for (const auto& s : c.spans)
    if (s.begin >= s.end || s.end > tree.instruction.size()) return "span outside the instruction";

  HltNode node{c.id, c.label, c.spans, parent.level + 1};
  auto verdict = check_alignment({tree.span_text(node), serialize_formula(c.label)}, checker);
  if (!verdict.accept) return "checker: " + verdict.reason;

  Hlt next = tree;
  next.nodes.push_back(std::move(node));
  next.edges.push_back({parent.id, c.id});
  auto report = validate_hlt(next);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    return "validation: " + std::string(to_string(v.kind)) + ": " + v.detail;
  }
  tree = std::move(next);
  return std::nullopt;
}

}  // namespace

ExpansionResult expand_frontier(Hlt tree, NodeProposer& proposer, AlignmentChecker& checker,
                                const ExpansionOptions& options) {
  if (auto report = validate_hlt(tree); !report.ok()) {
    const auto& v = report.violations.front();
    throw HltFormatError("cannot expand an invalid tree: " + std::string(to_string(v.kind)) + ": " + v.detail);
  }
  ExpansionResult r;
  r.tree = std::move(tree);
  std::set<std::string> asked;

  while (r.proposals < options.budget) {
    std::vector<std::string> frontier;
    for (const auto& id : r.tree.leaves())
      if (!asked.contains(id) && !is_literal(r.tree.find(id)->label)) frontier.push_back(id);
    if (frontier.empty()) break;
    ++r.rounds;

    for (const auto& id : frontier) {
      if (r.proposals >= options.budget) break;
      asked.insert(id);
      HltNode node = *r.tree.find(id);
      std::vector<Candidate> candidates;
      try {
        candidates = proposer.propose(r.tree, node);
      } catch (const ProposerFailure&) {
        throw;
      } catch (const std::exception& e) {
        throw ProposerFailure("proposer failed on node " + id + ": " + e.what());
      }

      std::vector<LateralRelation> deferred;
      for (auto& c : candidates) {
        if (r.proposals >= options.budget) break;
        ++r.proposals;
        if (auto reason = admit(r.tree, c, node, checker))
          r.rejected.push_back({c, *reason});
        else
          deferred.insert(deferred.end(), c.lateral.begin(), c.lateral.end());
      }
      for (const auto& rel : deferred) {
        if (!r.tree.find(rel.from) || !r.tree.find(rel.to)) continue;
        if (std::find(r.tree.lateral.begin(), r.tree.lateral.end(), rel) != r.tree.lateral.end()) continue;
        Hlt next = r.tree;
        next.lateral.push_back(rel);
        if (validate_hlt(next).ok()) r.tree = std::move(next);
      }
    }
    r.snapshots.push_back(r.tree);
  }

  r.status = tree_complete(r.tree) ? ExpansionStatus::complete : ExpansionStatus::budget_exhausted;
  return r;
}

}  // namespace nl2spatial
