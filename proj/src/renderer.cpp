#include "nl2spatial/renderer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "nl2spatial/errors.hpp"

namespace nl2spatial {

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

namespace {

std::string capitalized(std::string_view word) {
  std::string s(word);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string_view symbol_for(AtomKind kind, std::size_t slot) {
  switch (kind) {
    case AtomKind::touch: return "ε";
    case AtomKind::close_to: return "ε_c";
    case AtomKind::far_from: return "ε_f";
    case AtomKind::ovlp: return "τ";
    case AtomKind::part_ovlp: return slot == 0 ? "τ" : "ρ";
    case AtomKind::encl_in: return "ρ";
    default: return "κ";
  }
}

class Writer {
public:
  explicit Writer(const RenderOptions& opts) : opts_(opts) {}

  CanonicalText finish(const Formula& f) {
    clause(f, true);
    out_.text += '.';
    // Until emits its right operand first; lexicographic path order is pre-order.
    std::sort(out_.node_map.begin(), out_.node_map.end(),
              [](const NodeSpan& a, const NodeSpan& b) { return a.path < b.path; });
    return std::move(out_);
  }

private:
  void put(std::string_view s) { out_.text += s; }

  // Template word that opens a clause; capitalized only at sentence start.
  void lead(std::string_view word, bool initial) { put(initial ? capitalized(word) : std::string(word)); }

  std::string constant(const SpatialAtom& a, std::size_t slot) const {
    if (opts_.symbolic_constants) return std::string(symbol_for(a.kind, slot));
    return format_number(a.constants.at(slot));
  }

  void interval(const Interval& w) {
    put("[");
    put(format_number(static_cast<double>(w.lo) / opts_.steps_per_second));
    put(",");
    put(format_number(static_cast<double>(w.hi) / opts_.steps_per_second));
    put("]");
  }

  void atom(const SpatialAtom& a, bool initial) {
    const bool numeric = !opts_.symbolic_constants;
    auto arg = [&](std::size_t k) { put(a.args.at(k).name()); };
    switch (a.kind) {
      case AtomKind::touch:
        arg(0), put(" is in contact with "), arg(1);
        if (numeric) put(" (tolerance " + constant(a, 0) + ")");
        return;
      case AtomKind::close_to:
      case AtomKind::far_from:
        lead("the distance between ", initial);
        arg(0), put(" and "), arg(1);
        put(a.kind == AtomKind::close_to ? " is at most " : " is at least ");
        put(constant(a, 0));
        return;
      case AtomKind::ovlp:
        arg(0), put(" partially overlaps "), arg(1);
        if (numeric) put(" (overlap margin " + constant(a, 0) + ")");
        return;
      case AtomKind::part_ovlp:
        arg(0), put(" overlaps "), arg(1), put(" without containment");
        if (numeric)
          put(" (overlap margin " + constant(a, 0) + ", containment margin " + constant(a, 1) + ")");
        return;
      case AtomKind::encl_in:
        arg(0), put(" lies strictly inside "), arg(1);
        if (numeric) put(" (margin " + constant(a, 0) + ")");
        return;
      case AtomKind::left_of:
      case AtomKind::right_of:
      case AtomKind::above:
      case AtomKind::below: {
        std::string_view rel = a.kind == AtomKind::left_of    ? " is strictly to the left of "
                               : a.kind == AtomKind::right_of ? " is strictly to the right of "
                               : a.kind == AtomKind::above    ? " is strictly above "
                                                              : " is strictly below ";
        arg(0), put(rel), arg(1), put(" (margin " + constant(a, 0) + ")");
        return;
      }
      case AtomKind::between_px:
      case AtomKind::between_py:
        lead("along the ", initial);
        put(a.kind == AtomKind::between_px ? "x-axis, " : "y-axis, ");
        arg(1), put(" lies strictly between "), arg(0), put(" and "), arg(2);
        if (numeric) put(" (margin " + constant(a, 0) + ")");
        return;
      case AtomKind::oriented:
        lead("the heading of ", initial);
        arg(0), put(" is aligned with that of "), arg(1), put(" (within " + constant(a, 0) + ")");
        return;
    }
  }

  void operand(const Formula& f, Path& path) {
    if (f.is_atom()) {
      node(f, false, path);
      return;
    }
    put("( ");
    node(f, false, path);
    put(" )");
  }

  void clause(const Formula& f, bool initial) {
    Path path;
    node(f, initial, path);
  }

  void node(const Formula& f, bool initial, Path& path) {
    auto entry = out_.node_map.size();
    out_.node_map.push_back({path, out_.text.size(), 0});
    auto child = [&](std::size_t i, auto&& emit) {
      path.push_back(i);
      emit(f.child(i));
      path.pop_back();
    };
    auto as_operand = [&](const Formula& c) { operand(c, path); };

    switch (f.op()) {
      case Op::atom:
        atom(f.atom_value(), initial);
        break;
      case Op::negation:
        lead("it is not the case that ", initial);
        child(0, as_operand);
        break;
      case Op::always:
        lead("throughout ", initial);
        interval(f.window());
        put(", ");
        child(0, as_operand);
        put(" holds");
        break;
      case Op::eventually:
        lead("sometime within ", initial);
        interval(f.window());
        put(", ");
        child(0, as_operand);
        put(" holds");
        break;
      case Op::until:
        lead("within ", initial);
        interval(f.window());
        put(", ");
        child(1, as_operand);
        put("; until then, ");
        child(0, as_operand);
        break;
      case Op::disjunction:
        lead("either ", initial);
        for (std::size_t i = 0; i < f.children().size(); ++i) {
          if (i) put(" or ");
          child(i, as_operand);
        }
        put(" holds");
        break;
      case Op::implication:
        lead("if ", initial);
        child(0, as_operand);
        put(" holds, then ");
        child(1, as_operand);
        put(" must hold");
        break;
      case Op::conjunction: {
        const auto n = f.children().size();
        for (std::size_t i = 0; i < n; ++i) {
          if (i) put(n == 2 ? " and " : ", and ");
          child(i, [&](const Formula& c) {
            if (c.op() == Op::conjunction) {
              put("( ");
              node(c, false, path);
              put(" )");
            } else {
              node(c, initial && i == 0, path);
            }
          });
        }
        break;
      }
    }
    out_.node_map[entry].end = out_.text.size();
  }

  const RenderOptions& opts_;
  CanonicalText out_;
};

// Recursive-descent inverse of Writer. Each alternative restores the cursor
// on failure; the furthest failure offset is reported.
class EnglishParser {
public:
  EnglishParser(std::string text, const RenderOptions& opts) : text_(std::move(text)), opts_(opts) {}

  Formula parse() {
    auto f = clause(true);
    if (f) {
      lit(".");
      if (pos_ == text_.size()) return *f;
      fail_here("end of sentence");
    }
    throw NotCanonicalError(furthest_, "expected " + expected_);
  }

private:
  void fail_here(std::string_view what) {
    if (pos_ > furthest_ || expected_.empty()) {
      furthest_ = pos_;
      expected_ = std::string(what);
    }
  }

  bool lit(std::string_view s) {
    if (std::string_view(text_).substr(pos_).starts_with(s)) {
      pos_ += s.size();
      return true;
    }
    fail_here("\"" + std::string(s) + "\"");
    return false;
  }

  bool lead(std::string_view word, bool initial) {
    if (initial) {
      auto cap = capitalized(word);
      if (std::string_view(text_).substr(pos_).starts_with(cap)) {
        pos_ += cap.size();
        return true;
      }
    }
    return lit(word);
  }

  std::optional<Ident> entity() {
    auto is_head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    auto is_tail = [&](char c) { return is_head(c) || (c >= '0' && c <= '9'); };
    auto start = pos_;
    if (pos_ >= text_.size() || !is_head(text_[pos_])) {
      fail_here("identifier");
      return std::nullopt;
    }
    while (pos_ < text_.size() && is_tail(text_[pos_])) ++pos_;
    return Ident(text_.substr(start, pos_ - start));
  }

  // -?digits(.digits)?([eE][+-]?digits)?, never consuming a trailing period.
  std::optional<double> number() {
    auto start = pos_;
    auto digits = [&] {
      auto s = pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      return pos_ > s;
    };
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    if (!digits()) {
      pos_ = start;
      fail_here("number");
      return std::nullopt;
    }
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && text_[pos_ + 1] >= '0' && text_[pos_ + 1] <= '9') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      auto save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (!digits()) pos_ = save;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc{} || ptr != text_.data() + pos_) {
      pos_ = start;
      fail_here("number");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::int64_t> step(double seconds) {
    double steps = seconds * opts_.steps_per_second;
    double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps))) {
      fail_here("interval bound on the step grid");
      return std::nullopt;
    }
    return static_cast<std::int64_t>(rounded);
  }

  std::optional<Interval> interval() {
    if (!lit("[")) return std::nullopt;
    auto lo = number();
    if (!lo || !lit(",")) return std::nullopt;
    auto hi = number();
    if (!hi || !lit("]")) return std::nullopt;
    auto a = step(*lo);
    auto b = step(*hi);
    if (!a || !b) return std::nullopt;
    return Interval{*a, *b};
  }

  std::optional<Formula> make(AtomKind kind, std::vector<Ident> args, std::vector<double> constants) {
    SpatialAtom a;
    a.kind = kind;
    a.args = std::move(args);
    a.constants = std::move(constants);
    return Formula::atom(std::move(a));
  }

  std::optional<Formula> distance_atom(bool initial) {
    if (!lead("the distance between ", initial)) return std::nullopt;
    auto i = entity();
    if (!i || !lit(" and ")) return std::nullopt;
    auto j = entity();
    if (!j) return std::nullopt;
    AtomKind kind;
    if (lit(" is at most "))
      kind = AtomKind::close_to;
    else if (lit(" is at least "))
      kind = AtomKind::far_from;
    else
      return std::nullopt;
    auto c = number();
    if (!c) return std::nullopt;
    return make(kind, {*i, *j}, {*c});
  }

  std::optional<Formula> heading_atom(bool initial) {
    if (!lead("the heading of ", initial)) return std::nullopt;
    auto i = entity();
    if (!i || !lit(" is aligned with that of ")) return std::nullopt;
    auto j = entity();
    if (!j || !lit(" (within ")) return std::nullopt;
    auto c = number();
    if (!c || !lit(")")) return std::nullopt;
    return make(AtomKind::oriented, {*i, *j}, {*c});
  }

  std::optional<Formula> between_atom(bool initial) {
    if (!lead("along the ", initial)) return std::nullopt;
    AtomKind kind;
    if (lit("x-axis, "))
      kind = AtomKind::between_px;
    else if (lit("y-axis, "))
      kind = AtomKind::between_py;
    else
      return std::nullopt;
    auto b = entity();
    if (!b || !lit(" lies strictly between ")) return std::nullopt;
    auto a = entity();
    if (!a || !lit(" and ")) return std::nullopt;
    auto c = entity();
    if (!c || !lit(" (margin ")) return std::nullopt;
    auto k = number();
    if (!k || !lit(")")) return std::nullopt;
    return make(kind, {*a, *b, *c}, {*k});
  }

  // Suffix " (<label> n)" carrying one constant.
  std::optional<double> annotated(std::string_view label) {
    if (!lit(" (") || !lit(label) || !lit(" ")) return std::nullopt;
    auto c = number();
    if (!c || !lit(")")) return std::nullopt;
    return c;
  }

  std::optional<Formula> entity_atom() {
    auto i = entity();
    if (!i) return std::nullopt;
    auto after_subject = pos_;
    auto reset = [&] { pos_ = after_subject; };

    struct Simple {
      std::string_view verb;
      AtomKind kind;
      std::string_view label;
    };
    static constexpr Simple kSimple[] = {
        {" is in contact with ", AtomKind::touch, "tolerance"},
        {" partially overlaps ", AtomKind::ovlp, "overlap margin"},
        {" lies strictly inside ", AtomKind::encl_in, "margin"},
        {" is strictly to the left of ", AtomKind::left_of, "margin"},
        {" is strictly to the right of ", AtomKind::right_of, "margin"},
        {" is strictly above ", AtomKind::above, "margin"},
        {" is strictly below ", AtomKind::below, "margin"},
    };
    for (const auto& s : kSimple) {
      reset();
      if (!lit(s.verb)) continue;
      auto j = entity();
      if (!j) continue;
      auto c = annotated(s.label);
      if (!c) continue;
      return make(s.kind, {*i, *j}, {*c});
    }
    reset();
    if (lit(" overlaps ")) {
      auto j = entity();
      if (j && lit(" without containment") && lit(" (overlap margin ")) {
        auto tau = number();
        if (tau && lit(", containment margin ")) {
          auto rho = number();
          if (rho && lit(")")) return make(AtomKind::part_ovlp, {*i, *j}, {*tau, *rho});
        }
      }
    }
    return std::nullopt;
  }

  std::optional<Formula> atom(bool initial) {
    auto save = pos_;
    for (auto alt : {&EnglishParser::distance_atom, &EnglishParser::heading_atom,
                     &EnglishParser::between_atom}) {
      pos_ = save;
      if (auto f = (this->*alt)(initial)) return f;
    }
    pos_ = save;
    if (auto f = entity_atom()) return f;
    pos_ = save;
    return std::nullopt;
  }

  std::optional<Formula> operand() {
    auto save = pos_;
    if (lit("( ")) {
      auto f = clause(false);
      if (f && lit(" )")) return f;
      pos_ = save;
      return std::nullopt;
    }
    return atom(false);
  }

  std::optional<Formula> negation(bool initial) {
    if (!lead("it is not the case that ", initial)) return std::nullopt;
    auto f = operand();
    if (!f) return std::nullopt;
    return Formula::negation(std::move(*f));
  }

  std::optional<Formula> unary_temporal(bool initial, bool always) {
    if (!lead(always ? "throughout " : "sometime within ", initial)) return std::nullopt;
    auto w = interval();
    if (!w || !lit(", ")) return std::nullopt;
    auto f = operand();
    if (!f || !lit(" holds")) return std::nullopt;
    return always ? Formula::always(*w, std::move(*f)) : Formula::eventually(*w, std::move(*f));
  }

  std::optional<Formula> until(bool initial) {
    if (!lead("within ", initial)) return std::nullopt;
    auto w = interval();
    if (!w || !lit(", ")) return std::nullopt;
    auto rhs = operand();
    if (!rhs || !lit("; until then, ")) return std::nullopt;
    auto lhs = operand();
    if (!lhs) return std::nullopt;
    return Formula::until(*w, std::move(*lhs), std::move(*rhs));
  }

  std::optional<Formula> disjunction(bool initial) {
    if (!lead("either ", initial)) return std::nullopt;
    std::vector<Formula> ops;
    do {
      auto f = operand();
      if (!f) return std::nullopt;
      ops.push_back(std::move(*f));
    } while (lit(" or "));
    if (ops.size() < 2 || !lit(" holds")) return std::nullopt;
    return Formula::disjunction(std::move(ops));
  }

  std::optional<Formula> implication(bool initial) {
    if (!lead("if ", initial)) return std::nullopt;
    auto lhs = operand();
    if (!lhs || !lit(" holds, then ")) return std::nullopt;
    auto rhs = operand();
    if (!rhs || !lit(" must hold")) return std::nullopt;
    return Formula::implication(std::move(*lhs), std::move(*rhs));
  }

  std::optional<Formula> parenthesized() {
    if (!lit("( ")) return std::nullopt;
    auto f = clause(false);
    if (!f || !lit(" )")) return std::nullopt;
    return f;
  }

  std::optional<Formula> unit(bool initial) {
    auto save = pos_;
    if (auto f = parenthesized()) return f;
    pos_ = save;
    if (auto f = negation(initial)) return f;
    pos_ = save;
    if (auto f = unary_temporal(initial, true)) return f;
    pos_ = save;
    if (auto f = unary_temporal(initial, false)) return f;
    pos_ = save;
    if (auto f = until(initial)) return f;
    pos_ = save;
    if (auto f = disjunction(initial)) return f;
    pos_ = save;
    if (auto f = implication(initial)) return f;
    pos_ = save;
    if (auto f = atom(initial)) return f;
    pos_ = save;
    return std::nullopt;
  }

  std::optional<Formula> clause(bool initial) {
    auto first = unit(initial);
    if (!first) return std::nullopt;
    auto save = pos_;
    if (lit(", and ")) {
      std::vector<Formula> ops{std::move(*first)};
      do {
        auto f = unit(false);
        if (!f) {
          pos_ = save;
          return ops.front();
        }
        ops.push_back(std::move(*f));
      } while (lit(", and "));
      return Formula::conjunction(std::move(ops));
    }
    if (lit(" and ")) {
      auto second = unit(false);
      if (second) return Formula::conjunction({std::move(*first), std::move(*second)});
      pos_ = save;
    }
    return first;
  }

  std::string text_;
  const RenderOptions& opts_;
  std::size_t pos_ = 0;
  std::size_t furthest_ = 0;
  std::string expected_;
};

}  // namespace

CanonicalText render_canonical(const Formula& f, const RenderOptions& options) {
  return Writer(options).finish(f);
}

std::vector<RenderedNode> render_all_nodes(const Formula& f, const RenderOptions& options) {
  std::vector<RenderedNode> out;
  for (auto& s : subformulas(f)) out.push_back({s.path, s.formula, render_canonical(s.formula, options)});
  return out;
}

Formula parse_controlled_english(std::string_view text, const RenderOptions& options) {
  return EnglishParser(collapse_whitespace(text), options).parse();
}

}  // namespace nl2spatial
