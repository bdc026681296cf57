#include "nl2spatial/syntax.hpp"

#include <charconv>
#include <string>
#include <vector>

#include "nl2spatial/errors.hpp"

namespace nl2spatial {

namespace {

class MachineParser {
public:
  explicit MachineParser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail({"end of input"});
    return f;
  }

private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail = {}) const {
    throw SyntaxError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_).starts_with(tok);
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail({"'" + std::string(tok) + "'"});
  }

  std::string_view word() {
    skip_ws();
    auto start = pos_;
    auto is_word = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    };
    while (pos_ < text_.size() && is_word(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::int64_t integer() {
    skip_ws();
    std::int64_t v = 0;
    auto* first = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
    if (ec != std::errc{}) fail({"integer"});
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  double number() {
    skip_ws();
    double v = 0;
    auto* first = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
    if (ec != std::errc{}) fail({"number"});
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  Interval interval() {
    auto start = pos_;
    expect("[");
    Interval w;
    w.lo = integer();
    expect(",");
    w.hi = integer();
    expect("]");
    if (w.lo < 0) throw IntervalError("interval lower bound is negative at offset " + std::to_string(start));
    if (w.lo > w.hi)
      throw IntervalError("interval [" + std::to_string(w.lo) + "," + std::to_string(w.hi) +
                          "] has lower bound above upper bound");
    return w;
  }

  Formula formula() {
    skip_ws();
    if (pos_ >= text_.size()) fail({"formula"});
    if (accept("!")) {
      expect("(");
      Formula inner = formula();
      expect(")");
      return Formula::negation(std::move(inner));
    }
    if (accept("(")) return grouped();

    auto save = pos_;
    auto name = word();
    if (name.empty()) fail({"atom", "'!'", "'('", "'G['", "'F['"});
    if ((name == "G" || name == "F") && peek("[")) {
      auto w = interval();
      expect("(");
      Formula inner = formula();
      expect(")");
      return name == "G" ? Formula::always(w, std::move(inner))
                         : Formula::eventually(w, std::move(inner));
    }
    auto kind = atom_kind_from_keyword(name);
    if (!kind) {
      pos_ = save;
      fail({"atom keyword"}, "unknown predicate '" + std::string(name) + "'");
    }
    return atom(*kind);
  }

  Formula grouped() {
    Formula first = formula();
    if (accept(")")) return first;
    if (peek("&") || peek("|")) {
      const bool conj = peek("&");
      const std::string_view sep = conj ? "&" : "|";
      std::vector<Formula> ops{std::move(first)};
      while (accept(sep)) ops.push_back(formula());
      if (peek("&") || peek("|") || peek("->"))
        fail({"'" + std::string(sep) + "'", "')'"}, "mixed connectives need explicit parentheses");
      expect(")");
      return conj ? Formula::conjunction(std::move(ops)) : Formula::disjunction(std::move(ops));
    }
    if (accept("->")) {
      Formula rhs = formula();
      expect(")");
      return Formula::implication(std::move(first), std::move(rhs));
    }
    if (peek("U")) {
      pos_ += 1;
      auto w = interval();
      Formula rhs = formula();
      expect(")");
      return Formula::until(w, std::move(first), std::move(rhs));
    }
    fail({"'&'", "'|'", "'->'", "'U['", "')'"});
  }

  Formula atom(AtomKind kind) {
    const auto& sig = signature(kind);
    expect("(");
    SpatialAtom a;
    a.kind = kind;
    do {
      auto id = word();
      if (id.empty() || !is_valid_ident_name(id)) fail({"identifier"});
      a.args.emplace_back(std::string(id));
    } while (accept(","));
    if (!accept(";")) {
      if (a.args.size() != sig.ident_count) fail({"','", "';'"});
      fail({"';'"});
    }
    do {
      a.constants.push_back(number());
    } while (accept(","));
    expect(")");
    if (a.args.size() != sig.ident_count || a.constants.size() != sig.constant_count)
      throw ArityError(std::string(sig.keyword) + " takes " + std::to_string(sig.ident_count) +
                       " identifiers and " + std::to_string(sig.constant_count) +
                       " constant(s), got " + std::to_string(a.args.size()) + " and " +
                       std::to_string(a.constants.size()));
    for (std::size_t i = 0; i < a.args.size(); ++i)
      for (std::size_t j = i + 1; j < a.args.size(); ++j)
        if (a.args[i] == a.args[j])
          throw DuplicateArgError(std::string(sig.keyword) + " repeats identifier '" +
                                  a.args[i].name() + "'");
    return Formula::atom(std::move(a));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write(const Formula& f, std::string& out) {
  switch (f.op()) {
    case Op::atom: {
      const auto& a = f.atom_value();
      out += signature(a.kind).keyword;
      out += '(';
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        out += a.args[i].name();
      }
      out += ';';
      for (std::size_t i = 0; i < a.constants.size(); ++i) {
        if (i) out += ',';
        out += format_number(a.constants[i]);
      }
      out += ')';
      return;
    }
    case Op::negation:
      out += "!(";
      write(f.child(0), out);
      out += ')';
      return;
    case Op::always:
    case Op::eventually:
      out += f.op() == Op::always ? "G[" : "F[";
      out += std::to_string(f.window().lo) + "," + std::to_string(f.window().hi) + "](";
      write(f.child(0), out);
      out += ')';
      return;
    case Op::conjunction:
    case Op::disjunction: {
      const char* sep = f.op() == Op::conjunction ? " & " : " | ";
      out += '(';
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        write(f.children()[i], out);
      }
      out += ')';
      return;
    }
    case Op::implication:
      out += '(';
      write(f.child(0), out);
      out += " -> ";
      write(f.child(1), out);
      out += ')';
      return;
    case Op::until:
      out += '(';
      write(f.child(0), out);
      out += " U[" + std::to_string(f.window().lo) + "," + std::to_string(f.window().hi) + "] ";
      write(f.child(1), out);
      out += ')';
      return;
  }
}

}  // namespace

Formula parse_formula(std::string_view text) { return MachineParser(text).parse_all(); }

std::string serialize_formula(const Formula& f) {
  std::string out;
  write(f, out);
  return out;
}

}  // namespace nl2spatial
