#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "vset/eqsolve.hpp"

namespace vset {

// Equation-system language:
//
//   system = header eq*
//   header = "index" NAT
//   eq     = IDENT "=" term
//   term   = "1" | "0" | "[" term ("," term)* "]"
//          | "$" IDENT | "<" term ";" term ">"
//
// "#" starts a comment running to end of line. "0" denotes the empty
// tuple solution (a self-loop), "1" the atom, "[...]" a full-arity tuple,
// "$x" a variable, and "<t;u>" a pair padded with "0" at indices ≥ 2.

namespace dsl_detail {

struct Token {
  enum Kind { kIdent, kNat, kEquals, kLBracket, kRBracket, kComma, kLAngle,
              kRAngle, kSemi, kDollar, kEnd };
  Kind kind;
  std::string text;
  int line;
  int col;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Token::Kind k, std::string text) {
    out.push_back({k, std::move(text), line, col});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      push(Token::kNat, std::string(src.substr(i, j - i)));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      push(Token::kIdent, std::string(src.substr(i, j - i)));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '=': push(Token::kEquals, "="); break;
      case '[': push(Token::kLBracket, "["); break;
      case ']': push(Token::kRBracket, "]"); break;
      case ',': push(Token::kComma, ","); break;
      case '<': push(Token::kLAngle, "<"); break;
      case '>': push(Token::kRAngle, ">"); break;
      case ';': push(Token::kSemi, ";"); break;
      case '$': push(Token::kDollar, "$"); break;
      default:
        throw parse_error(std::string("unexpected character '") + c + "'",
                          line, col);
    }
    ++col;
    ++i;
  }
  out.push_back({Token::kEnd, "", line, col});
  return out;
}

struct Ast {
  enum Kind { kAtom, kZero, kTuple, kVar, kPair };
  Kind kind;
  std::string name;        // kVar
  std::vector<Ast> items;  // kTuple / kPair
  int line = 0;
  int col = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::pair<unsigned, std::vector<std::pair<std::string, Ast>>> system() {
    const Token& kw = expect(Token::kIdent, "the header keyword 'index'");
    if (kw.text != "index")
      throw parse_error("expected header 'index N'", kw.line, kw.col);
    const Token& nat = expect(Token::kNat, "the index size");
    if (nat.text.size() > 4)
      throw parse_error("index size out of range", nat.line, nat.col);
    unsigned k = static_cast<unsigned>(std::stoul(nat.text));
    std::vector<std::pair<std::string, Ast>> eqs;
    while (peek().kind != Token::kEnd) {
      const Token& name = expect(Token::kIdent, "an equation name");
      expect(Token::kEquals, "'='");
      eqs.emplace_back(name.text, term());
    }
    return {k, std::move(eqs)};
  }

 private:
  Ast term() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::kNat: {
        ++pos_;
        if (t.text == "0") return {Ast::kZero, "", {}, t.line, t.col};
        if (t.text == "1") return {Ast::kAtom, "", {}, t.line, t.col};
        throw parse_error("expected a term; the only numeric literals are "
                          "'0' and '1'",
                          t.line, t.col);
      }
      case Token::kDollar: {
        ++pos_;
        const Token& name = expect(Token::kIdent, "a variable name");
        return {Ast::kVar, name.text, {}, t.line, t.col};
      }
      case Token::kLBracket: {
        ++pos_;
        std::vector<Ast> items;
        items.push_back(term());
        while (peek().kind == Token::kComma) {
          ++pos_;
          items.push_back(term());
        }
        expect(Token::kRBracket, "']'");
        return {Ast::kTuple, "", std::move(items), t.line, t.col};
      }
      case Token::kLAngle: {
        ++pos_;
        std::vector<Ast> items;
        items.push_back(term());
        expect(Token::kSemi, "';'");
        items.push_back(term());
        expect(Token::kRAngle, "'>'");
        return {Ast::kPair, "", std::move(items), t.line, t.col};
      }
      default:
        throw parse_error("expected a term", t.line, t.col);
    }
  }

  const Token& peek() const { return toks_[pos_]; }

  const Token& expect(Token::Kind k, const std::string& what) {
    const Token& t = toks_[pos_];
    if (t.kind != k)
      throw parse_error("expected " + what, t.line, t.col);
    ++pos_;
    return toks_[pos_ - 1];
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

class Desugarer {
 public:
  Desugarer(const IndexSet& index,
            const std::vector<std::pair<std::string, Ast>>& eqs)
      : index_(index) {
    for (const auto& [name, _] : eqs) defined_.push_back(name);
  }

  TermX top(const Ast& a) const {
    switch (a.kind) {
      case Ast::kAtom:
        return TermX::atom();
      case Ast::kZero:
        return TermX::tuple(std::vector<Leaf>(
            index_.size(), const_leaf(zero_element(index_))));
      case Ast::kTuple:
        return tuple_term(a);
      case Ast::kPair:
        return pair_term(a);
      case Ast::kVar:
        throw parse_error(
            "a bare variable cannot form an equation right-hand side", a.line,
            a.col);
    }
    throw parse_error("expected a term", a.line, a.col);
  }

 private:
  TermX tuple_term(const Ast& a) const {
    if (a.items.size() != index_.size())
      throw parse_error("tuple arity " + std::to_string(a.items.size()) +
                            " does not match index size " +
                            std::to_string(index_.size()),
                        a.line, a.col);
    std::vector<Leaf> slots;
    slots.reserve(a.items.size());
    for (const Ast& item : a.items) slots.push_back(leaf(item));
    return TermX::tuple(std::move(slots));
  }

  TermX pair_term(const Ast& a) const {
    if (index_.size() < 2)
      throw parse_error("pair sugar needs index size at least 2", a.line,
                        a.col);
    std::vector<Leaf> slots;
    slots.push_back(leaf(a.items[0]));
    slots.push_back(leaf(a.items[1]));
    for (unsigned i = 2; i < index_.size(); ++i)
      slots.push_back(const_leaf(zero_element(index_)));
    return TermX::tuple(std::move(slots));
  }

  Leaf leaf(const Ast& a) const {
    switch (a.kind) {
      case Ast::kVar: {
        for (const std::string& d : defined_)
          if (d == a.name) return var_leaf(a.name);
        throw parse_error("unbound variable '" + a.name + "'", a.line, a.col);
      }
      case Ast::kAtom:
        return sub_term(TermX::atom());
      case Ast::kZero:
        return const_leaf(zero_element(index_));
      case Ast::kTuple:
        return sub_term(tuple_term(a));
      case Ast::kPair:
        return sub_term(pair_term(a));
    }
    throw parse_error("expected a term", a.line, a.col);
  }

  const IndexSet& index_;
  std::vector<std::string> defined_;
};

}  // namespace dsl_detail

/// Parses source text into a validated equation system.
inline EquationSystem parse_system(std::string_view text) {
  dsl_detail::Parser parser(dsl_detail::lex(text));
  auto [k, asts] = parser.system();
  if (k < 1) throw parse_error("index size must be at least 1", 1, 1);
  IndexSet index(k);
  dsl_detail::Desugarer de(index, asts);
  std::vector<std::pair<std::string, TermX>> eqs;
  for (const auto& [name, ast] : asts) {
    for (const auto& [seen, _] : eqs)
      if (seen == name)
        throw parse_error("duplicate equation for variable '" + name + "'",
                          ast.line, ast.col);
    eqs.emplace_back(name, de.top(ast));
  }
  return EquationSystem(std::move(index), std::move(eqs));
}

namespace dsl_detail {

inline void render_term(const TermX& t, const IndexSet& index,
                        std::string& out);

inline void render_leaf(const Leaf& l, const IndexSet& index,
                        std::string& out) {
  if (const auto* v = std::get_if<VarLeaf>(&l)) {
    out += "$" + v->name;
  } else if (const auto* s = std::get_if<SubTerm>(&l)) {
    render_term(*s->term, index, out);
  } else {
    const RegularElement& c = std::get<ConstLeaf>(l).value;
    if (c.coalgebra().shape(c.root()).is_atom()) {
      out += "1";
    } else if (bisim(c, zero_element(index)).bisimilar) {
      out += "0";
    } else {
      throw validation_error(
          "constant not expressible in the equation language");
    }
  }
}

inline void render_term(const TermX& t, const IndexSet& index,
                        std::string& out) {
  if (t.is_atom()) {
    out += "1";
    return;
  }
  out += "[";
  for (std::size_t i = 0; i < t.slots().size(); ++i) {
    if (i) out += ", ";
    render_leaf(t.slots()[i], index, out);
  }
  out += "]";
}

}  // namespace dsl_detail

/// Renders a system back to source form. Only systems within the
/// language's reach are renderable: constants other than 0 and 1 are
/// refused.
inline std::string render_system(const EquationSystem& sys) {
  std::string out = "index " + std::to_string(sys.index().size()) + "\n";
  for (const auto& [name, rhs] : sys.equations()) {
    out += name + " = ";
    dsl_detail::render_term(rhs, sys.index(), out);
    out += "\n";
  }
  return out;
}

}  // namespace vset
