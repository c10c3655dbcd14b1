#pragma once
// Concrete syntax: lexer, parser, printer.
//
// Types:   X          type variable (capitalized)
//          A -> B     arrow, right associative
//          A & B      conjunction, left nested, binds tighter than ->
//          forall X. A
//
// Terms:   x   x:A    variable, bare occurrences take the nearest binder's
//                     annotation
//          \x:A. r    abstraction, body extends right
//          r s        application, left associative, binds tightest
//          r + s      sum, loosest
//          pi[A](r)   projection
//          /\X. r     type abstraction
//          r {A}      type application
//
// Programs are a sequence of `def name = term ;` followed by an optional
// bare term.  Definitions are inlined textually into later terms.
//
// The Unicode spellings ∧ ⇒ λ Λ π ∀ are accepted on input.  `#` starts a
// line comment.  print_* emit minimally parenthesized ASCII that parses
// back to a structurally identical tree.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpl/term.hpp"
#include "lpl/type.hpp"

namespace lpl {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" +
                           std::to_string(c) + ": " + msg),
        line(l),
        col(c) {}
};

namespace detail {

enum class Tok {
  Ident, Lambda, TLambda, Pi, Forall, Def,
  Arrow, Amp, Plus, Dot, Colon, Semi, Equals,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(std::string src) : src_(std::move(src)) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, col_, msg);
  }

  bool starts_ident(char c) const {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  bool continues_ident(char c) const {
    return starts_ident(c) || (c >= '0' && c <= '9') || c == '\'';
  }

  bool match_bytes(const char* seq, std::size_t n) {
    if (pos_ + n > src_.size()) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (src_[pos_ + i] != seq[i]) return false;
    pos_ += n;
    col_ += 1;  // one display column per alias
    return true;
  }

  void advance() {
    for (;;) {
      while (pos_ < src_.size() &&
             (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' ||
              src_[pos_] == '\n')) {
        if (src_[pos_] == '\n') {
          ++line_;
          col_ = 1;
        } else {
          ++col_;
        }
        ++pos_;
      }
      if (pos_ < src_.size() && src_[pos_] == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    cur_.line = line_;
    cur_.col = col_;
    cur_.text.clear();
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (starts_ident(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && continues_ident(src_[pos_])) {
        ++pos_;
        ++col_;
      }
      cur_.text = src_.substr(start, pos_ - start);
      if (cur_.text == "forall") cur_.kind = Tok::Forall;
      else if (cur_.text == "pi") cur_.kind = Tok::Pi;
      else if (cur_.text == "def") cur_.kind = Tok::Def;
      else cur_.kind = Tok::Ident;
      return;
    }
    switch (c) {
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          pos_ += 2;
          col_ += 2;
          cur_.kind = Tok::Arrow;
          return;
        }
        fail("stray '-'");
      case '/':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\\') {
          pos_ += 2;
          col_ += 2;
          cur_.kind = Tok::TLambda;
          return;
        }
        fail("stray '/'");
      case '\\': ++pos_; ++col_; cur_.kind = Tok::Lambda; return;
      case '&': ++pos_; ++col_; cur_.kind = Tok::Amp; return;
      case '+': ++pos_; ++col_; cur_.kind = Tok::Plus; return;
      case '.': ++pos_; ++col_; cur_.kind = Tok::Dot; return;
      case ':': ++pos_; ++col_; cur_.kind = Tok::Colon; return;
      case ';': ++pos_; ++col_; cur_.kind = Tok::Semi; return;
      case '=': ++pos_; ++col_; cur_.kind = Tok::Equals; return;
      case '(': ++pos_; ++col_; cur_.kind = Tok::LParen; return;
      case ')': ++pos_; ++col_; cur_.kind = Tok::RParen; return;
      case '[': ++pos_; ++col_; cur_.kind = Tok::LBracket; return;
      case ']': ++pos_; ++col_; cur_.kind = Tok::RBracket; return;
      case '{': ++pos_; ++col_; cur_.kind = Tok::LBrace; return;
      case '}': ++pos_; ++col_; cur_.kind = Tok::RBrace; return;
      default: break;
    }
    // Unicode aliases.
    if (match_bytes("\xce\xbb", 2)) { cur_.kind = Tok::Lambda; return; }   // λ
    if (match_bytes("\xce\x9b", 2)) { cur_.kind = Tok::TLambda; return; }  // Λ
    if (match_bytes("\xcf\x80", 2)) { cur_.kind = Tok::Pi; return; }       // π
    if (match_bytes("\xe2\x88\xa7", 3)) { cur_.kind = Tok::Amp; return; }  // ∧
    if (match_bytes("\xe2\x87\x92", 3)) { cur_.kind = Tok::Arrow; return; }  // ⇒
    if (match_bytes("\xe2\x88\x80", 3)) { cur_.kind = Tok::Forall; return; }  // ∀
    fail("unexpected character");
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

}  // namespace detail

struct Program {
  std::vector<std::pair<std::string, Term>> defs;  // inlined, in order
  std::optional<Term> main;
};

namespace detail {

class Parser {
public:
  explicit Parser(std::string src) : lx_(std::move(src)) {}

  Type type_only() {
    Type t = parse_type();
    expect(Tok::End, "end of input");
    return t;
  }

  Term term_only() {
    Term t = parse_term();
    expect(Tok::End, "end of input");
    return t;
  }

  Program program() {
    Program p;
    while (lx_.peek().kind == Tok::Def) {
      lx_.take();
      Token name = expect(Tok::Ident, "definition name");
      if (!is_term_name(name.text))
        fail(name, "definition names start lowercase");
      if (defs_.count(name.text)) fail(name, "redefinition of " + name.text);
      expect(Tok::Equals, "'='");
      Term body = parse_term();
      expect(Tok::Semi, "';'");
      defs_.emplace(name.text, body);
      p.defs.emplace_back(name.text, body);
    }
    if (lx_.peek().kind != Tok::End) p.main = parse_term();
    expect(Tok::End, "end of input");
    return p;
  }

private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }

  Token expect(Tok k, const std::string& what) {
    if (lx_.peek().kind != k)
      fail(lx_.peek(), "expected " + what);
    return lx_.take();
  }

  static bool is_type_name(const std::string& s) {
    return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
  }
  static bool is_term_name(const std::string& s) {
    return !s.empty() && ((s[0] >= 'a' && s[0] <= 'z') || s[0] == '_');
  }

  // ---- types

  Type parse_type() {
    if (lx_.peek().kind == Tok::Forall) {
      lx_.take();
      Token x = expect(Tok::Ident, "type variable");
      if (!is_type_name(x.text)) fail(x, "type variables are capitalized");
      expect(Tok::Dot, "'.'");
      return Type::forall(x.text, parse_type());  // body extends right
    }
    Type left = parse_conj();
    if (lx_.peek().kind == Tok::Arrow) {
      lx_.take();
      return Type::arrow(left, parse_type());  // right associative
    }
    return left;
  }

  Type parse_conj() {
    Type t = parse_type_atom();
    while (lx_.peek().kind == Tok::Amp) {
      lx_.take();
      // A trailing forall extends right: A & forall X. B
      Type rhs = lx_.peek().kind == Tok::Forall ? parse_type() : parse_type_atom();
      t = Type::conj(t, rhs);
    }
    return t;
  }

  Type parse_type_atom() {
    const Token& t = lx_.peek();
    if (t.kind == Tok::Ident) {
      if (!is_type_name(t.text)) fail(t, "type variables are capitalized");
      return Type::var(lx_.take().text);
    }
    if (t.kind == Tok::LParen) {
      lx_.take();
      Type inner = parse_type();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail(t, "expected a type");
  }

  // ---- terms

  Term parse_term() { return parse_sum(); }

  Term parse_sum() {
    Term t = parse_operand();
    while (lx_.peek().kind == Tok::Plus) {
      lx_.take();
      t = Term::sum(t, parse_operand());
    }
    return t;
  }

  // A sum operand; a lambda here swallows the rest of the term.
  Term parse_operand() {
    if (lx_.peek().kind == Tok::Lambda) {
      lx_.take();
      Token x = expect(Tok::Ident, "variable");
      if (!is_term_name(x.text)) fail(x, "term variables start lowercase");
      expect(Tok::Colon, "':'");
      Type ann = parse_type();
      expect(Tok::Dot, "'.'");
      TypedVar binder{x.text, ann};
      binders_.push_back(binder);
      Term body = parse_term();
      binders_.pop_back();
      return Term::lam(binder, body);
    }
    if (lx_.peek().kind == Tok::TLambda) {
      lx_.take();
      Token x = expect(Tok::Ident, "type variable");
      if (!is_type_name(x.text)) fail(x, "type variables are capitalized");
      expect(Tok::Dot, "'.'");
      return Term::tlam(x.text, parse_term());
    }
    return parse_app_chain();
  }

  Term parse_app_chain() {
    Term t = parse_primary();
    for (;;) {
      Tok k = lx_.peek().kind;
      if (k == Tok::Ident || k == Tok::LParen || k == Tok::Pi) {
        t = Term::app(t, parse_primary());
      } else if (k == Tok::LBrace) {
        lx_.take();
        Type a = parse_type();
        expect(Tok::RBrace, "'}'");
        t = Term::tapp(t, a);
      } else {
        return t;
      }
    }
  }

  Term parse_primary() {
    const Token& t = lx_.peek();
    if (t.kind == Tok::Ident) {
      Token name = lx_.take();
      if (!is_term_name(name.text)) fail(name, "term variables start lowercase");
      if (lx_.peek().kind == Tok::Colon) {
        lx_.take();
        return Term::var(name.text, parse_type());
      }
      // Bare occurrence: nearest binder of this name, else a definition.
      for (std::size_t i = binders_.size(); i-- > 0;)
        if (binders_[i].name == name.text) return Term::var(binders_[i]);
      auto it = defs_.find(name.text);
      if (it != defs_.end()) return it->second;
      fail(name, "unbound unannotated variable " + name.text);
    }
    if (t.kind == Tok::LParen) {
      lx_.take();
      Term inner = parse_term();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Pi) {
      lx_.take();
      expect(Tok::LBracket, "'['");
      Type target = parse_type();
      expect(Tok::RBracket, "']'");
      expect(Tok::LParen, "'('");
      Term body = parse_term();
      expect(Tok::RParen, "')'");
      return Term::proj(target, body);
    }
    fail(t, "expected a term");
  }

  Lexer lx_;
  std::vector<TypedVar> binders_;
  std::map<std::string, Term> defs_;
};

}  // namespace detail

inline Type parse_type(const std::string& src) {
  return detail::Parser(src).type_only();
}

inline Term parse_term(const std::string& src) {
  return detail::Parser(src).term_only();
}

inline Program parse_program(const std::string& src) {
  return detail::Parser(src).program();
}

// ---------------------------------------------------------------- printing

namespace detail {

enum class TPos { Top, ArrowDom, ConjLeft, ConjRight };

inline void print_type_into(const Type& t, TPos pos, std::string& out) {
  switch (t.kind()) {
    case TypeKind::Var:
      out += t.name();
      return;
    case TypeKind::Arrow: {
      bool parens = pos != TPos::Top;
      if (parens) out += '(';
      print_type_into(t.domain(), TPos::ArrowDom, out);
      out += "->";
      print_type_into(t.codomain(), TPos::Top, out);
      if (parens) out += ')';
      return;
    }
    case TypeKind::Conj: {
      bool parens = pos == TPos::ArrowDom || pos == TPos::ConjRight;
      if (parens) out += '(';
      print_type_into(t.left(), TPos::ConjLeft, out);
      out += '&';
      print_type_into(t.right(), TPos::ConjRight, out);
      if (parens) out += ')';
      return;
    }
    case TypeKind::Forall: {
      bool parens = pos != TPos::Top;
      if (parens) out += '(';
      out += "forall ";
      out += t.binder();
      out += ". ";
      print_type_into(t.body(), TPos::Top, out);
      if (parens) out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string print_type(const Type& t) {
  std::string out;
  detail::print_type_into(t, detail::TPos::Top, out);
  return out;
}

// Display form of a canonical type: prime spellings joined with " & ".
inline std::string print_canonical(const CanonicalType& c) {
  Type rb = read_back(c);
  std::vector<Type> parts;
  Type cur = rb;
  while (cur.kind() == TypeKind::Conj) {
    parts.push_back(cur.left());
    cur = cur.right();
  }
  parts.push_back(cur);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " & ";
    std::string piece;
    detail::print_type_into(parts[i], parts.size() == 1
                                          ? detail::TPos::Top
                                          : detail::TPos::ConjLeft,
                            piece);
    out += piece;
  }
  return out;
}

namespace detail {

// Where a term appears, for parenthesization.
enum class Ctx { Top, AppFun, AppArg, SumOperand, SumLast };

inline void print_term_into(const Term& t, Ctx ctx,
                            std::vector<TypedVar>& binders, std::string& out);

inline void print_sum_chain(const Term& t, std::vector<TypedVar>& binders,
                            std::string& out) {
  // Left spine of the sum, printed as a flat chain.
  std::vector<Term> ops;
  Term cur = t;
  while (cur.kind() == TermKind::Sum) {
    ops.push_back(cur.right());
    cur = cur.left();
  }
  ops.push_back(cur);
  for (std::size_t i = ops.size(); i-- > 0;) {
    bool last = i == 0;
    print_term_into(ops[i], last ? Ctx::SumLast : Ctx::SumOperand, binders, out);
    if (!last) out += " + ";
  }
}

inline void print_term_into(const Term& t, Ctx ctx,
                            std::vector<TypedVar>& binders, std::string& out) {
  switch (t.kind()) {
    case TermKind::Var: {
      // Bare when the nearest binder of this name has the structurally
      // identical annotation; otherwise spell the annotation.
      bool bare = false;
      for (std::size_t i = binders.size(); i-- > 0;) {
        if (binders[i].name == t.var().name) {
          bare = structurally_equal(binders[i].ann, t.var().ann);
          break;
        }
      }
      out += t.var().name;
      if (!bare) {
        out += ':';
        print_type_into(t.var().ann, TPos::Top, out);
      }
      return;
    }
    case TermKind::Lam:
    case TermKind::TLam: {
      bool parens = ctx == Ctx::AppFun || ctx == Ctx::AppArg ||
                    ctx == Ctx::SumOperand;
      if (parens) out += '(';
      if (t.kind() == TermKind::Lam) {
        out += '\\';
        out += t.binder().name;
        out += ':';
        print_type_into(t.binder().ann, TPos::Top, out);
        out += ". ";
        binders.push_back(t.binder());
        print_term_into(t.body(), Ctx::Top, binders, out);
        binders.pop_back();
      } else {
        out += "/\\";
        out += t.tbinder();
        out += ". ";
        print_term_into(t.body(), Ctx::Top, binders, out);
      }
      if (parens) out += ')';
      return;
    }
    case TermKind::App: {
      bool parens = ctx == Ctx::AppArg;
      if (parens) out += '(';
      print_term_into(t.fun(), Ctx::AppFun, binders, out);
      out += ' ';
      print_term_into(t.arg(), Ctx::AppArg, binders, out);
      if (parens) out += ')';
      return;
    }
    case TermKind::TApp: {
      bool parens = ctx == Ctx::AppArg;
      if (parens) out += '(';
      print_term_into(t.fun(), Ctx::AppFun, binders, out);
      out += " {";
      print_type_into(t.targ(), TPos::Top, out);
      out += '}';
      if (parens) out += ')';
      return;
    }
    case TermKind::Sum: {
      bool parens = ctx != Ctx::Top && ctx != Ctx::SumLast;
      // A sum that is someone's right operand must keep its own parens.
      if (ctx == Ctx::SumOperand || ctx == Ctx::SumLast) parens = true;
      if (parens) out += '(';
      print_sum_chain(t, binders, out);
      if (parens) out += ')';
      return;
    }
    case TermKind::Proj: {
      out += "pi[";
      print_type_into(t.proj_target(), TPos::Top, out);
      out += "](";
      print_term_into(t.body(), Ctx::Top, binders, out);
      out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string print_term(const Term& t) {
  std::vector<TypedVar> binders;
  std::string out;
  detail::print_term_into(t, detail::Ctx::Top, binders, out);
  return out;
}

}  // namespace lpl
