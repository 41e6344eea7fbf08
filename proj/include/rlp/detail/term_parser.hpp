#pragma once

#include "rlp/detail/lexer.hpp"
#include "rlp/logkb.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rlp::detail {

struct ParseFail {
  std::string msg;
  int line;
  int col;
};

// Token-stream helpers shared by the .lkb and .rlp parsers: terms with
// arithmetic, atoms, and query literals.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(const std::string& punct) {
    if (peek().kind == Token::Kind::Punct && peek().text == punct) {
      take();
      return true;
    }
    return false;
  }
  void expect(const std::string& punct) {
    if (!accept(punct)) fail("expected '" + punct + "'");
  }
  bool accept_ident(const std::string& word) {
    if (peek().kind == Token::Kind::Ident && peek().text == word) {
      take();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseFail{msg, peek().line, peek().col};
  }

  static bool is_arith(const std::string& f, std::size_t arity) {
    return (arity == 2 && (f == "+" || f == "-" || f == "*" || f == "/")) ||
           (arity == 1 && f == "-");
  }

  Term term() { return additive(); }

  Atom term_to_atom(Term t) {
    if (t.kind == Term::Kind::Symbol) return Atom{std::move(t.name), {}};
    if (t.kind == Term::Kind::Compound && !is_arith(t.name, t.args.size()))
      return Atom{std::move(t.name), std::move(t.args)};
    fail("expected an atom");
  }

  std::optional<logkb::Builtin::Rel> rel_token() const {
    if (peek().kind != Token::Kind::Punct) return std::nullopt;
    const std::string& s = peek().text;
    using R = logkb::Builtin::Rel;
    if (s == "<") return R::Lt;
    if (s == "<=") return R::Le;
    if (s == ">") return R::Gt;
    if (s == ">=") return R::Ge;
    if (s == "==") return R::Eq;
    if (s == "!=") return R::Ne;
    return std::nullopt;
  }

  // Inside a multiset query `sum < ... >` the closing '>' shadows the
  // greater-than comparison; forbid_gt disables bare '>' there.
  logkb::Literal literal(bool forbid_gt = false) {
    if (peek().kind == Token::Kind::Ident && peek().text == "not") {
      take();
      Term t = primary();
      return logkb::Literal::neg(term_to_atom(std::move(t)));
    }
    Term lhs = term();
    auto rel = rel_token();
    if (rel && forbid_gt && *rel == logkb::Builtin::Rel::Gt) rel = std::nullopt;
    if (rel) {
      take();
      Term rhs = term();
      return logkb::Literal::compare(logkb::Builtin{*rel, std::move(lhs), std::move(rhs)});
    }
    return logkb::Literal::pos(term_to_atom(std::move(lhs)));
  }

  std::vector<logkb::Literal> conjunction(bool forbid_gt = false) {
    std::vector<logkb::Literal> out;
    out.push_back(literal(forbid_gt));
    while (accept(",")) out.push_back(literal(forbid_gt));
    return out;
  }

  Term primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Number:
        return Term::num(take().number);
      case Token::Kind::Variable:
        return Term::var(take().text);
      case Token::Kind::Anon:
        take();
        return Term::anon();
      case Token::Kind::Ident: {
        std::string name = take().text;
        if (accept("(")) {
          std::vector<Term> args;
          args.push_back(term());
          while (accept(",")) args.push_back(term());
          expect(")");
          return Term::compound(std::move(name), std::move(args));
        }
        return Term::sym(std::move(name));
      }
      case Token::Kind::Punct:
        if (t.text == "(") {
          take();
          Term inner = term();
          expect(")");
          return inner;
        }
        fail("expected a term");
      default:
        fail("expected a term");
    }
  }

 private:
  Term additive() {
    Term t = multiplicative();
    while (peek().kind == Token::Kind::Punct &&
           (peek().text == "+" || peek().text == "-")) {
      std::string op = take().text;
      Term rhs = multiplicative();
      t = Term::compound(op, {std::move(t), std::move(rhs)});
    }
    return t;
  }
  Term multiplicative() {
    Term t = unary();
    while (peek().kind == Token::Kind::Punct &&
           (peek().text == "*" || peek().text == "/")) {
      std::string op = take().text;
      Term rhs = unary();
      t = Term::compound(op, {std::move(t), std::move(rhs)});
    }
    return t;
  }
  Term unary() {
    if (peek().kind == Token::Kind::Punct && peek().text == "-") {
      take();
      Term inner = unary();
      if (inner.kind == Term::Kind::Number) {
        inner.number = -inner.number;
        return inner;
      }
      return Term::compound("-", {std::move(inner)});
    }
    return primary();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace rlp::detail
