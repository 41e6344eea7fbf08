#pragma once

#include "rlp/rational.hpp"

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace rlp {

// First-order terms following the usual Prolog lexical convention: variables
// start with an uppercase letter, constants with lowercase or are numeric,
// '_' is anonymous (matches anything, binds nothing).
struct Term {
  enum class Kind { Number, Symbol, Variable, Anonymous, Compound };

  Kind kind = Kind::Anonymous;
  Rational number;             // Kind::Number
  std::string name;            // symbol, variable or compound functor
  std::vector<Term> args;      // Kind::Compound

  static Term num(Rational v) {
    Term t;
    t.kind = Kind::Number;
    t.number = std::move(v);
    return t;
  }
  static Term sym(std::string s) {
    Term t;
    t.kind = Kind::Symbol;
    t.name = std::move(s);
    return t;
  }
  static Term var(std::string s) {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(s);
    return t;
  }
  static Term anon() { return Term{}; }
  static Term compound(std::string functor, std::vector<Term> as) {
    Term t;
    t.kind = Kind::Compound;
    t.name = std::move(functor);
    t.args = std::move(as);
    return t;
  }

  bool is_ground() const;
  void collect_vars(std::vector<std::string>& out) const;
};

bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

// Total order on ground terms: numbers (by value) < symbols (lexicographic)
// < compounds (arity, functor, args). Variables/anonymous order after, by
// name; they only occur in non-ground contexts such as AST comparisons.
int compare(const Term& a, const Term& b);
inline bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

std::string to_string(const Term& t);

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;
  void collect_vars(std::vector<std::string>& out) const;
};

bool operator==(const Atom& a, const Atom& b);
inline bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
int compare(const Atom& a, const Atom& b);
inline bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }

std::string to_string(const Atom& a);

// Variable -> ground term bindings; applied simultaneously.
using Substitution = std::unordered_map<std::string, Term>;

Term substitute(const Term& t, const Substitution& s);
Atom substitute(const Atom& a, const Substitution& s);

// Match a (possibly non-ground) pattern against a ground term, extending the
// bindings. Returns false and leaves `binds` in an unspecified state on
// mismatch; callers scope a copy or trail.
bool match(const Term& pattern, const Term& ground, Substitution& binds);
bool match(const Atom& pattern, const Atom& ground, Substitution& binds);

// True when `general` subsumes `specific`, i.e. some substitution of
// `general`'s variables yields `specific`. Used for specificity of rule heads
// when two clauses derive the same valued atom.
bool subsumes(const Atom& general, const Atom& specific);

}  // namespace rlp
