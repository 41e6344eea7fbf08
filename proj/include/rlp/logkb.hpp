#pragma once

#include "rlp/term.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rlp::logkb {

struct KbError : std::runtime_error {
  enum class Kind {
    Syntax,
    Unstratifiable,
    Unsafe,
    ValueConflict,
    AbsentFact,
    CapExceeded,
    Semantic
  };
  Kind kind;
  int line = 0;
  int col = 0;
  KbError(Kind k, const std::string& msg, int ln = 0, int cl = 0)
      : std::runtime_error(msg), kind(k), line(ln), col(cl) {}
};

struct Builtin {
  enum class Rel { Lt, Le, Gt, Ge, Eq, Ne };
  Rel rel;
  Term lhs, rhs;  // arithmetic trees over numbers and bound variables
};

struct Literal {
  enum class Kind { Positive, Negative, Compare };
  Kind kind = Kind::Positive;
  Atom atom;    // Positive / Negative
  Builtin cmp;  // Compare

  static Literal pos(Atom a) { return {Kind::Positive, std::move(a), {}}; }
  static Literal neg(Atom a) { return {Kind::Negative, std::move(a), {}}; }
  static Literal compare(Builtin b) { return {Kind::Compare, {}, std::move(b)}; }
};

using rlp::to_string;
std::string to_string(const Literal& l);

struct Clause {
  Atom head;
  std::optional<Rational> value;  // p(...) = v [:- body]
  Term raw_value;                 // value expression before constant folding
  std::vector<Literal> body;      // empty for facts
  int index = 0;                  // textual order over the whole program
  int line = 0;

  bool is_fact() const { return body.empty(); }
};

// Predicates are identified by name/arity. A predicate is "valued" when any
// of its clauses carries an explicit `= value`; looking up an absent ground
// atom of a valued predicate is an error, while plain (truth) predicates
// evaluate to 1 when derivable and 0 otherwise.
struct PredInfo {
  std::string name;
  std::size_t arity = 0;
  bool valued = false;
  bool extensional = true;  // facts only, no rules
  int stratum = 0;
};

struct LogicProgram {
  std::vector<Clause> clauses;  // textual order, facts and rules mixed
  std::map<std::pair<std::string, std::size_t>, PredInfo> predicates;
  int num_strata = 1;

  const PredInfo* pred(const std::string& name, std::size_t arity) const {
    auto it = predicates.find({name, arity});
    return it == predicates.end() ? nullptr : &it->second;
  }
};

// Reparseable source text for a parsed program (constants already folded);
// parse(print_logkb(parse(text))) is AST-identical to parse(text).
std::string print_logkb(const LogicProgram& program);

bool operator==(const Clause& a, const Clause& b);

// Grammar (UTF-8, '%' line comments):
//   fact    := atom "." | atom "=" number "."
//   rule    := atom [ "=" number ] ":-" literal { "," literal } "."
//   literal := [ "not" ] atom | term REL term
//   REL     := "<" | "<=" | ">" | ">=" | "==" | "!="
// A 0-ary valued fact such as `n = 20.` defines a named numeric constant;
// occurrences of the symbol inside terms are folded to its value, so
// `state(n-1,n)` parses to `state(19,20)`.
LogicProgram parse_logkb(std::string_view text);

struct FactEntry {
  std::vector<Term> args;
  std::optional<Rational> value;
  long multiplicity = 0;  // distinct (clause, body substitution) derivations
  int clause_index = -1;  // clause that set the value (specificity conflicts)
  bool from_fact = false;
};

struct Relation {
  std::string name;
  std::size_t arity = 0;
  bool valued = false;
  std::vector<FactEntry> rows;  // sorted lexicographically by args

  const FactEntry* find(const std::vector<Term>& args) const;
  // Contiguous range of rows whose first `prefix_len` arguments equal the
  // given prefix.
  std::pair<std::size_t, std::size_t> prefix_range(
      const std::vector<Term>& prefix, std::size_t prefix_len) const;
};

// Immutable once evaluation returns; safe to share across threads for
// read-only queries.
struct MaterializedKb {
  std::map<std::pair<std::string, std::size_t>, Relation> relations;
  const LogicProgram* program = nullptr;

  const Relation* relation(const std::string& name, std::size_t arity) const {
    auto it = relations.find({name, arity});
    return it == relations.end() ? nullptr : &it->second;
  }
  bool holds(const Atom& ground) const;  // present as fact or derived
  std::size_t total_atoms() const;
};

struct EvalOptions {
  long max_atoms = 10'000'000;
};

// Bottom-up semi-naive materialization, stratum by stratum. Deterministic:
// the result depends only on the program text.
MaterializedKb evaluate(const LogicProgram& program, const EvalOptions& opts = {});

// Substitutions over the named (non-anonymous) variables of the conjunction,
// duplicate-free, ordered lexicographically by the bound terms (variables in
// first-appearance order). Unsafe queries (negation or builtin over a
// variable not bound by a preceding positive literal) raise KbError. The
// `seed` pre-binds outer variables, as when a sum query runs inside an
// enclosing grounding context.
std::vector<Substitution> query_set(const MaterializedKb& kb,
                                    const std::vector<Literal>& conjunction,
                                    const Substitution& seed = {});

// Grouped multiset: one entry per distinct substitution with the number of
// derivations (product of atom multiplicities, summed over anonymous-position
// matches). Same ordering as query_set.
std::vector<std::pair<Substitution, long>> query_multiset(
    const MaterializedKb& kb, const std::vector<Literal>& conjunction,
    const Substitution& seed = {});

// Parameter value of a ground atom: explicit fact value, 1 for derivable
// truth atoms, 0 for non-derivable atoms of truth predicates. Raises
// KbError::AbsentFact for missing atoms of valued predicates and for
// predicates unknown to the KB.
Rational lookup_value(const MaterializedKb& kb, const Atom& ground);

// nullopt when the conjunction is safe given the pre-bound variables;
// otherwise a description of the first offending variable.
std::optional<std::string> query_safety_issue(
    const std::vector<Literal>& conjunction,
    std::vector<std::string> pre_bound = {});

}  // namespace rlp::logkb
