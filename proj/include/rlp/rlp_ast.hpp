#pragma once

#include "rlp/logkb.hpp"
#include "rlp/term.hpp"

#include <map>
#include <string>
#include <vector>

namespace rlp::lang {

struct RlpError : std::runtime_error {
  int line = 0;
  int col = 0;
  RlpError(const std::string& msg, int ln = 0, int cl = 0)
      : std::runtime_error(msg), line(ln), col(cl) {}
};

// Logically parameterized arithmetic expression: numbers, atoms (LP
// variables or KB parameters), +,-,*,/ and sum aggregation over a query.
// sum{q} uses set semantics (duplicate substitutions removed), sum<q> keeps
// one copy per derivation.
struct ParExpr {
  enum class Kind { Number, AtomRef, Neg, Add, Sub, Mul, Div, SumSet, SumMulti };

  Kind kind = Kind::Number;
  Rational number;
  Atom atom;
  std::vector<logkb::Literal> query;  // SumSet / SumMulti
  std::vector<ParExpr> kids;

  bool is_sum() const { return kind == Kind::SumSet || kind == Kind::SumMulti; }

  static ParExpr num(Rational v) {
    ParExpr e;
    e.kind = Kind::Number;
    e.number = std::move(v);
    return e;
  }
  static ParExpr ref(Atom a) {
    ParExpr e;
    e.kind = Kind::AtomRef;
    e.atom = std::move(a);
    return e;
  }
  static ParExpr unary(Kind k, ParExpr a) {
    ParExpr e;
    e.kind = k;
    e.kids.push_back(std::move(a));
    return e;
  }
  static ParExpr binary(Kind k, ParExpr a, ParExpr b) {
    ParExpr e;
    e.kind = k;
    e.kids.push_back(std::move(a));
    e.kids.push_back(std::move(b));
    return e;
  }
  static ParExpr sum(Kind k, std::vector<logkb::Literal> q, ParExpr body) {
    ParExpr e;
    e.kind = k;
    e.query = std::move(q);
    e.kids.push_back(std::move(body));
    return e;
  }
};

bool operator==(const ParExpr& a, const ParExpr& b);

struct VarDecl {
  std::string predicate;
  std::size_t arity = 0;
  int line = 0;
};

struct Definition {
  Atom head;
  ParExpr body;
  int line = 0;
};

enum class RelOp { Le, Eq, Ge };

struct ObjectiveTemplate {
  bool maximize = false;
  ParExpr expr;
  int line = 0;
};

struct ConstraintTemplate {
  std::vector<logkb::Literal> index_query;  // set semantics only
  ParExpr lhs;
  RelOp rel = RelOp::Le;
  ParExpr rhs;
  int line = 0;
  int ordinal = 0;     // source order after chain expansion
  std::string label;   // stable name used in row provenance
};

enum class Role { LpVar, Defined, Parameter };

struct RlpModel {
  std::vector<VarDecl> var_decls;
  std::vector<Definition> definitions;
  ObjectiveTemplate objective;
  std::vector<ConstraintTemplate> constraints;

  Role role(const std::string& pred, std::size_t arity) const;
  const VarDecl* var_decl(const std::string& pred, std::size_t arity) const;
};

bool operator==(const RlpModel& a, const RlpModel& b);

// Grammar (UTF-8, '#' line comments):
//   item       := vardecl | definition | objective | constraint
//   vardecl    := "var" ident "/" int ";"
//   definition := atom "=" parexpr ";"
//   objective  := ("maximize"|"maximise"|"minimize"|"minimise") ":" parexpr ";"
//   constraint := "subject to" [ "{" query "}" ] ":"
//                 parexpr REL parexpr [ REL parexpr ] ";"
//   parexpr    := term { ("+"|"-") term } ;  term := factor { ("*"|"/") factor }
//   factor     := number | atom | sumagg | "(" parexpr ")" | "-" factor
//   sumagg     := "sum" ( "{" query "}" | "<" query ">" ) factor
//   REL        := "<=" | ">=" | "="
// Chained double bounds a <= e <= b expand into two constraint templates.
RlpModel parse_rlp(std::string_view text);

// Reparseable source text; parse(print(parse(text))) is AST-identical.
std::string print_rlp(const RlpModel& model);
std::string print_expr(const ParExpr& e);

struct ValidationIssue {
  std::string message;
  int line = 0;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return errors.empty(); }
  std::string str() const;
};

// Checks the model against a knowledge base: parameter predicates must be
// resolvable, objective variables sum-bound, definitions non-recursive,
// index queries safe, constraint variables bound by index query or sums.
ValidationReport validate(const RlpModel& model,
                          const logkb::LogicProgram& program);

// Macro-expands defined predicates at their use sites (validated models
// only; recursion has been excluded). Sum-bound variables of inserted
// bodies are renamed apart where they would capture surrounding names.
RlpModel expand_definitions(const RlpModel& model);

// Flattening pass before grounding: definitions inlined, then sums hoisted
// outward where algebra permits (scalars distribute into sums, sums of
// additive parts split). Ground semantics are preserved.
RlpModel to_prenex(const RlpModel& model);

}  // namespace rlp::lang
