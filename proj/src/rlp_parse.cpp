#include "rlp/rlp_ast.hpp"

#include "rlp/detail/term_parser.hpp"

#include <algorithm>
#include <sstream>

namespace rlp::lang {

namespace {

using detail::Token;
using detail::TokenCursor;

bool is_objective_keyword(const std::string& s) {
  return s == "maximize" || s == "maximise" || s == "minimize" ||
         s == "minimise";
}

class Parser {
 public:
  explicit Parser(std::string_view text)
      : cur_(detail::Lexer(text, '#').run()) {}

  RlpModel parse() {
    try {
      return parse_items();
    } catch (const detail::ParseFail& f) {
      std::ostringstream os;
      os << "syntax error at line " << f.line << ", col " << f.col << ": "
         << f.msg;
      throw RlpError(os.str(), f.line, f.col);
    }
  }

 private:
  RlpModel parse_items() {
    RlpModel m;
    bool have_objective = false;
    while (!cur_.at_end()) {
      int line = cur_.peek().line;
      if (cur_.accept_ident("var")) {
        vardecl(m, line);
      } else if (cur_.peek().kind == Token::Kind::Ident &&
                 is_objective_keyword(cur_.peek().text)) {
        std::string kw = cur_.take().text;
        cur_.expect(":");
        ParExpr e = parexpr();
        cur_.expect(";");
        if (have_objective)
          throw RlpError("multiple objectives (line " + std::to_string(line) +
                             "); a model has exactly one",
                         line);
        have_objective = true;
        m.objective = {kw == "maximize" || kw == "maximise", std::move(e), line};
      } else if (cur_.peek().kind == Token::Kind::Ident &&
                 cur_.peek().text == "subject") {
        cur_.take();
        if (!cur_.accept_ident("to")) cur_.fail("expected 'to'");
        constraint(m, line);
      } else {
        definition(m, line);
      }
    }
    if (!have_objective)
      throw RlpError("model has no objective; exactly one is required");
    number_constraints(m);
    return m;
  }

  void vardecl(RlpModel& m, int line) {
    if (cur_.peek().kind != Token::Kind::Ident)
      cur_.fail("expected predicate name");
    std::string name = cur_.take().text;
    cur_.expect("/");
    if (cur_.peek().kind != Token::Kind::Number) cur_.fail("expected arity");
    Rational ar = cur_.take().number;
    if (ar.get_den() != 1 || ar < 0)
      cur_.fail("arity must be a non-negative integer");
    std::size_t arity = static_cast<std::size_t>(ar.get_num().get_ui());
    cur_.expect(";");
    for (const VarDecl& d : m.var_decls)
      if (d.predicate == name && d.arity == arity)
        throw RlpError("duplicate declaration of var " + name + "/" +
                           std::to_string(arity) + " (line " +
                           std::to_string(line) + ")",
                       line);
    m.var_decls.push_back({std::move(name), arity, line});
  }

  void definition(RlpModel& m, int line) {
    Term head_term = cur_.primary();
    Atom head = cur_.term_to_atom(std::move(head_term));
    cur_.expect("=");
    ParExpr body = parexpr();
    cur_.expect(";");
    m.definitions.push_back({std::move(head), std::move(body), line});
  }

  void constraint(RlpModel& m, int line) {
    std::vector<logkb::Literal> index;
    if (cur_.accept("{")) {
      index = cur_.conjunction();
      cur_.expect("}");
    }
    cur_.expect(":");
    ParExpr first = parexpr();
    RelOp r1 = relop();
    ParExpr second = parexpr();
    if (auto maybe = try_relop()) {
      // chained double bound: a REL e REL b becomes two templates
      RelOp r2 = *maybe;
      if (r1 == RelOp::Eq || r2 == RelOp::Eq)
        cur_.fail("chained constraints cannot use '='");
      ParExpr third = parexpr();
      cur_.expect(";");
      m.constraints.push_back({index, first, r1, second, line, 0, ""});
      m.constraints.push_back({std::move(index), std::move(second), r2,
                               std::move(third), line, 0, ""});
      return;
    }
    cur_.expect(";");
    m.constraints.push_back(
        {std::move(index), std::move(first), r1, std::move(second), line, 0, ""});
  }

  std::optional<RelOp> try_relop() {
    if (cur_.peek().kind != Token::Kind::Punct) return std::nullopt;
    const std::string& s = cur_.peek().text;
    if (s == "<=") {
      cur_.take();
      return RelOp::Le;
    }
    if (s == ">=") {
      cur_.take();
      return RelOp::Ge;
    }
    if (s == "=") {
      cur_.take();
      return RelOp::Eq;
    }
    return std::nullopt;
  }
  RelOp relop() {
    auto r = try_relop();
    if (!r) cur_.fail("expected '<=', '>=' or '='");
    return *r;
  }

  ParExpr parexpr() {
    ParExpr e = mul_term();
    while (cur_.peek().kind == Token::Kind::Punct &&
           (cur_.peek().text == "+" || cur_.peek().text == "-")) {
      bool add = cur_.take().text == "+";
      ParExpr rhs = mul_term();
      e = ParExpr::binary(add ? ParExpr::Kind::Add : ParExpr::Kind::Sub,
                          std::move(e), std::move(rhs));
    }
    return e;
  }

  ParExpr mul_term() {
    ParExpr e = factor();
    while (cur_.peek().kind == Token::Kind::Punct &&
           (cur_.peek().text == "*" || cur_.peek().text == "/")) {
      bool mul = cur_.take().text == "*";
      ParExpr rhs = factor();
      e = ParExpr::binary(mul ? ParExpr::Kind::Mul : ParExpr::Kind::Div,
                          std::move(e), std::move(rhs));
    }
    return e;
  }

  ParExpr factor() {
    const Token& t = cur_.peek();
    if (t.kind == Token::Kind::Number) return ParExpr::num(cur_.take().number);
    if (t.kind == Token::Kind::Punct && t.text == "-") {
      cur_.take();
      return ParExpr::unary(ParExpr::Kind::Neg, factor());
    }
    if (t.kind == Token::Kind::Punct && t.text == "(") {
      cur_.take();
      ParExpr inner = parexpr();
      cur_.expect(")");
      return inner;
    }
    if (t.kind == Token::Kind::Ident && t.text == "sum") {
      cur_.take();
      bool multiset = false;
      std::vector<logkb::Literal> q;
      if (cur_.accept("{")) {
        q = cur_.conjunction();
        cur_.expect("}");
      } else if (cur_.accept("<")) {
        multiset = true;
        q = cur_.conjunction(/*forbid_gt=*/true);
        cur_.expect(">");
      } else {
        cur_.fail("expected '{' or '<' after sum");
      }
      ParExpr body = factor();
      return ParExpr::sum(
          multiset ? ParExpr::Kind::SumMulti : ParExpr::Kind::SumSet,
          std::move(q), std::move(body));
    }
    if (t.kind == Token::Kind::Ident) {
      Term pt = cur_.primary();
      return ParExpr::ref(cur_.term_to_atom(std::move(pt)));
    }
    cur_.fail("expected a par-expression factor");
  }

  void number_constraints(RlpModel& m) {
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
      m.constraints[i].ordinal = static_cast<int>(i);
      m.constraints[i].label =
          "c" + std::to_string(i) + "@" + std::to_string(m.constraints[i].line);
    }
  }

  TokenCursor cur_;
};

}  // namespace

bool operator==(const ParExpr& a, const ParExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ParExpr::Kind::Number:
      return a.number == b.number;
    case ParExpr::Kind::AtomRef:
      return a.atom == b.atom;
    default:
      break;
  }
  if (a.is_sum()) {
    if (a.query.size() != b.query.size()) return false;
    for (std::size_t i = 0; i < a.query.size(); ++i)
      if (logkb::to_string(a.query[i]) != logkb::to_string(b.query[i]))
        return false;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!(a.kids[i] == b.kids[i])) return false;
  return true;
}

Role RlpModel::role(const std::string& pred, std::size_t arity) const {
  for (const VarDecl& d : var_decls)
    if (d.predicate == pred && d.arity == arity) return Role::LpVar;
  for (const Definition& d : definitions)
    if (d.head.predicate == pred && d.head.arity() == arity)
      return Role::Defined;
  return Role::Parameter;
}

const VarDecl* RlpModel::var_decl(const std::string& pred,
                                  std::size_t arity) const {
  for (const VarDecl& d : var_decls)
    if (d.predicate == pred && d.arity == arity) return &d;
  return nullptr;
}

bool operator==(const RlpModel& a, const RlpModel& b) {
  if (a.var_decls.size() != b.var_decls.size() ||
      a.definitions.size() != b.definitions.size() ||
      a.constraints.size() != b.constraints.size())
    return false;
  for (std::size_t i = 0; i < a.var_decls.size(); ++i)
    if (a.var_decls[i].predicate != b.var_decls[i].predicate ||
        a.var_decls[i].arity != b.var_decls[i].arity)
      return false;
  for (std::size_t i = 0; i < a.definitions.size(); ++i)
    if (!(a.definitions[i].head == b.definitions[i].head &&
          a.definitions[i].body == b.definitions[i].body))
      return false;
  if (!(a.objective.maximize == b.objective.maximize &&
        a.objective.expr == b.objective.expr))
    return false;
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    const auto& x = a.constraints[i];
    const auto& y = b.constraints[i];
    if (x.rel != y.rel || !(x.lhs == y.lhs) || !(x.rhs == y.rhs)) return false;
    if (x.index_query.size() != y.index_query.size()) return false;
    for (std::size_t j = 0; j < x.index_query.size(); ++j)
      if (logkb::to_string(x.index_query[j]) !=
          logkb::to_string(y.index_query[j]))
        return false;
  }
  return true;
}

namespace {

void print_query(std::ostringstream& os, const std::vector<logkb::Literal>& q,
                 char open, char close) {
  os << open;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) os << ", ";
    os << logkb::to_string(q[i]);
  }
  os << close;
}

// Add/Sub < Mul/Div < unary and atomic factors
int prec(const ParExpr& e) {
  switch (e.kind) {
    case ParExpr::Kind::Add:
    case ParExpr::Kind::Sub:
      return 0;
    case ParExpr::Kind::Mul:
    case ParExpr::Kind::Div:
      return 1;
    default:
      return 2;
  }
}

void print_rec(std::ostringstream& os, const ParExpr& e, int min_prec) {
  bool paren = prec(e) < min_prec;
  if (paren) os << "(";
  switch (e.kind) {
    case ParExpr::Kind::Number:
      if (e.number < 0) {
        os << "(" << to_string(e.number) << ")";
      } else {
        os << to_string(e.number);
      }
      break;
    case ParExpr::Kind::AtomRef:
      os << to_string(e.atom);
      break;
    case ParExpr::Kind::Neg:
      os << "-";
      print_rec(os, e.kids[0], 2);
      break;
    case ParExpr::Kind::Add:
      print_rec(os, e.kids[0], 0);
      os << " + ";
      print_rec(os, e.kids[1], 1);
      break;
    case ParExpr::Kind::Sub:
      print_rec(os, e.kids[0], 0);
      os << " - ";
      print_rec(os, e.kids[1], 1);
      break;
    case ParExpr::Kind::Mul:
      print_rec(os, e.kids[0], 1);
      os << " * ";
      print_rec(os, e.kids[1], 2);
      break;
    case ParExpr::Kind::Div:
      print_rec(os, e.kids[0], 1);
      os << " / ";
      print_rec(os, e.kids[1], 2);
      break;
    case ParExpr::Kind::SumSet:
    case ParExpr::Kind::SumMulti: {
      os << "sum ";
      print_query(os, e.query, e.kind == ParExpr::Kind::SumSet ? '{' : '<',
                  e.kind == ParExpr::Kind::SumSet ? '}' : '>');
      os << " ";
      // the grammar binds sum to a single factor
      if (prec(e.kids[0]) < 2) {
        os << "(";
        print_rec(os, e.kids[0], 0);
        os << ")";
      } else {
        print_rec(os, e.kids[0], 2);
      }
      break;
    }
  }
  if (paren) os << ")";
}

}  // namespace

std::string print_expr(const ParExpr& e) {
  std::ostringstream os;
  print_rec(os, e, 0);
  return os.str();
}

std::string print_rlp(const RlpModel& m) {
  std::ostringstream os;
  for (const VarDecl& d : m.var_decls)
    os << "var " << d.predicate << "/" << d.arity << ";\n";
  if (!m.var_decls.empty()) os << "\n";
  for (const Definition& d : m.definitions)
    os << to_string(d.head) << " = " << print_expr(d.body) << ";\n";
  if (!m.definitions.empty()) os << "\n";
  os << (m.objective.maximize ? "maximize" : "minimize") << ": "
     << print_expr(m.objective.expr) << ";\n\n";
  for (const ConstraintTemplate& c : m.constraints) {
    os << "subject to ";
    if (!c.index_query.empty()) {
      print_query(os, c.index_query, '{', '}');
      os << " ";
    }
    os << ": " << print_expr(c.lhs);
    switch (c.rel) {
      case RelOp::Le: os << " <= "; break;
      case RelOp::Eq: os << " = "; break;
      case RelOp::Ge: os << " >= "; break;
    }
    os << print_expr(c.rhs) << ";\n";
  }
  return os.str();
}

RlpModel parse_rlp(std::string_view text) { return Parser(text).parse(); }

}  // namespace rlp::lang
