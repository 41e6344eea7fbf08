#include "rlp/rlp_ast.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rlp::lang {

namespace {

using logkb::Literal;

void collect_query_vars(const std::vector<Literal>& q,
                        std::vector<std::string>& out) {
  for (const Literal& l : q) {
    if (l.kind == Literal::Kind::Compare) {
      l.cmp.lhs.collect_vars(out);
      l.cmp.rhs.collect_vars(out);
    } else {
      l.atom.collect_vars(out);
    }
  }
}

void substitute_query(std::vector<Literal>& q, const Substitution& s) {
  for (Literal& l : q) {
    if (l.kind == Literal::Kind::Compare) {
      l.cmp.lhs = substitute(l.cmp.lhs, s);
      l.cmp.rhs = substitute(l.cmp.rhs, s);
    } else {
      l.atom = substitute(l.atom, s);
    }
  }
}

ParExpr substitute_expr(const ParExpr& e, const Substitution& s) {
  ParExpr out = e;
  if (out.kind == ParExpr::Kind::AtomRef) out.atom = substitute(out.atom, s);
  if (out.is_sum()) substitute_query(out.query, s);
  for (ParExpr& k : out.kids) k = substitute_expr(k, s);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// definition expansion

namespace {

class Expander {
 public:
  explicit Expander(const RlpModel& model) : model_(model) {}

  RlpModel run() {
    RlpModel out = model_;
    out.definitions.clear();
    out.objective.expr = expand(model_.objective.expr);
    for (ConstraintTemplate& c : out.constraints) {
      c.lhs = expand(c.lhs);
      c.rhs = expand(c.rhs);
    }
    return out;
  }

 private:
  ParExpr expand(const ParExpr& e) {
    ParExpr out = e;
    if (out.kind == ParExpr::Kind::AtomRef &&
        model_.role(out.atom.predicate, out.atom.arity()) == Role::Defined) {
      const Definition* def = find_def(out.atom);
      Substitution head_subst;
      for (std::size_t i = 0; i < def->head.args.size(); ++i)
        head_subst.emplace(def->head.args[i].name, out.atom.args[i]);
      return instantiate(def->body, head_subst);
    }
    for (ParExpr& k : out.kids) k = expand(k);
    return out;
  }

  // copy a definition body under the head substitution, renaming its
  // sum-bound variables apart and expanding nested definitions
  ParExpr instantiate(const ParExpr& body, Substitution subst) {
    ParExpr out = body;
    if (out.is_sum()) {
      std::vector<std::string> qvars;
      collect_query_vars(out.query, qvars);
      for (const std::string& v : qvars) {
        if (!subst.count(v))
          subst.emplace(v, Term::var(v + "_" + std::to_string(++fresh_)));
      }
      substitute_query(out.query, subst);
    } else if (out.kind == ParExpr::Kind::AtomRef) {
      out.atom = substitute(out.atom, subst);
      if (model_.role(out.atom.predicate, out.atom.arity()) == Role::Defined)
        return expand(out);
    }
    for (ParExpr& k : out.kids) k = instantiate(k, subst);
    return out;
  }

  const Definition* find_def(const Atom& use) {
    for (const Definition& d : model_.definitions)
      if (d.head.predicate == use.predicate && d.head.arity() == use.arity())
        return &d;
    throw RlpError("no definition for " + to_string(use));
  }

  const RlpModel& model_;
  long fresh_ = 0;
};

}  // namespace

RlpModel expand_definitions(const RlpModel& model) {
  return Expander(model).run();
}

// ---------------------------------------------------------------------------
// prenex flattening

namespace {

struct Quant {
  ParExpr::Kind kind;  // SumSet or SumMulti
  std::vector<Literal> query;
  std::vector<std::string> binds;  // variables this sum newly binds
};

struct Branch {
  std::vector<Quant> quants;  // outermost first
  ParExpr core;               // no hoistable sums at the top level
};

ParExpr rebuild_branch(const Branch& b) {
  ParExpr e = b.core;
  for (auto it = b.quants.rbegin(); it != b.quants.rend(); ++it)
    e = ParExpr::sum(it->kind, it->query, std::move(e));
  return e;
}

ParExpr rebuild(const std::vector<Branch>& branches) {
  ParExpr e = rebuild_branch(branches.front());
  for (std::size_t i = 1; i < branches.size(); ++i)
    e = ParExpr::binary(ParExpr::Kind::Add, std::move(e),
                        rebuild_branch(branches[i]));
  return e;
}

void collect_free_vars(const ParExpr& e, std::vector<std::string>& out) {
  if (e.kind == ParExpr::Kind::AtomRef) e.atom.collect_vars(out);
  if (e.is_sum()) collect_query_vars(e.query, out);
  for (const ParExpr& k : e.kids) collect_free_vars(k, out);
}

class Prenexer {
 public:
  // `bound` holds the variables already in scope (index query and any
  // enclosing sums); only variables a sum newly binds may ever be renamed
  std::vector<Branch> normalize(const ParExpr& e,
                                const std::vector<std::string>& bound) {
    switch (e.kind) {
      case ParExpr::Kind::Number:
      case ParExpr::Kind::AtomRef:
        return {{{}, e}};
      case ParExpr::Kind::Neg: {
        auto bs = normalize(e.kids[0], bound);
        for (Branch& b : bs)
          b.core = ParExpr::unary(ParExpr::Kind::Neg, std::move(b.core));
        return bs;
      }
      case ParExpr::Kind::Add: {
        auto bs = normalize(e.kids[0], bound);
        auto rhs = normalize(e.kids[1], bound);
        bs.insert(bs.end(), std::make_move_iterator(rhs.begin()),
                  std::make_move_iterator(rhs.end()));
        return bs;
      }
      case ParExpr::Kind::Sub: {
        auto bs = normalize(e.kids[0], bound);
        auto rhs = normalize(e.kids[1], bound);
        for (Branch& b : rhs)
          b.core = ParExpr::unary(ParExpr::Kind::Neg, std::move(b.core));
        bs.insert(bs.end(), std::make_move_iterator(rhs.begin()),
                  std::make_move_iterator(rhs.end()));
        return bs;
      }
      case ParExpr::Kind::SumSet:
      case ParExpr::Kind::SumMulti: {
        std::vector<std::string> qvars;
        collect_query_vars(e.query, qvars);
        std::vector<std::string> newly, inner = bound;
        for (const std::string& v : qvars)
          if (std::find(bound.begin(), bound.end(), v) == bound.end()) {
            newly.push_back(v);
            inner.push_back(v);
          }
        auto bs = normalize(e.kids[0], inner);
        for (Branch& b : bs)
          b.quants.insert(b.quants.begin(), Quant{e.kind, e.query, newly});
        return bs;
      }
      case ParExpr::Kind::Mul: {
        auto lhs = normalize(e.kids[0], bound);
        auto rhs = normalize(e.kids[1], bound);
        if (scalarish(lhs))
          return distribute(lhs.front().core, rhs, /*left=*/true);
        if (scalarish(rhs))
          return distribute(rhs.front().core, lhs, /*left=*/false);
        return {{{},
                 ParExpr::binary(ParExpr::Kind::Mul, rebuild(lhs),
                                 rebuild(rhs))}};
      }
      case ParExpr::Kind::Div: {
        auto lhs = normalize(e.kids[0], bound);
        auto rhs = normalize(e.kids[1], bound);
        if (!scalarish(rhs))
          return {{{},
                   ParExpr::binary(ParExpr::Kind::Div, rebuild(lhs),
                                   rebuild(rhs))}};
        const ParExpr& d = rhs.front().core;
        std::vector<std::string> dvars;
        collect_free_vars(d, dvars);
        for (Branch& b : lhs) {
          avoid_capture(b, dvars);
          b.core = ParExpr::binary(ParExpr::Kind::Div, std::move(b.core), d);
        }
        return lhs;
      }
    }
    return {{{}, e}};
  }

 private:
  static bool contains_sum(const ParExpr& e) {
    if (e.is_sum()) return true;
    return std::any_of(e.kids.begin(), e.kids.end(), contains_sum);
  }

  // a factor that can move through a sum: one branch, no quantifiers, no
  // sums anywhere inside
  static bool scalarish(const std::vector<Branch>& bs) {
    return bs.size() == 1 && bs.front().quants.empty() &&
           !contains_sum(bs.front().core);
  }

  std::vector<Branch> distribute(const ParExpr& scalar,
                                 std::vector<Branch> bs, bool left) {
    std::vector<std::string> svars;
    collect_free_vars(scalar, svars);
    for (Branch& b : bs) {
      avoid_capture(b, svars);
      b.core = left ? ParExpr::binary(ParExpr::Kind::Mul, scalar,
                                      std::move(b.core))
                    : ParExpr::binary(ParExpr::Kind::Mul, std::move(b.core),
                                      scalar);
    }
    return bs;
  }

  // rename variables the branch quantifiers newly bind when they clash
  // with names free in an expression being moved inside; correlated outer
  // variables stay untouched
  void avoid_capture(Branch& b, const std::vector<std::string>& incoming) {
    for (std::size_t qi = 0; qi < b.quants.size(); ++qi) {
      for (std::string& v : b.quants[qi].binds) {
        if (std::find(incoming.begin(), incoming.end(), v) == incoming.end())
          continue;
        std::string fresh = v + "_h" + std::to_string(++fresh_);
        Substitution ren{{v, Term::var(fresh)}};
        for (std::size_t qj = qi; qj < b.quants.size(); ++qj)
          substitute_query(b.quants[qj].query, ren);
        b.core = substitute_expr(b.core, ren);
        v = fresh;
      }
    }
  }

  long fresh_ = 0;
};

ParExpr prenex_expr(const ParExpr& e, const std::vector<std::string>& bound) {
  Prenexer p;
  return rebuild(p.normalize(e, bound));
}

}  // namespace

RlpModel to_prenex(const RlpModel& model) {
  RlpModel out = expand_definitions(model);
  out.objective.expr = prenex_expr(out.objective.expr, {});
  for (ConstraintTemplate& c : out.constraints) {
    std::vector<std::string> bound;
    collect_query_vars(c.index_query, bound);
    c.lhs = prenex_expr(c.lhs, bound);
    c.rhs = prenex_expr(c.rhs, bound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// validation

namespace {

class Validator {
 public:
  Validator(const RlpModel& model, const logkb::LogicProgram& program)
      : model_(model), program_(program) {}

  ValidationReport run() {
    check_roles();
    check_definition_heads();
    if (check_definition_recursion()) {
      // expansion-based checks only make sense on acyclic definitions
      RlpModel flat = expand_definitions(model_);
      check_objective(flat);
      check_constraints(flat);
    }
    return std::move(report_);
  }

 private:
  void error(const std::string& msg, int line = 0) {
    report_.errors.push_back({msg, line});
  }

  void check_roles() {
    for (const VarDecl& d : model_.var_decls) {
      for (const Definition& def : model_.definitions)
        if (def.head.predicate == d.predicate && def.head.arity() == d.arity)
          error("predicate " + d.predicate + "/" + std::to_string(d.arity) +
                    " is both a declared variable and a definition head",
                d.line);
      if (program_.pred(d.predicate, d.arity))
        error("declared variable " + d.predicate + "/" +
                  std::to_string(d.arity) +
                  " is also defined in the knowledge base",
              d.line);
    }
    for (const Definition& def : model_.definitions)
      if (program_.pred(def.head.predicate, def.head.arity()))
        error("defined predicate " + def.head.predicate + "/" +
                  std::to_string(def.head.arity()) +
                  " is also defined in the knowledge base",
              def.line);
  }

  void check_definition_heads() {
    for (const Definition& def : model_.definitions) {
      std::set<std::string> seen;
      for (const Term& a : def.head.args) {
        if (a.kind != Term::Kind::Variable) {
          error("definition head arguments must be distinct variables: " +
                    to_string(def.head),
                def.line);
          break;
        }
        if (!seen.insert(a.name).second) {
          error("definition head repeats variable " + a.name + ": " +
                    to_string(def.head),
                def.line);
          break;
        }
      }
    }
  }

  bool check_definition_recursion() {
    // defined predicate -> defined predicates referenced by its body
    std::map<std::string, std::set<std::string>> deps;
    auto key = [](const std::string& p, std::size_t a) {
      return p + "/" + std::to_string(a);
    };
    std::function<void(const ParExpr&, std::set<std::string>&)> walk =
        [&](const ParExpr& e, std::set<std::string>& out) {
          if (e.kind == ParExpr::Kind::AtomRef &&
              model_.role(e.atom.predicate, e.atom.arity()) == Role::Defined)
            out.insert(key(e.atom.predicate, e.atom.arity()));
          for (const ParExpr& k : e.kids) walk(k, out);
        };
    for (const Definition& d : model_.definitions)
      walk(d.body, deps[key(d.head.predicate, d.head.arity())]);

    // DFS cycle detection
    std::map<std::string, int> state;  // 0 new, 1 open, 2 done
    bool ok = true;
    std::function<void(const std::string&)> dfs = [&](const std::string& u) {
      state[u] = 1;
      for (const std::string& v : deps[u]) {
        if (state[v] == 1) {
          error("definition of " + u + " is recursive through " + v);
          ok = false;
        } else if (state[v] == 0) {
          dfs(v);
        }
      }
      state[u] = 2;
    };
    for (const auto& [u, _] : deps)
      if (state[u] == 0) dfs(u);
    return ok;
  }

  void check_query(const std::vector<Literal>& q,
                   const std::vector<std::string>& pre_bound, int line) {
    if (auto issue = logkb::query_safety_issue(q, pre_bound))
      error(*issue, line);
    for (const Literal& l : q) {
      if (l.kind == Literal::Kind::Compare) continue;
      if (model_.role(l.atom.predicate, l.atom.arity()) == Role::LpVar) {
        error("declared variable " + l.atom.predicate + "/" +
                  std::to_string(l.atom.arity()) +
                  " cannot be used in a logical query",
              line);
        continue;
      }
      if (model_.role(l.atom.predicate, l.atom.arity()) == Role::Defined) {
        error("defined predicate " + l.atom.predicate + "/" +
                  std::to_string(l.atom.arity()) +
                  " cannot be used in a logical query",
              line);
        continue;
      }
      if (!program_.pred(l.atom.predicate, l.atom.arity()))
        error("parameter " + l.atom.predicate + "/" +
                  std::to_string(l.atom.arity()) +
                  " is not defined in the knowledge base",
              line);
    }
  }

  // bound: variables currently in scope; returns nothing, accumulates errors
  void check_expr(const ParExpr& e, std::vector<std::string> bound, int line,
                  const char* what) {
    switch (e.kind) {
      case ParExpr::Kind::Number:
        return;
      case ParExpr::Kind::AtomRef: {
        const Atom& a = e.atom;
        Role r = model_.role(a.predicate, a.arity());
        if (r == Role::Parameter && !program_.pred(a.predicate, a.arity()))
          error("parameter " + a.predicate + "/" + std::to_string(a.arity()) +
                    " is not defined in the knowledge base",
                line);
        std::vector<std::string> vs;
        a.collect_vars(vs);
        for (const std::string& v : vs)
          if (std::find(bound.begin(), bound.end(), v) == bound.end())
            error(std::string(what) + ": variable " + v + " in " +
                      to_string(a) + " is not bound by an index query or sum",
                  line);
        return;
      }
      case ParExpr::Kind::SumSet:
      case ParExpr::Kind::SumMulti: {
        check_query(e.query, bound, line);
        std::vector<std::string> qvars;
        collect_query_vars(e.query, qvars);
        for (const std::string& v : qvars)
          if (std::find(bound.begin(), bound.end(), v) == bound.end())
            bound.push_back(v);
        check_expr(e.kids[0], bound, line, what);
        return;
      }
      case ParExpr::Kind::Div: {
        check_expr(e.kids[0], bound, line, what);
        check_expr(e.kids[1], bound, line, what);
        if (contains_lp_var(e.kids[1]))
          error("division by an expression containing declared variables",
                line);
        return;
      }
      default:
        for (const ParExpr& k : e.kids) check_expr(k, bound, line, what);
        return;
    }
  }

  bool contains_lp_var(const ParExpr& e) const {
    if (e.kind == ParExpr::Kind::AtomRef)
      return model_.role(e.atom.predicate, e.atom.arity()) == Role::LpVar;
    return std::any_of(e.kids.begin(), e.kids.end(), [&](const ParExpr& k) {
      return contains_lp_var(k);
    });
  }

  void check_objective(const RlpModel& flat) {
    check_expr(flat.objective.expr, {}, flat.objective.line,
               "objective variables must all be sum-bound");
  }

  void check_constraints(const RlpModel& flat) {
    for (const ConstraintTemplate& c : flat.constraints) {
      check_query(c.index_query, {}, c.line);
      std::vector<std::string> bound;
      collect_query_vars(c.index_query, bound);
      check_expr(c.lhs, bound, c.line, "constraint");
      check_expr(c.rhs, bound, c.line, "constraint");
    }
  }

  const RlpModel& model_;
  const logkb::LogicProgram& program_;
  ValidationReport report_;
};

}  // namespace

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& e : errors) {
    os << "error";
    if (e.line) os << " (line " << e.line << ")";
    os << ": " << e.message << "\n";
  }
  for (const auto& w : warnings) {
    os << "warning";
    if (w.line) os << " (line " << w.line << ")";
    os << ": " << w.message << "\n";
  }
  return os.str();
}

ValidationReport validate(const RlpModel& model,
                          const logkb::LogicProgram& program) {
  return Validator(model, program).run();
}

}  // namespace rlp::lang
