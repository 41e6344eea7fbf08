#include "rlp/logkb.hpp"

#include "rlp/detail/term_parser.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rlp::logkb {

namespace {

using detail::Token;

bool is_arith(const std::string& f, std::size_t arity) {
  return detail::TokenCursor::is_arith(f, arity);
}

bool contains_arith(const Term& t) {
  if (t.kind != Term::Kind::Compound) return false;
  if (is_arith(t.name, t.args.size())) return true;
  return std::any_of(t.args.begin(), t.args.end(), contains_arith);
}

class Parser {
 public:
  explicit Parser(std::string_view text)
      : cur_(detail::Lexer(text, '%').run()) {}

  LogicProgram parse() {
    LogicProgram prog;
    try {
      while (!cur_.at_end()) {
        Clause c = clause();
        c.index = static_cast<int>(prog.clauses.size());
        register_named_constant(c);
        fold_clause(c);
        check_clause(c);
        prog.clauses.push_back(std::move(c));
      }
    } catch (const detail::ParseFail& f) {
      std::ostringstream os;
      os << "syntax error at line " << f.line << ", col " << f.col << ": "
         << f.msg;
      throw KbError(KbError::Kind::Syntax, os.str(), f.line, f.col);
    }
    analyze(prog);
    return prog;
  }

 private:
  [[noreturn]] void fail_at(int line, const std::string& msg, KbError::Kind k) {
    std::ostringstream os;
    os << "line " << line << ": " << msg;
    throw KbError(k, os.str(), line, 0);
  }

  Clause clause() {
    Clause c;
    c.line = cur_.peek().line;
    Term head_term = cur_.primary();
    c.head = cur_.term_to_atom(std::move(head_term));
    if (cur_.accept("=")) {
      c.raw_value = cur_.term();
      c.value = Rational(0);  // folded in fold_clause
    }
    if (cur_.peek().kind == Token::Kind::Punct && cur_.peek().text == ":-") {
      cur_.take();
      c.body = cur_.conjunction();
    }
    cur_.expect(".");
    return c;
  }

  // `n = 20.` defines the named numeric constant n, usable in later terms.
  void register_named_constant(Clause& c) {
    if (!c.is_fact() || !c.value || !c.head.args.empty()) return;
    Term folded = fold(c.raw_value, c.line);
    if (folded.kind != Term::Kind::Number)
      fail_at(c.line, "value of '" + c.head.predicate + "' is not numeric",
              KbError::Kind::Semantic);
    constants_[c.head.predicate] = folded.number;
  }

  Term fold(const Term& t, int line) {
    switch (t.kind) {
      case Term::Kind::Symbol: {
        auto it = constants_.find(t.name);
        if (it != constants_.end()) return Term::num(it->second);
        return t;
      }
      case Term::Kind::Compound: {
        Term out = t;
        for (Term& a : out.args) a = fold(a, line);
        if (is_arith(out.name, out.args.size())) {
          bool numeric = std::all_of(
              out.args.begin(), out.args.end(),
              [](const Term& a) { return a.kind == Term::Kind::Number; });
          if (numeric) {
            if (out.args.size() == 1) return Term::num(-out.args[0].number);
            const Rational& a = out.args[0].number;
            const Rational& b = out.args[1].number;
            if (out.name == "+") return Term::num(a + b);
            if (out.name == "-") return Term::num(a - b);
            if (out.name == "*") return Term::num(a * b);
            if (b == 0)
              fail_at(line, "division by zero in term", KbError::Kind::Semantic);
            return Term::num(a / b);
          }
        }
        return out;
      }
      default:
        return t;
    }
  }

  void fold_clause(Clause& c) {
    for (Term& a : c.head.args) a = fold(a, c.line);
    if (c.value) {
      Term v = fold(c.raw_value, c.line);
      if (v.kind != Term::Kind::Number)
        fail_at(c.line, "fact value does not fold to a number",
                KbError::Kind::Semantic);
      c.value = v.number;
    }
    for (Literal& l : c.body) {
      if (l.kind == Literal::Kind::Compare) {
        l.cmp.lhs = fold(l.cmp.lhs, c.line);
        l.cmp.rhs = fold(l.cmp.rhs, c.line);
      } else {
        for (Term& a : l.atom.args) a = fold(a, c.line);
      }
    }
  }

  void check_clause(const Clause& c) {
    for (const Term& a : c.head.args)
      if (contains_arith(a))
        fail_at(c.line,
                "arithmetic in a clause head must fold to a constant",
                KbError::Kind::Unsafe);
    for (const Literal& l : c.body)
      if (l.kind != Literal::Kind::Compare)
        for (const Term& a : l.atom.args)
          if (contains_arith(a))
            fail_at(c.line,
                    "arithmetic inside a matched literal must fold to a "
                    "constant",
                    KbError::Kind::Unsafe);

    // range restriction and left-to-right boundness of builtins / negation
    std::vector<std::string> bound;
    for (const Literal& l : c.body) {
      std::vector<std::string> vs;
      if (l.kind == Literal::Kind::Positive) {
        l.atom.collect_vars(vs);
        for (auto& v : vs)
          if (std::find(bound.begin(), bound.end(), v) == bound.end())
            bound.push_back(v);
      } else {
        if (l.kind == Literal::Kind::Negative)
          l.atom.collect_vars(vs);
        else {
          l.cmp.lhs.collect_vars(vs);
          l.cmp.rhs.collect_vars(vs);
        }
        for (const auto& v : vs)
          if (std::find(bound.begin(), bound.end(), v) == bound.end())
            fail_at(c.line,
                    "variable " + v +
                        " is not bound by a preceding positive literal",
                    KbError::Kind::Unsafe);
      }
    }
    std::vector<std::string> hv;
    c.head.collect_vars(hv);
    for (const auto& v : hv)
      if (std::find(bound.begin(), bound.end(), v) == bound.end())
        fail_at(c.line,
                "head variable " + v + " does not occur in the body",
                KbError::Kind::Unsafe);
  }

  void analyze(LogicProgram& prog) {
    using Key = std::pair<std::string, std::size_t>;
    for (const Clause& c : prog.clauses) {
      Key k{c.head.predicate, c.head.arity()};
      PredInfo& info = prog.predicates[k];
      info.name = c.head.predicate;
      info.arity = c.head.arity();
      if (c.value) info.valued = true;
      if (!c.is_fact()) info.extensional = false;
    }
    // body-only predicates count as known extensional (possibly empty)
    for (const Clause& c : prog.clauses)
      for (const Literal& l : c.body)
        if (l.kind != Literal::Kind::Compare) {
          Key k{l.atom.predicate, l.atom.arity()};
          if (!prog.predicates.count(k))
            prog.predicates[k] =
                PredInfo{l.atom.predicate, l.atom.arity(), false, true, 0};
        }

    stratify(prog);
    check_constructive(prog);
  }

  void stratify(LogicProgram& prog) {
    using Key = std::pair<std::string, std::size_t>;
    std::vector<Key> keys;
    std::map<Key, int> id;
    for (auto& [k, info] : prog.predicates) {
      id[k] = static_cast<int>(keys.size());
      keys.push_back(k);
    }
    int n = static_cast<int>(keys.size());
    struct Edge {
      int to;
      bool negative;
    };
    std::vector<std::vector<Edge>> adj(n);
    for (const Clause& c : prog.clauses) {
      if (c.is_fact()) continue;
      int h = id[{c.head.predicate, c.head.arity()}];
      for (const Literal& l : c.body) {
        if (l.kind == Literal::Kind::Compare) continue;
        int b = id[{l.atom.predicate, l.atom.arity()}];
        adj[h].push_back({b, l.kind == Literal::Kind::Negative});
      }
    }
    // iterative longest-path stratum assignment; a negative edge inside a
    // cycle never stabilizes and is reported
    std::vector<int> stratum(n, 0);
    bool changed = true;
    int rounds = 0;
    while (changed) {
      changed = false;
      if (++rounds > n + 1) {
        // locate one offending cycle for the message
        std::string cyc = find_negative_cycle(keys, adj);
        throw KbError(KbError::Kind::Unstratifiable,
                      "negation is not stratified: " + cyc);
      }
      for (int h = 0; h < n; ++h) {
        for (const Edge& e : adj[h]) {
          int need = stratum[e.to] + (e.negative ? 1 : 0);
          if (stratum[h] < need) {
            stratum[h] = need;
            changed = true;
          }
        }
      }
    }
    int max_s = 0;
    for (auto& [k, info] : prog.predicates) {
      info.stratum = stratum[id[k]];
      max_s = std::max(max_s, info.stratum);
    }
    prog.num_strata = max_s + 1;
  }

  template <class Adj>
  std::string find_negative_cycle(
      const std::vector<std::pair<std::string, std::size_t>>& keys,
      const Adj& adj) {
    // Tarjan-free SCC via Kosaraju; report predicates of an SCC that
    // contains a negative edge.
    int n = static_cast<int>(keys.size());
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (int u = 0; u < n; ++u)
      for (const auto& e : adj[u]) {
        fwd[u].push_back(e.to);
        rev[e.to].push_back(u);
      }
    std::vector<int> order;
    std::vector<char> seen(n, 0);
    std::function<void(int)> dfs1 = [&](int u) {
      seen[u] = 1;
      for (int v : fwd[u])
        if (!seen[v]) dfs1(v);
      order.push_back(u);
    };
    for (int u = 0; u < n; ++u)
      if (!seen[u]) dfs1(u);
    std::vector<int> comp(n, -1);
    int nc = 0;
    std::function<void(int, int)> dfs2 = [&](int u, int c) {
      comp[u] = c;
      for (int v : rev[u])
        if (comp[v] < 0) dfs2(v, c);
    };
    for (int i = n - 1; i >= 0; --i)
      if (comp[order[i]] < 0) dfs2(order[i], nc++);
    for (int u = 0; u < n; ++u)
      for (const auto& e : adj[u])
        if (e.negative && comp[u] == comp[e.to]) {
          std::string msg;
          for (int v = 0; v < n; ++v)
            if (comp[v] == comp[u]) {
              if (!msg.empty()) msg += ", ";
              msg += keys[v].first + "/" + std::to_string(keys[v].second);
            }
          return "cycle through {" + msg + "}";
        }
    return "cycle not located";
  }

  // A rule whose head builds a compound term not present in its body may not
  // take part in recursion; this keeps the Herbrand universe finite.
  void check_constructive(const LogicProgram& prog) {
    using Key = std::pair<std::string, std::size_t>;
    std::map<Key, int> id;
    std::vector<Key> keys;
    for (auto& [k, info] : prog.predicates) {
      id[k] = static_cast<int>(keys.size());
      keys.push_back(k);
    }
    int n = static_cast<int>(keys.size());
    std::vector<std::vector<int>> fwd(n);
    for (const Clause& c : prog.clauses) {
      if (c.is_fact()) continue;
      int h = id[{c.head.predicate, c.head.arity()}];
      for (const Literal& l : c.body)
        if (l.kind != Literal::Kind::Compare)
          fwd[h].push_back(id[{l.atom.predicate, l.atom.arity()}]);
    }
    // reachability closure (n is small)
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (int u = 0; u < n; ++u) {
      std::vector<int> stack{u};
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : fwd[v])
          if (!reach[u][w]) {
            reach[u][w] = 1;
            stack.push_back(w);
          }
      }
    }
    auto subterm_of = [](const Term& needle, const Term& hay) {
      std::function<bool(const Term&)> go = [&](const Term& t) {
        if (t == needle) return true;
        if (t.kind == Term::Kind::Compound)
          for (const Term& a : t.args)
            if (go(a)) return true;
        return false;
      };
      return go(hay);
    };
    for (const Clause& c : prog.clauses) {
      if (c.is_fact()) continue;
      bool constructive = false;
      for (const Term& a : c.head.args) {
        if (a.kind != Term::Kind::Compound) continue;
        bool found = false;
        for (const Literal& l : c.body) {
          if (l.kind != Literal::Kind::Positive) continue;
          for (const Term& b : l.atom.args)
            if (subterm_of(a, b)) {
              found = true;
              break;
            }
          if (found) break;
        }
        if (!found) {
          constructive = true;
          break;
        }
      }
      if (!constructive) continue;
      int h = id[{c.head.predicate, c.head.arity()}];
      for (const Literal& l : c.body) {
        if (l.kind == Literal::Kind::Compare) continue;
        int b = id[{l.atom.predicate, l.atom.arity()}];
        if (b == h || (reach[b][h])) {
          fail_at(c.line,
                  "rule for " + c.head.predicate +
                      " builds new compound terms inside a recursive cycle",
                  KbError::Kind::Unsafe);
        }
      }
    }
  }

  detail::TokenCursor cur_;
  std::map<std::string, Rational> constants_;
};

}  // namespace

std::string to_string(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Positive:
      return to_string(l.atom);
    case Literal::Kind::Negative:
      return "not " + to_string(l.atom);
    case Literal::Kind::Compare: {
      const char* rel = "";
      switch (l.cmp.rel) {
        case Builtin::Rel::Lt: rel = " < "; break;
        case Builtin::Rel::Le: rel = " <= "; break;
        case Builtin::Rel::Gt: rel = " > "; break;
        case Builtin::Rel::Ge: rel = " >= "; break;
        case Builtin::Rel::Eq: rel = " == "; break;
        case Builtin::Rel::Ne: rel = " != "; break;
      }
      return to_string(l.cmp.lhs) + rel + to_string(l.cmp.rhs);
    }
  }
  return "?";
}

LogicProgram parse_logkb(std::string_view text) { return Parser(text).parse(); }

bool operator==(const Clause& a, const Clause& b) {
  if (!(a.head == b.head) || a.value.has_value() != b.value.has_value())
    return false;
  if (a.value && *a.value != *b.value) return false;
  if (a.body.size() != b.body.size()) return false;
  for (std::size_t i = 0; i < a.body.size(); ++i)
    if (to_string(a.body[i]) != to_string(b.body[i])) return false;
  return true;
}

std::string print_logkb(const LogicProgram& program) {
  std::ostringstream os;
  for (const Clause& c : program.clauses) {
    os << to_string(c.head);
    if (c.value) os << " = " << to_string(*c.value);
    if (!c.body.empty()) {
      os << " :- ";
      for (std::size_t i = 0; i < c.body.size(); ++i) {
        if (i) os << ", ";
        os << to_string(c.body[i]);
      }
    }
    os << ".\n";
  }
  return os.str();
}

}  // namespace rlp::logkb
