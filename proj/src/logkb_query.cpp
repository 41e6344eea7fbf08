#include "rlp/logkb.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace rlp::logkb {

namespace {

struct VecTermLess {
  bool operator()(const std::vector<Term>& a, const std::vector<Term>& b) const {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(a[i], b[i])) return c < 0;
    return a.size() < b.size();
  }
};

std::optional<Rational> eval_numeric(const Term& t, const Substitution& binds) {
  switch (t.kind) {
    case Term::Kind::Number:
      return t.number;
    case Term::Kind::Variable: {
      auto it = binds.find(t.name);
      if (it == binds.end() || it->second.kind != Term::Kind::Number)
        return std::nullopt;
      return it->second.number;
    }
    case Term::Kind::Compound: {
      const std::string& f = t.name;
      if (t.args.size() == 1 && f == "-") {
        auto v = eval_numeric(t.args[0], binds);
        if (!v) return std::nullopt;
        return -*v;
      }
      if (t.args.size() == 2 && (f == "+" || f == "-" || f == "*" || f == "/")) {
        auto a = eval_numeric(t.args[0], binds);
        auto b = eval_numeric(t.args[1], binds);
        if (!a || !b) return std::nullopt;
        if (f == "+") return *a + *b;
        if (f == "-") return *a - *b;
        if (f == "*") return *a * *b;
        if (*b == 0) throw KbError(KbError::Kind::Semantic, "division by zero");
        return *a / *b;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

bool check_builtin(const Builtin& b, const Substitution& binds) {
  auto l = eval_numeric(b.lhs, binds);
  auto r = eval_numeric(b.rhs, binds);
  if (!l || !r)
    throw KbError(KbError::Kind::Semantic,
                  "comparison over non-numeric operands: " +
                      to_string(Literal::compare(b)));
  int c = cmp(*l, *r);
  switch (b.rel) {
    case Builtin::Rel::Lt: return c < 0;
    case Builtin::Rel::Le: return c <= 0;
    case Builtin::Rel::Gt: return c > 0;
    case Builtin::Rel::Ge: return c >= 0;
    case Builtin::Rel::Eq: return c == 0;
    case Builtin::Rel::Ne: return c != 0;
  }
  return false;
}

void check_safety(const std::vector<Literal>& conjunction,
                  std::vector<std::string> bound) {
  if (auto issue = query_safety_issue(conjunction, std::move(bound)))
    throw KbError(KbError::Kind::Unsafe, *issue);
}

class QueryRunner {
 public:
  QueryRunner(const MaterializedKb& kb, const std::vector<Literal>& conj,
              const Substitution& seed)
      : kb_(kb), conj_(conj) {
    std::vector<std::string> pre;
    pre.reserve(seed.size());
    for (const auto& [v, t] : seed) pre.push_back(v);
    std::sort(pre.begin(), pre.end());
    check_safety(conj, std::move(pre));
    for (const Literal& l : conj) {
      if (l.kind == Literal::Kind::Positive) l.atom.collect_vars(vars_);
    }
    // negated literals and builtins cannot introduce new names (safety), so
    // vars_ is exactly the named variable set in first-appearance order
  }

  std::map<std::vector<Term>, long, VecTermLess> run(
      const Substitution& seed = {}) {
    Substitution binds = seed;
    step(0, 1, binds);
    return std::move(groups_);
  }

  const std::vector<std::string>& vars() const { return vars_; }

 private:
  void step(std::size_t li, long weight, Substitution& binds) {
    if (li == conj_.size()) {
      std::vector<Term> tuple;
      tuple.reserve(vars_.size());
      for (const auto& v : vars_) {
        auto it = binds.find(v);
        tuple.push_back(it == binds.end() ? Term::anon() : it->second);
      }
      groups_[std::move(tuple)] += weight;
      return;
    }
    const Literal& l = conj_[li];
    switch (l.kind) {
      case Literal::Kind::Compare:
        if (check_builtin(l.cmp, binds)) step(li + 1, weight, binds);
        return;
      case Literal::Kind::Negative: {
        Atom g = substitute(l.atom, binds);
        if (!kb_.holds(g)) step(li + 1, weight, binds);
        return;
      }
      case Literal::Kind::Positive: {
        const Relation* rel = kb_.relation(l.atom.predicate, l.atom.arity());
        if (!rel) return;
        Atom pat = substitute(l.atom, binds);
        std::vector<Term> prefix;
        for (const Term& a : pat.args) {
          if (a.is_ground())
            prefix.push_back(a);
          else
            break;
        }
        auto [lo, hi] = rel->prefix_range(prefix, prefix.size());
        for (std::size_t i = lo; i < hi; ++i) {
          const FactEntry& row = rel->rows[i];
          Substitution saved = binds;
          Atom ground{pat.predicate, row.args};
          if (match(pat, ground, binds))
            step(li + 1, weight * row.multiplicity, binds);
          binds = std::move(saved);
        }
        return;
      }
    }
  }

  const MaterializedKb& kb_;
  const std::vector<Literal>& conj_;
  std::vector<std::string> vars_;
  std::map<std::vector<Term>, long, VecTermLess> groups_;
};

}  // namespace


std::optional<std::string> query_safety_issue(
    const std::vector<Literal>& conjunction,
    std::vector<std::string> bound) {
  for (const Literal& l : conjunction) {
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
          return "unsafe query: variable " + v +
                 " is not bound by a preceding positive literal (in " +
                 to_string(l) + ")";
    }
  }
  return std::nullopt;
}

std::vector<Substitution> query_set(const MaterializedKb& kb,
                                    const std::vector<Literal>& conjunction,
                                    const Substitution& seed) {
  QueryRunner runner(kb, conjunction, seed);
  auto groups = runner.run(seed);
  std::vector<Substitution> out;
  out.reserve(groups.size());
  for (const auto& [tuple, w] : groups) {
    Substitution s;
    for (std::size_t i = 0; i < runner.vars().size(); ++i)
      s.emplace(runner.vars()[i], tuple[i]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::pair<Substitution, long>> query_multiset(
    const MaterializedKb& kb, const std::vector<Literal>& conjunction,
    const Substitution& seed) {
  QueryRunner runner(kb, conjunction, seed);
  auto groups = runner.run(seed);
  std::vector<std::pair<Substitution, long>> out;
  out.reserve(groups.size());
  for (const auto& [tuple, w] : groups) {
    Substitution s;
    for (std::size_t i = 0; i < runner.vars().size(); ++i)
      s.emplace(runner.vars()[i], tuple[i]);
    out.emplace_back(std::move(s), w);
  }
  return out;
}

}  // namespace rlp::logkb
