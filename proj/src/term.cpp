#include "rlp/term.hpp"

#include <algorithm>
#include <sstream>

namespace rlp {

bool Term::is_ground() const {
  switch (kind) {
    case Kind::Number:
    case Kind::Symbol:
      return true;
    case Kind::Variable:
    case Kind::Anonymous:
      return false;
    case Kind::Compound:
      return std::all_of(args.begin(), args.end(),
                         [](const Term& t) { return t.is_ground(); });
  }
  return false;
}

void Term::collect_vars(std::vector<std::string>& out) const {
  if (kind == Kind::Variable) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  } else if (kind == Kind::Compound) {
    for (const Term& a : args) a.collect_vars(out);
  }
}

bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }

static int kind_rank(Term::Kind k) {
  switch (k) {
    case Term::Kind::Number: return 0;
    case Term::Kind::Symbol: return 1;
    case Term::Kind::Compound: return 2;
    case Term::Kind::Variable: return 3;
    case Term::Kind::Anonymous: return 4;
  }
  return 5;
}

int compare(const Term& a, const Term& b) {
  int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind) {
    case Term::Kind::Number:
      return cmp(a.number, b.number);
    case Term::Kind::Symbol:
    case Term::Kind::Variable:
      return a.name.compare(b.name);
    case Term::Kind::Anonymous:
      return 0;
    case Term::Kind::Compound: {
      if (a.args.size() != b.args.size())
        return a.args.size() < b.args.size() ? -1 : 1;
      if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (int c = compare(a.args[i], b.args[i])) return c;
      return 0;
    }
  }
  return 0;
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Number: {
      return to_string(t.number);
    }
    case Term::Kind::Symbol:
    case Term::Kind::Variable:
      return t.name;
    case Term::Kind::Anonymous:
      return "_";
    case Term::Kind::Compound: {
      auto arith_operand = [](const Term& a) {
        bool nested =
            a.kind == Term::Kind::Compound &&
            ((a.args.size() == 2 &&
              (a.name == "+" || a.name == "-" || a.name == "*" || a.name == "/")) ||
             (a.args.size() == 1 && a.name == "-"));
        return nested ? "(" + to_string(a) + ")" : to_string(a);
      };
      if (t.args.size() == 2 &&
          (t.name == "+" || t.name == "-" || t.name == "*" || t.name == "/"))
        return arith_operand(t.args[0]) + " " + t.name + " " +
               arith_operand(t.args[1]);
      if (t.args.size() == 1 && t.name == "-")
        return "-" + arith_operand(t.args[0]);
      std::string s = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ",";
        s += to_string(t.args[i]);
      }
      s += ")";
      return s;
    }
  }
  return "?";
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(),
                     [](const Term& t) { return t.is_ground(); });
}

void Atom::collect_vars(std::vector<std::string>& out) const {
  for (const Term& a : args) a.collect_vars(out);
}

bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }

int compare(const Atom& a, const Atom& b) {
  if (a.args.size() != b.args.size())
    return a.args.size() < b.args.size() ? -1 : 1;
  if (int c = a.predicate.compare(b.predicate)) return c < 0 ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

std::string to_string(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  std::string s = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += to_string(a.args[i]);
  }
  s += ")";
  return s;
}

Term substitute(const Term& t, const Substitution& s) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      auto it = s.find(t.name);
      return it != s.end() ? it->second : t;
    }
    case Term::Kind::Compound: {
      Term out = t;
      for (Term& a : out.args) a = substitute(a, s);
      return out;
    }
    default:
      return t;
  }
}

Atom substitute(const Atom& a, const Substitution& s) {
  Atom out = a;
  for (Term& t : out.args) t = substitute(t, s);
  return out;
}

bool match(const Term& pattern, const Term& ground, Substitution& binds) {
  switch (pattern.kind) {
    case Term::Kind::Anonymous:
      return true;
    case Term::Kind::Variable: {
      auto [it, inserted] = binds.emplace(pattern.name, ground);
      return inserted ? true : it->second == ground;
    }
    case Term::Kind::Number:
      return ground.kind == Term::Kind::Number && cmp(pattern.number, ground.number) == 0;
    case Term::Kind::Symbol:
      return ground.kind == Term::Kind::Symbol && pattern.name == ground.name;
    case Term::Kind::Compound: {
      if (ground.kind != Term::Kind::Compound || pattern.name != ground.name ||
          pattern.args.size() != ground.args.size())
        return false;
      for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match(pattern.args[i], ground.args[i], binds)) return false;
      return true;
    }
  }
  return false;
}

bool match(const Atom& pattern, const Atom& ground, Substitution& binds) {
  if (pattern.predicate != ground.predicate ||
      pattern.args.size() != ground.args.size())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match(pattern.args[i], ground.args[i], binds)) return false;
  return true;
}

bool subsumes(const Atom& general, const Atom& specific) {
  if (general.predicate != specific.predicate ||
      general.args.size() != specific.args.size())
    return false;
  // One-way matching where distinct variables of `general` may bind to
  // arbitrary (possibly non-ground) terms of `specific`.
  Substitution binds;
  struct Rec {
    Substitution& binds;
    bool go(const Term& g, const Term& s) {
      switch (g.kind) {
        case Term::Kind::Anonymous:
          return true;
        case Term::Kind::Variable: {
          auto [it, inserted] = binds.emplace(g.name, s);
          return inserted ? true : it->second == s;
        }
        case Term::Kind::Number:
          return s.kind == Term::Kind::Number && cmp(g.number, s.number) == 0;
        case Term::Kind::Symbol:
          return s.kind == Term::Kind::Symbol && g.name == s.name;
        case Term::Kind::Compound: {
          if (s.kind != Term::Kind::Compound || g.name != s.name ||
              g.args.size() != s.args.size())
            return false;
          for (std::size_t i = 0; i < g.args.size(); ++i)
            if (!go(g.args[i], s.args[i])) return false;
          return true;
        }
      }
      return false;
    }
  } rec{binds};
  for (std::size_t i = 0; i < general.args.size(); ++i)
    if (!rec.go(general.args[i], specific.args[i])) return false;
  return true;
}

}  // namespace rlp
