#include "rlp/logkb.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace rlp::logkb {

namespace {

using Key = std::pair<std::string, std::size_t>;

struct VecTermLess {
  bool operator()(const std::vector<Term>& a, const std::vector<Term>& b) const {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(a[i], b[i])) return c < 0;
    return a.size() < b.size();
  }
};

struct WorkEntry {
  std::optional<Rational> value;
  long multiplicity = 0;
  int clause_index = -1;
  bool from_fact = false;
  int entered = 0;  // stratum-local round stamp
};

struct WorkRel {
  std::size_t arity = 0;
  bool valued = false;
  std::map<std::vector<Term>, WorkEntry, VecTermLess> rows;
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
        if (*b == 0)
          throw KbError(KbError::Kind::Semantic, "division by zero");
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

class Evaluator {
 public:
  Evaluator(const LogicProgram& prog, const EvalOptions& opts)
      : prog_(prog), opts_(opts) {
    for (const auto& [k, info] : prog.predicates) {
      WorkRel& r = store_[k];
      r.arity = info.arity;
      r.valued = info.valued;
    }
  }

  MaterializedKb run() {
    load_facts();
    for (int s = 0; s <= max_stratum(); ++s) eval_stratum(s);
    return finalize();
  }

 private:
  int max_stratum() const {
    int m = 0;
    for (const auto& [k, info] : prog_.predicates)
      m = std::max(m, info.stratum);
    return m;
  }

  void check_cap() {
    if (++atom_count_ > opts_.max_atoms)
      throw KbError(KbError::Kind::CapExceeded,
                    "derivation cap exceeded (" +
                        std::to_string(opts_.max_atoms) + " ground atoms)");
  }

  void record(const Atom& ground, const Clause& c, int round) {
    Key k{ground.predicate, ground.arity()};
    WorkRel& rel = store_.at(k);
    std::optional<Rational> v;
    if (rel.valued) v = c.value ? *c.value : Rational(1);

    auto it = rel.rows.find(ground.args);
    if (it == rel.rows.end()) {
      check_cap();
      WorkEntry e;
      e.value = v;
      e.multiplicity = 1;
      e.clause_index = c.index;
      e.from_fact = c.is_fact();
      e.entered = round;
      rel.rows.emplace(ground.args, std::move(e));
      return;
    }
    WorkEntry& e = it->second;
    e.multiplicity += 1;
    if (!rel.valued) return;
    if (*e.value == *v) return;

    const Clause& owner = prog_.clauses[e.clause_index];
    bool new_is_fact = c.is_fact();
    if (e.from_fact && !new_is_fact) return;  // fact wins
    if (!e.from_fact && new_is_fact) {
      e.value = v;
      e.clause_index = c.index;
      e.from_fact = true;
      return;
    }
    // both rules (or both facts): head specificity decides
    bool old_more = subsumes(c.head, owner.head) && !subsumes(owner.head, c.head);
    bool new_more = subsumes(owner.head, c.head) && !subsumes(c.head, owner.head);
    if (old_more) return;
    if (new_more) {
      e.value = v;
      e.clause_index = c.index;
      return;
    }
    std::ostringstream os;
    os << "conflicting values for " << to_string(ground) << ": "
       << to_string(*e.value) << " (line " << owner.line << ") vs "
       << to_string(*v) << " (line " << c.line << ")";
    throw KbError(KbError::Kind::ValueConflict, os.str());
  }

  void load_facts() {
    for (const Clause& c : prog_.clauses) {
      if (!c.is_fact()) continue;
      if (!c.head.is_ground())
        throw KbError(KbError::Kind::Unsafe,
                      "fact with variables at line " + std::to_string(c.line));
      record(c.head, c, 0);
    }
  }

  // positive literal source restriction inside a semi-naive round
  enum class Source { Full, Old, Delta };

  struct PosLit {
    const Atom* pattern;
    bool same_stratum;
  };

  void eval_stratum(int s) {
    std::vector<const Clause*> base, recursive;
    for (const Clause& c : prog_.clauses) {
      if (c.is_fact()) continue;
      const PredInfo* hp = prog_.pred(c.head.predicate, c.head.arity());
      if (!hp || hp->stratum != s) continue;
      bool rec = false;
      for (const Literal& l : c.body)
        if (l.kind == Literal::Kind::Positive) {
          const PredInfo* bp = prog_.pred(l.atom.predicate, l.atom.arity());
          if (bp && bp->stratum == s) rec = true;
        }
      (rec ? recursive : base).push_back(&c);
    }
    if (base.empty() && recursive.empty()) return;

    // round 0: facts of this stratum carry stamp 0; rules without
    // same-stratum positives fire exactly once into the same round
    for (const Clause* c : base) fire(*c, s, /*round=*/0, /*delta_pos=*/-1);

    // rounds >= 1: require one body literal from the previous round's delta
    bool progressed = true;
    for (int round = 1; progressed; ++round) {
      long before = atom_count_;
      for (const Clause* c : recursive) {
        int pos_idx = 0;
        for (std::size_t li = 0; li < c->body.size(); ++li) {
          const Literal& l = c->body[li];
          if (l.kind != Literal::Kind::Positive) continue;
          const PredInfo* bp = prog_.pred(l.atom.predicate, l.atom.arity());
          if (bp && bp->stratum == s) fire(*c, s, round, pos_idx);
          ++pos_idx;
        }
      }
      progressed = atom_count_ > before;
    }
  }

  // Enumerates every (clause, matched atom tuple) derivation exactly once.
  // `delta_pos` selects which same-stratum positive literal is constrained
  // to the previous round's delta (-1: all positives unconstrained).
  // Atoms derived in round r get stamp r; a literal reads:
  //   delta position  -> entered == r-1
  //   earlier same-stratum positives -> entered <= r-2
  //   later  same-stratum positives -> entered <= r-1
  //   other predicates -> unrestricted
  void fire(const Clause& c, int stratum, int round, int delta_pos) {
    Substitution binds;
    step(c, stratum, round, delta_pos, 0, 0, binds);
  }

  void step(const Clause& c, int stratum, int round, int delta_pos,
            std::size_t li, int pos_idx, Substitution& binds) {
    if (li == c.body.size()) {
      Atom ground = substitute(c.head, binds);
      record(ground, c, round);
      return;
    }
    const Literal& l = c.body[li];
    switch (l.kind) {
      case Literal::Kind::Compare:
        if (check_builtin(l.cmp, binds))
          step(c, stratum, round, delta_pos, li + 1, pos_idx, binds);
        return;
      case Literal::Kind::Negative: {
        Atom g = substitute(l.atom, binds);
        if (!present(g)) step(c, stratum, round, delta_pos, li + 1, pos_idx, binds);
        return;
      }
      case Literal::Kind::Positive: {
        const PredInfo* bp = prog_.pred(l.atom.predicate, l.atom.arity());
        bool same = bp && bp->stratum == stratum;
        int max_entered;  // inclusive upper stamp bound
        int min_entered = 0;
        if (!same) {
          max_entered = INT32_MAX;
        } else if (delta_pos < 0) {
          max_entered = INT32_MAX;  // base rule, full view
        } else if (pos_idx == delta_pos) {
          min_entered = round - 1;
          max_entered = round - 1;
        } else if (pos_idx < delta_pos) {
          max_entered = round - 2;
        } else {
          max_entered = round - 1;
        }
        Key k{l.atom.predicate, l.atom.arity()};
        auto sit = store_.find(k);
        if (sit == store_.end()) return;
        const WorkRel& rel = sit->second;
        Atom pat = substitute(l.atom, binds);
        // contiguous scan over the ground-prefix of the pattern
        std::vector<Term> prefix;
        for (const Term& a : pat.args) {
          if (a.is_ground())
            prefix.push_back(a);
          else
            break;
        }
        auto it = prefix.empty() ? rel.rows.begin() : rel.rows.lower_bound(prefix);
        for (; it != rel.rows.end(); ++it) {
          if (!prefix.empty()) {
            bool in_range = it->first.size() >= prefix.size();
            for (std::size_t i = 0; in_range && i < prefix.size(); ++i)
              in_range = compare(it->first[i], prefix[i]) == 0;
            if (!in_range) break;
          }
          if (it->second.entered < min_entered || it->second.entered > max_entered)
            continue;
          Substitution saved = binds;
          Atom row{pat.predicate, it->first};
          if (match(pat, row, binds))
            step(c, stratum, round, delta_pos, li + 1, pos_idx + 1, binds);
          binds = std::move(saved);
        }
        return;
      }
    }
  }

  bool present(const Atom& g) const {
    auto it = store_.find({g.predicate, g.arity()});
    if (it == store_.end()) return false;
    return it->second.rows.count(g.args) > 0;
  }

  MaterializedKb finalize() {
    MaterializedKb kb;
    kb.program = &prog_;
    for (auto& [k, wr] : store_) {
      Relation rel;
      rel.name = k.first;
      rel.arity = k.second;
      rel.valued = wr.valued;
      rel.rows.reserve(wr.rows.size());
      for (auto& [args, e] : wr.rows) {
        FactEntry fe;
        fe.args = args;
        fe.value = e.value;
        fe.multiplicity = e.multiplicity;
        fe.clause_index = e.clause_index;
        fe.from_fact = e.from_fact;
        rel.rows.push_back(std::move(fe));
      }
      kb.relations.emplace(k, std::move(rel));
    }
    return kb;
  }

  const LogicProgram& prog_;
  EvalOptions opts_;
  std::map<Key, WorkRel> store_;
  long atom_count_ = 0;
};

}  // namespace

const FactEntry* Relation::find(const std::vector<Term>& args) const {
  auto range = prefix_range(args, args.size());
  if (range.first == range.second) return nullptr;
  return &rows[range.first];
}

std::pair<std::size_t, std::size_t> Relation::prefix_range(
    const std::vector<Term>& prefix, std::size_t prefix_len) const {
  auto less_prefix = [prefix_len](const FactEntry& e,
                                  const std::vector<Term>& p) {
    std::size_t n = std::min(prefix_len, e.args.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(e.args[i], p[i])) return c < 0;
    return e.args.size() < prefix_len;
  };
  auto lo = std::lower_bound(rows.begin(), rows.end(), prefix, less_prefix);
  std::size_t a = static_cast<std::size_t>(lo - rows.begin());
  std::size_t b = a;
  while (b < rows.size()) {
    bool matches = true;
    for (std::size_t i = 0; i < prefix_len && matches; ++i)
      matches = compare(rows[b].args[i], prefix[i]) == 0;
    if (!matches) break;
    ++b;
  }
  return {a, b};
}

bool MaterializedKb::holds(const Atom& ground) const {
  const Relation* r = relation(ground.predicate, ground.arity());
  return r && r->find(ground.args) != nullptr;
}

std::size_t MaterializedKb::total_atoms() const {
  std::size_t n = 0;
  for (const auto& [k, r] : relations) n += r.rows.size();
  return n;
}

Rational lookup_value(const MaterializedKb& kb, const Atom& ground) {
  const Relation* r = kb.relation(ground.predicate, ground.arity());
  if (!r)
    throw KbError(KbError::Kind::AbsentFact,
                  "unknown predicate " + ground.predicate + "/" +
                      std::to_string(ground.arity()));
  const FactEntry* e = r->find(ground.args);
  if (e) return e->value ? *e->value : Rational(1);
  if (r->valued)
    throw KbError(KbError::Kind::AbsentFact,
                  "no value for " + to_string(ground));
  return Rational(0);
}

MaterializedKb evaluate(const LogicProgram& program, const EvalOptions& opts) {
  return Evaluator(program, opts).run();
}

}  // namespace rlp::logkb
