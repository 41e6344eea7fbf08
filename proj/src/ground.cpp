#include "rlp/ground_lp.hpp"

#include "json.hpp"

#include <sstream>

namespace rlp::grounder {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  for (const auto& [col, v] : o.coeffs) {
    auto it = coeffs.find(col);
    if (it == coeffs.end()) {
      if (v != 0) coeffs.emplace(col, v);
    } else {
      it->second += v;
      if (it->second == 0) coeffs.erase(it);
    }
  }
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  LinExpr neg = o;
  neg.scale(Rational(-1));
  return *this += neg;
}

void LinExpr::scale(const Rational& k) {
  if (k == 0) {
    coeffs.clear();
    constant = 0;
    return;
  }
  constant *= k;
  for (auto& [col, v] : coeffs) v *= k;
}

SizeReport GroundLp::stats() const {
  SizeReport r;
  r.cols = var_names.size();
  r.rows = rows.size();
  for (const Row& row : rows) r.nonzeros += row.expr.coeffs.size();
  return r;
}

int GroundLp::column(const Atom& name) const {
  for (std::size_t i = 0; i < var_names.size(); ++i)
    if (var_names[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

using lang::ParExpr;
using lang::RelOp;
using lang::RlpModel;
using lang::Role;
using logkb::MaterializedKb;

class Grounder {
 public:
  Grounder(const RlpModel& model, const MaterializedKb& kb)
      : model_(model), kb_(kb) {}

  GroundLp run() {
    GroundLp out;
    out.maximize = model_.objective.maximize;

    LinExpr obj = eval(model_.objective.expr, {}, "objective");
    if (obj.coeffs.empty())
      out.warnings.push_back(
          "objective has no variables; its queries may have empty answers");
    out.objective_offset = obj.constant;

    for (const lang::ConstraintTemplate& c : model_.constraints) {
      auto substs = c.index_query.empty()
                        ? std::vector<Substitution>{{}}
                        : logkb::query_set(kb_, c.index_query);
      for (const Substitution& theta : substs) {
        LinExpr lhs = eval(c.lhs, theta, c.label);
        lhs -= eval(c.rhs, theta, c.label);
        Row row;
        row.rhs = -lhs.constant;
        lhs.constant = 0;
        row.expr = std::move(lhs);
        row.rel = c.rel;
        row.provenance = c.label + theta_string(theta, c.index_query);
        rows_.push_back(std::move(row));
      }
    }

    out.var_names = std::move(names_);
    out.c.assign(out.var_names.size(), Rational(0));
    for (const auto& [col, v] : obj.coeffs) out.c[col] = v;
    out.rows = std::move(rows_);
    return out;
  }

 private:
  static std::string theta_string(const Substitution& theta,
                                  const std::vector<logkb::Literal>& query) {
    if (theta.empty()) return "";
    std::vector<std::string> vars;
    for (const logkb::Literal& l : query)
      if (l.kind == logkb::Literal::Kind::Positive) l.atom.collect_vars(vars);
    std::string s = " {";
    bool first = true;
    for (const std::string& v : vars) {
      auto it = theta.find(v);
      if (it == theta.end()) continue;
      if (!first) s += ", ";
      first = false;
      s += v + "/" + to_string(it->second);
    }
    return s + "}";
  }

  int column(const Atom& g) {
    auto it = col_of_.find(g);
    if (it != col_of_.end()) return it->second;
    int idx = static_cast<int>(names_.size());
    names_.push_back(g);
    col_of_.emplace(g, idx);
    return idx;
  }

  LinExpr eval(const ParExpr& e, const Substitution& theta,
               const std::string& where) {
    switch (e.kind) {
      case ParExpr::Kind::Number: {
        LinExpr r;
        r.constant = e.number;
        return r;
      }
      case ParExpr::Kind::AtomRef: {
        Atom g = substitute(e.atom, theta);
        if (!g.is_ground())
          throw GroundError("unbound variable in " + to_string(g) + " (" +
                            where + ")");
        Role role = model_.role(g.predicate, g.arity());
        if (role == Role::Defined)
          throw GroundError("grounding requires definitions to be expanded: " +
                            to_string(g));
        LinExpr r;
        if (role == Role::LpVar) {
          r.coeffs.emplace(column(g), Rational(1));
        } else {
          try {
            r.constant = logkb::lookup_value(kb_, g);
          } catch (const logkb::KbError& err) {
            throw GroundError(std::string(err.what()) + " (" + where + ")");
          }
        }
        return r;
      }
      case ParExpr::Kind::Neg: {
        LinExpr r = eval(e.kids[0], theta, where);
        r.scale(Rational(-1));
        return r;
      }
      case ParExpr::Kind::Add: {
        LinExpr r = eval(e.kids[0], theta, where);
        r += eval(e.kids[1], theta, where);
        return r;
      }
      case ParExpr::Kind::Sub: {
        LinExpr r = eval(e.kids[0], theta, where);
        r -= eval(e.kids[1], theta, where);
        return r;
      }
      case ParExpr::Kind::Mul: {
        LinExpr a = eval(e.kids[0], theta, where);
        LinExpr b = eval(e.kids[1], theta, where);
        if (!a.is_constant() && !b.is_constant())
          throw GroundError(
              "nonlinear product of two variable expressions in " + where);
        if (a.is_constant()) {
          b.scale(a.constant);
          return b;
        }
        a.scale(b.constant);
        return a;
      }
      case ParExpr::Kind::Div: {
        LinExpr a = eval(e.kids[0], theta, where);
        LinExpr b = eval(e.kids[1], theta, where);
        if (!b.is_constant())
          throw GroundError("division by a variable expression in " + where);
        if (b.constant == 0)
          throw GroundError("division by zero in " + where);
        a.scale(Rational(1) / b.constant);
        return a;
      }
      case ParExpr::Kind::SumSet: {
        LinExpr r;
        for (const Substitution& ext : logkb::query_set(kb_, e.query, theta)) {
          Substitution merged = theta;
          for (const auto& [v, t] : ext) merged[v] = t;
          r += eval(e.kids[0], merged, where);
        }
        return r;
      }
      case ParExpr::Kind::SumMulti: {
        LinExpr r;
        for (const auto& [ext, count] :
             logkb::query_multiset(kb_, e.query, theta)) {
          Substitution merged = theta;
          for (const auto& [v, t] : ext) merged[v] = t;
          LinExpr one = eval(e.kids[0], merged, where);
          one.scale(Rational(count));
          r += one;
        }
        return r;
      }
    }
    return {};
  }

  const RlpModel& model_;
  const MaterializedKb& kb_;
  std::vector<Atom> names_;
  std::map<Atom, int> col_of_;
  std::vector<Row> rows_;
};

}  // namespace

GroundLp ground(const lang::RlpModel& model, const logkb::MaterializedKb& kb) {
  return Grounder(model, kb).run();
}

std::string GroundLp::to_json() const {
  nlohmann::ordered_json j;
  j["sense"] = maximize ? "maximize" : "minimize";
  j["vars"] = nlohmann::ordered_json::array();
  for (const Atom& a : var_names) j["vars"].push_back(to_string(a));
  j["c"] = nlohmann::ordered_json::array();
  for (const Rational& v : c) j["c"].push_back(to_string(v));
  if (objective_offset != 0) j["offset"] = to_string(objective_offset);
  j["rows"] = nlohmann::ordered_json::array();
  for (const Row& r : rows) {
    nlohmann::ordered_json jr;
    jr["coeffs"] = nlohmann::ordered_json::object();
    for (const auto& [col, v] : r.expr.coeffs)
      jr["coeffs"][to_string(var_names[col])] = to_string(v);
    jr["rel"] = r.rel == lang::RelOp::Le   ? "<="
                : r.rel == lang::RelOp::Eq ? "="
                                           : ">=";
    jr["rhs"] = to_string(r.rhs);
    jr["provenance"] = r.provenance;
    j["rows"].push_back(std::move(jr));
  }
  return j.dump(2);
}

}  // namespace rlp::grounder
