#include "rlp/dual_form.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace rlp::lp {

DualFormLp to_dual_form(const grounder::GroundLp& lp) {
  DualFormLp out;
  const Eigen::Index n = static_cast<Eigen::Index>(lp.var_names.size());
  out.col_names = lp.var_names;
  out.objective_offset = lp.objective_offset;
  out.negated_objective = lp.maximize;
  out.c.resize(n);
  for (Eigen::Index j = 0; j < n; ++j)
    out.c[j] = lp.maximize ? -lp.c[j] : lp.c[j];

  std::vector<Eigen::Triplet<Rational>> trips;
  std::vector<Rational> b;
  auto add_row = [&](const grounder::Row& row, bool negate,
                     const char* suffix) {
    Eigen::Index r = static_cast<Eigen::Index>(b.size());
    for (const auto& [col, v] : row.expr.coeffs)
      trips.emplace_back(r, col, negate ? -v : v);
    b.push_back(negate ? -row.rhs : row.rhs);
    out.row_provenance.push_back(row.provenance + suffix);
    return r;
  };

  for (const grounder::Row& row : lp.rows) {
    switch (row.rel) {
      case lang::RelOp::Le:
        add_row(row, false, "");
        break;
      case lang::RelOp::Ge:
        add_row(row, true, "");
        break;
      case lang::RelOp::Eq: {
        Eigen::Index a = add_row(row, false, " [<=]");
        Eigen::Index bb = add_row(row, true, " [>=]");
        out.equality_pairs.emplace_back(static_cast<int>(a),
                                        static_cast<int>(bb));
        break;
      }
    }
  }

  out.A.resize(static_cast<Eigen::Index>(b.size()), n);
  out.A.setFromTriplets(trips.begin(), trips.end());
  out.b.resize(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    out.b[static_cast<Eigen::Index>(i)] = b[i];
  return out;
}

Feasibility check_feasible(const DualFormLp& lp, const Eigen::VectorXd& x,
                           double tol) {
  Feasibility f;
  const Eigen::Index m = lp.rows();
  if (m == 0) return f;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < lp.A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it)
      r[it.row()] += to_double(it.value()) * x[j];
  double worst = -std::numeric_limits<double>::infinity();
  Eigen::Index worst_row = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double v = r[i] - to_double(lp.b[i]);
    if (v > worst) {
      worst = v;
      worst_row = i;
    }
  }
  f.worst_violation = std::max(0.0, worst);
  f.worst_row = worst_row;
  f.ok = worst <= tol;
  if (!lp.row_provenance.empty())
    f.provenance = lp.row_provenance[static_cast<std::size_t>(worst_row)];
  return f;
}

Feasibility check_feasible(const DualFormLp& lp, const RatVector& x,
                           const Rational& tol) {
  Feasibility f;
  const Eigen::Index m = lp.rows();
  if (m == 0) return f;
  RatVector r = RatVector::Zero(m);
  for (Eigen::Index j = 0; j < lp.A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it)
      r[it.row()] += it.value() * x[j];
  Rational worst;
  bool have = false;
  Eigen::Index worst_row = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    Rational v = r[i] - lp.b[i];
    if (!have || v > worst) {
      worst = v;
      worst_row = i;
      have = true;
    }
  }
  f.worst_violation = to_double(worst > 0 ? worst : Rational(0));
  f.worst_row = worst_row;
  f.ok = worst <= tol;
  if (!lp.row_provenance.empty())
    f.provenance = lp.row_provenance[static_cast<std::size_t>(worst_row)];
  return f;
}

}  // namespace rlp::lp
