#pragma once

#include "rlp/ground_lp.hpp"
#include "rlp/rational.hpp"

#include <string>
#include <vector>

namespace rlp::lp {

// Inequality-only normal form: minimize <c,x> subject to Ax <= b, variables
// free. Kept in exact rationals; solvers convert to their working scalar.
struct DualFormLp {
  RatSparse A;  // m x n
  RatVector b;
  RatVector c;
  std::vector<Atom> col_names;
  std::vector<std::string> row_provenance;

  // report map back to the original sense: value = sign * <c,x> + offset
  Rational objective_offset;
  bool negated_objective = false;  // original sense was maximize

  // rows i, i+1 that together encode one original equality row
  std::vector<std::pair<int, int>> equality_pairs;

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(A.nonZeros()); }

  Rational original_objective(const Rational& dual_value) const {
    return (negated_objective ? -dual_value : dual_value) + objective_offset;
  }
  double original_objective(double dual_value) const {
    return (negated_objective ? -dual_value : dual_value) +
           to_double(objective_offset);
  }
};

// maximize c |-> minimize -c; '=' row |-> a <= and a negated <= pair;
// '>=' row |-> negated <= row.
DualFormLp to_dual_form(const grounder::GroundLp& lp);

struct Feasibility {
  bool ok = true;
  double worst_violation = 0.0;  // max(Ax - b), 0 when no rows
  Eigen::Index worst_row = -1;
  std::string provenance;
};

Feasibility check_feasible(const DualFormLp& lp,
                           const Eigen::VectorXd& x, double tol);
// exact variant: ok iff max(Ax - b) <= tol holds in rational arithmetic
Feasibility check_feasible(const DualFormLp& lp, const RatVector& x,
                           const Rational& tol);

}  // namespace rlp::lp
