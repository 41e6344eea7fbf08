#pragma once

#include "rlp/dual_form.hpp"
#include "rlp/rational.hpp"

#include <optional>
#include <vector>

namespace rlp::lp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(SolveStatus s);

struct SimplexOptions {
  bool dantzig = false;       // default is Bland's rule
  long max_pivots = 1'000'000;
};

template <class Scalar>
struct scalar_traits {
  static constexpr bool exact = false;
  static Scalar eps() { return Scalar(1e-9); }
};
template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational eps() { return Rational(0); }
};

template <class Scalar>
struct SimplexResult {
  SolveStatus status = SolveStatus::Optimal;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;  // original variables
  Scalar objective = Scalar(0);                // <c,x> in min form
  long pivots = 0;
};

// Two-phase primal simplex on the full dense tableau:
//   minimize <c,x>  subject to  Ax <= b,  x free.
// Free variables are split x = x+ - x- internally; slack basis with
// artificial columns on rows that start infeasible. Bland's rule by
// default, which terminates on exact scalars; Dantzig pricing optional.
template <class Scalar>
SimplexResult<Scalar> tableau_simplex(
    const Eigen::SparseMatrix<Scalar>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c,
    const SimplexOptions& opts = {});

extern template SimplexResult<double> tableau_simplex<double>(
    const Eigen::SparseMatrix<double>&, const Eigen::VectorXd&,
    const Eigen::VectorXd&, const SimplexOptions&);
extern template SimplexResult<Rational> tableau_simplex<Rational>(
    const RatSparse&, const RatVector&, const RatVector&,
    const SimplexOptions&);

// ---------------------------------------------------------------------------
// high-level solve over a DualFormLp

struct SolverOptions {
  enum class Mode { RationalExact, Float } mode = Mode::RationalExact;
  bool dantzig = false;
  long max_pivots = 1'000'000;
};

// status + point + objective in the *minimization* form of the dual-form
// triplet; callers map back to the model's original sense
struct Solution {
  SolveStatus status = SolveStatus::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  std::optional<RatVector> x_exact;      // rational mode only
  std::optional<Rational> objective_exact;
  long pivots = 0;
};

// Rational mode runs the exact dense tableau; float mode runs the revised
// bounded simplex (see revised_simplex.hpp) which recovers bounds and
// equalities from the dual form before pivoting.
Solution solve(const DualFormLp& lp, const SolverOptions& opts = {});

using rlp::to_double;
Eigen::SparseMatrix<double> to_double(const RatSparse& A);
Eigen::VectorXd to_double(const RatVector& v);

}  // namespace rlp::lp
