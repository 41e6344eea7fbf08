#include "rlp/simplex.hpp"

#include "rlp/detail/tableau_impl.hpp"
#include "rlp/revised_simplex.hpp"

namespace rlp::lp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterLimit: return "iteration-limit";
  }
  return "?";
}

template <class Scalar>
SimplexResult<Scalar> tableau_simplex(
    const Eigen::SparseMatrix<Scalar>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c,
    const SimplexOptions& opts) {
  return detail::Tableau<Scalar>(A, b, c, opts).run();
}

template SimplexResult<double> tableau_simplex<double>(
    const Eigen::SparseMatrix<double>&, const Eigen::VectorXd&,
    const Eigen::VectorXd&, const SimplexOptions&);
template SimplexResult<Rational> tableau_simplex<Rational>(
    const RatSparse&, const RatVector&, const RatVector&,
    const SimplexOptions&);

Eigen::SparseMatrix<double> to_double(const RatSparse& A) {
  Eigen::SparseMatrix<double> out(A.rows(), A.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (Eigen::Index j = 0; j < A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(A, j); it; ++it)
      trips.emplace_back(it.row(), it.col(), to_double(it.value()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::VectorXd to_double(const RatVector& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

Solution solve(const DualFormLp& lp, const SolverOptions& opts) {
  if (opts.mode == SolverOptions::Mode::Float)
    return revised_simplex_solve(lp, opts);

  SimplexOptions sopts;
  sopts.dantzig = opts.dantzig;
  sopts.max_pivots = opts.max_pivots;
  auto res = tableau_simplex<Rational>(lp.A, lp.b, lp.c, sopts);

  Solution out;
  out.status = res.status;
  out.pivots = res.pivots;
  if (res.status == SolveStatus::Optimal) {
    out.x_exact = res.x;
    out.objective_exact = res.objective;
    out.x = to_double(res.x);
    out.objective = to_double(res.objective);
  }
  return out;
}

}  // namespace rlp::lp
