#pragma once

#include "rlp/simplex.hpp"

#include <vector>

namespace rlp::lp::detail {

// Full-tableau two-phase simplex. Column layout: [x+ (n), x- (n), slacks (m),
// artificials]. Cost rows are carried through the pivots together with the
// data rows; entry [width] holds the right-hand side (negative objective for
// cost rows).
template <class Scalar>
class Tableau {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

 public:
  Tableau(const Eigen::SparseMatrix<Scalar>& A, const Vec& b, const Vec& c,
          const SimplexOptions& opts)
      : opts_(opts),
        m_(static_cast<int>(A.rows())),
        n_(static_cast<int>(A.cols())) {
    eps_ = scalar_traits<Scalar>::eps();

    std::vector<int> art_rows;
    for (int i = 0; i < m_; ++i)
      if (b[i] < Scalar(0)) art_rows.push_back(i);
    n_art_ = static_cast<int>(art_rows.size());
    width_ = 2 * n_ + m_ + n_art_;

    T_ = Mat::Zero(m_, width_ + 1);
    for (int j = 0; j < A.outerSize(); ++j)
      for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(A, j); it;
           ++it) {
        T_(it.row(), j) = it.value();
        T_(it.row(), n_ + j) = -it.value();
      }
    for (int i = 0; i < m_; ++i) {
      T_(i, 2 * n_ + i) = Scalar(1);  // slack
      T_(i, width_) = b[i];
    }
    // negate infeasible rows so the right-hand side is nonnegative, then
    // give each an artificial basic column
    basis_.resize(m_);
    int art = 0;
    for (int i = 0; i < m_; ++i) basis_[i] = 2 * n_ + i;
    for (int i : art_rows) {
      T_.row(i) = -T_.row(i);
      int col = 2 * n_ + m_ + art;
      T_(i, col) = Scalar(1);
      basis_[i] = col;
      ++art;
    }

    cost2_ = Vec::Zero(width_ + 1);
    for (int j = 0; j < n_; ++j) {
      cost2_[j] = c[j];
      cost2_[n_ + j] = -c[j];
    }
    cost1_ = Vec::Zero(width_ + 1);
    for (int i : art_rows) cost1_ -= T_.row(i).transpose();
    for (int i : art_rows) cost1_[basis_[i]] = Scalar(0);
  }

  SimplexResult<Scalar> run() {
    SimplexResult<Scalar> res;
    if (n_art_ > 0) {
      if (!iterate(/*phase=*/1)) {
        res.status = SolveStatus::IterLimit;
        res.pivots = pivots_;
        return res;
      }
      // phase-1 optimum must be zero for feasibility
      if (-cost1_[width_] > eps_) {
        res.status = SolveStatus::Infeasible;
        res.pivots = pivots_;
        return res;
      }
      expel_artificials();
    }
    if (!iterate(/*phase=*/2)) {
      res.status = unbounded_ ? SolveStatus::Unbounded : SolveStatus::IterLimit;
      res.pivots = pivots_;
      return res;
    }
    res.status = SolveStatus::Optimal;
    res.pivots = pivots_;
    res.x = Vec::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      int v = basis_[i];
      if (v < n_)
        res.x[v] += T_(i, width_);
      else if (v < 2 * n_)
        res.x[v - n_] -= T_(i, width_);
    }
    res.objective = -cost2_[width_];
    return res;
  }

 private:
  bool eligible_col(int j, int phase) const {
    if (phase == 2 && j >= 2 * n_ + m_) return false;  // artificials barred
    return true;
  }

  // returns false when the pivot cap was hit or the problem is unbounded
  // (phase 2); sets unbounded_ in the latter case
  bool iterate(int phase) {
    Vec& cost = phase == 1 ? cost1_ : cost2_;
    while (true) {
      int q = -1;
      if (opts_.dantzig) {
        Scalar best = -eps_;
        for (int j = 0; j < width_; ++j)
          if (eligible_col(j, phase) && cost[j] < best) {
            best = cost[j];
            q = j;
          }
      } else {
        for (int j = 0; j < width_; ++j)
          if (eligible_col(j, phase) && cost[j] < -eps_) {
            q = j;
            break;
          }
      }
      if (q < 0) return true;  // optimal for this phase

      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (T_(i, q) <= eps_) continue;
        if (r < 0) {
          r = i;
          continue;
        }
        // lexicographic-by-index tie break on the ratio (Bland-safe)
        Scalar lhs = T_(i, width_) * T_(r, q);
        Scalar rhs = T_(r, width_) * T_(i, q);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r < 0) {
        unbounded_ = phase == 2;
        return phase != 2 ? true : false;
      }
      pivot(r, q);
      if (++pivots_ > opts_.max_pivots) return false;
    }
  }

  void pivot(int r, int q) {
    T_.row(r) /= T_(r, q);
    T_(r, q) = Scalar(1);  // kill residual rounding on the pivot itself
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      Scalar f = T_(i, q);
      if (f != Scalar(0)) T_.row(i) -= f * T_.row(r);
    }
    Scalar f1 = cost1_[q];
    if (f1 != Scalar(0)) cost1_ -= f1 * T_.row(r).transpose();
    Scalar f2 = cost2_[q];
    if (f2 != Scalar(0)) cost2_ -= f2 * T_.row(r).transpose();
    basis_[r] = q;
  }

  // after phase 1, pivot zero-valued artificial basics onto structural
  // columns where possible; rows with no structural support are redundant
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < 2 * n_ + m_) continue;
      int q = -1;
      for (int j = 0; j < 2 * n_ + m_; ++j)
        if (T_(i, j) > eps_ || T_(i, j) < -eps_) {
          q = j;
          break;
        }
      if (q >= 0) {
        pivot(i, q);
        ++pivots_;
      }
    }
  }

  SimplexOptions opts_;
  int m_, n_, n_art_ = 0, width_ = 0;
  Scalar eps_;
  Mat T_;
  Vec cost1_, cost2_;
  std::vector<int> basis_;
  long pivots_ = 0;
  bool unbounded_ = false;
};

}  // namespace rlp::lp::detail
