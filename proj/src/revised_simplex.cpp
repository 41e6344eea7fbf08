#include "rlp/revised_simplex.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rlp::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr int kRefactorEvery = 64;
constexpr int kStallLimit = 2000;  // degenerate Dantzig pivots before Bland

struct Eta {
  int r;
  std::vector<std::pair<int, double>> w;  // off-pivot entries of B^-1 a_q
  double wr;
};

struct Prepared {
  Eigen::SparseMatrix<double> cols;  // structural rows, column access
  Eigen::VectorXd rhs;
  std::vector<bool> equality;  // slack fixed at zero
  Eigen::VectorXd lo, up;      // variable bounds from singleton rows
  bool empty_infeasible = false;
};

// Recover equalities (tagged row pairs) and variable bounds (singleton
// rows) from the inequality-only form; the remaining rows get slacks.
Prepared prepare(const DualFormLp& lp) {
  Prepared p;
  const Eigen::Index n = lp.cols();
  const Eigen::Index m = lp.rows();
  p.lo = Eigen::VectorXd::Constant(n, -kInf);
  p.up = Eigen::VectorXd::Constant(n, kInf);

  std::vector<char> skip(static_cast<std::size_t>(m), 0);
  std::vector<char> eq_first(static_cast<std::size_t>(m), 0);
  for (auto [a, bb] : lp.equality_pairs) {
    eq_first[static_cast<std::size_t>(a)] = 1;
    skip[static_cast<std::size_t>(bb)] = 1;
  }

  std::vector<int> cnt(static_cast<std::size_t>(m), 0);
  std::vector<std::pair<int, double>> single(static_cast<std::size_t>(m),
                                             {-1, 0.0});
  for (Eigen::Index j = 0; j < lp.A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it) {
      auto i = static_cast<std::size_t>(it.row());
      ++cnt[i];
      single[i] = {static_cast<int>(j), to_double(it.value())};
    }

  auto tighten = [&](int j, double a, double beta, bool eq) {
    double bound = beta / a;
    if (eq) {
      p.lo[j] = std::max(p.lo[j], bound);
      p.up[j] = std::min(p.up[j], bound);
    } else if (a > 0) {
      p.up[j] = std::min(p.up[j], bound);
    } else {
      p.lo[j] = std::max(p.lo[j], bound);
    }
  };

  std::vector<int> newrow(static_cast<std::size_t>(m), -1);
  std::vector<double> rhs;
  std::vector<bool> eqrows;
  for (Eigen::Index i = 0; i < m; ++i) {
    auto si = static_cast<std::size_t>(i);
    if (skip[si]) continue;
    bool eq = eq_first[si];
    double bi = to_double(lp.b[i]);
    if (cnt[si] == 0) {
      if (bi < -kFeasTol || (eq && std::abs(bi) > kFeasTol))
        p.empty_infeasible = true;
      continue;
    }
    if (cnt[si] == 1) {
      tighten(single[si].first, single[si].second, bi, eq);
      continue;
    }
    newrow[si] = static_cast<int>(rhs.size());
    rhs.push_back(bi);
    eqrows.push_back(eq);
  }

  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index j = 0; j < lp.A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it) {
      int r = newrow[static_cast<std::size_t>(it.row())];
      if (r >= 0)
        trips.emplace_back(r, static_cast<int>(j), to_double(it.value()));
    }

  const auto ms = static_cast<Eigen::Index>(rhs.size());
  p.cols.resize(ms, n);
  p.cols.setFromTriplets(trips.begin(), trips.end());
  p.rhs.resize(ms);
  for (Eigen::Index i = 0; i < ms; ++i)
    p.rhs[i] = rhs[static_cast<std::size_t>(i)];
  p.equality = std::move(eqrows);
  return p;
}

class RevisedSimplex {
 public:
  RevisedSimplex(const Prepared& p, const Eigen::VectorXd& cost,
                 const SolverOptions& opts)
      : p_(p),
        opts_(opts),
        m_(static_cast<int>(p.cols.rows())),
        n_(static_cast<int>(p.cols.cols())),
        use_bland_(!opts.dantzig) {
    ntot_ = n_ + m_;  // structurals then slacks
    cost_ = Eigen::VectorXd::Zero(ntot_);
    cost_.head(n_) = cost;
    lo_ = Eigen::VectorXd::Constant(ntot_, -kInf);
    up_ = Eigen::VectorXd::Constant(ntot_, kInf);
    lo_.head(n_) = p.lo;
    up_.head(n_) = p.up;
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = 0.0;
      up_[n_ + i] = p_.equality[static_cast<std::size_t>(i)] ? 0.0 : kInf;
    }
  }

  Solution run() {
    Solution out;
    for (int j = 0; j < ntot_; ++j)
      if (lo_[j] > up_[j] + kFeasTol) {
        out.status = SolveStatus::Infeasible;
        return out;
      }

    init_point();

    // phase 1: drive the total bound violation of the basics to zero
    while (true) {
      if (infeasibility() <= kFeasTol) break;
      Step s = step(/*phase1=*/true);
      if (s == Step::Moved) continue;
      out.pivots = pivots_;
      out.status = s == Step::Capped ? SolveStatus::IterLimit
                                     : SolveStatus::Infeasible;
      return out;
    }

    // phase 2: optimize the true cost
    while (true) {
      Step s = step(/*phase1=*/false);
      if (s == Step::Moved) continue;
      if (s == Step::Done) break;
      out.pivots = pivots_;
      out.status = s == Step::Capped ? SolveStatus::IterLimit
                                     : SolveStatus::Unbounded;
      return out;
    }

    polish();
    out.status = SolveStatus::Optimal;
    out.pivots = pivots_;
    out.x.resize(n_);
    for (int j = 0; j < n_; ++j) out.x[j] = value_[j];
    out.objective = cost_.head(n_).dot(out.x);
    return out;
  }

  // recompute the basic values from a fresh factorization so the final
  // point does not carry accumulated eta roundoff
  void polish() {
    if (m_ == 0) return;
    factorize();
    Eigen::VectorXd rhs = p_.rhs;
    for (int j = 0; j < ntot_; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)] || value_[j] == 0.0) continue;
      if (j < n_) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(p_.cols, j); it;
             ++it)
          rhs[it.row()] -= it.value() * value_[j];
      } else {
        rhs[j - n_] -= value_[j];
      }
    }
    Eigen::VectorXd xb = ftran(rhs);
    for (int i = 0; i < m_; ++i) value_[basis_[i]] = xb[i];
  }

 private:
  enum class Step { Moved, Done, NoRay, Capped };

  void init_point() {
    value_ = Eigen::VectorXd::Zero(ntot_);
    in_basis_.assign(static_cast<std::size_t>(ntot_), false);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j]))
        value_[j] = lo_[j];
      else if (std::isfinite(up_[j]))
        value_[j] = up_[j];
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      in_basis_[static_cast<std::size_t>(n_ + i)] = true;
    }
    Eigen::VectorXd ax = p_.cols * value_.head(n_);
    for (int i = 0; i < m_; ++i) value_[n_ + i] = p_.rhs[i] - ax[i];
    factorize();
  }

  double infeasibility() const {
    double s = 0;
    for (int i = 0; i < m_; ++i) {
      int v = basis_[i];
      if (value_[v] < lo_[v]) s += lo_[v] - value_[v];
      if (value_[v] > up_[v]) s += value_[v] - up_[v];
    }
    return s;
  }

  // One pricing + ratio-test + update step of the composite simplex. In
  // phase 1 the cost is the gradient of the total bound violation of the
  // basics; in phase 2 it is the true cost vector.
  Step step(bool phase1) {
    if (pivots_ >= opts_.max_pivots) return Step::Capped;

    Eigen::VectorXd cost;
    if (phase1) {
      cost = Eigen::VectorXd::Zero(ntot_);
      for (int i = 0; i < m_; ++i) {
        int v = basis_[i];
        if (value_[v] < lo_[v] - kFeasTol)
          cost[v] = -1;
        else if (value_[v] > up_[v] + kFeasTol)
          cost[v] = 1;
      }
    } else {
      cost = cost_;
    }

    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
    Eigen::VectorXd pi = btran(cb);

    // pricing
    int q = -1, dir = 0;
    double best = 0;
    auto consider = [&](int j, double d) {
      if (up_[j] - lo_[j] < 1e-15) return;  // fixed, never enters
      bool at_lo = std::isfinite(lo_[j]) && value_[j] <= lo_[j] + kFeasTol;
      bool at_up = std::isfinite(up_[j]) && value_[j] >= up_[j] - kFeasTol;
      bool is_free = !at_lo && !at_up;
      int want = 0;
      if ((at_lo || is_free) && d < -kDualTol)
        want = +1;
      else if ((at_up || is_free) && d > kDualTol)
        want = -1;
      if (want == 0) return;
      if (use_bland_) {
        if (q < 0 || j < q) {
          q = j;
          dir = want;
        }
      } else if (std::abs(d) > best + 1e-15) {
        best = std::abs(d);
        q = j;
        dir = want;
      }
    };
    Eigen::VectorXd piA = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(p_.cols, j); it; ++it)
        piA[j] += pi[it.row()] * it.value();
    for (int j = 0; j < ntot_; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)]) continue;
      consider(j, j < n_ ? cost[j] - piA[j] : cost[j] - pi[j - n_]);
    }
    if (q < 0) return phase1 ? Step::NoRay : Step::Done;

    // direction through the basis
    Eigen::VectorXd aq = Eigen::VectorXd::Zero(m_);
    if (q < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(p_.cols, q); it; ++it)
        aq[it.row()] = it.value();
    } else {
      aq[q - n_] = 1.0;
    }
    Eigen::VectorXd w = ftran(aq);

    // ratio test over x_B(t) = x_B - t*dir*w; basics stop at the first
    // bound breakpoint ahead (for violated basics that is the violated
    // bound itself)
    double limit = kInf;
    int leave = -1;
    double leave_target = 0;
    for (int i = 0; i < m_; ++i) {
      double rate = -dir * w[i];  // d value_[basis_i] / dt
      if (std::abs(rate) < kPivotTol) continue;
      int v = basis_[i];
      double target;
      if (rate > 0) {
        if (value_[v] < lo_[v] - kFeasTol)
          target = lo_[v];  // heading back into feasibility
        else if (value_[v] <= up_[v] + kFeasTol)
          target = up_[v];
        else
          continue;  // already above and moving away: no breakpoint ahead
      } else {
        if (value_[v] > up_[v] + kFeasTol)
          target = up_[v];
        else if (value_[v] >= lo_[v] - kFeasTol)
          target = lo_[v];
        else
          continue;
      }
      if (!std::isfinite(target)) continue;
      double t = (target - value_[v]) / rate;
      if (t < 0) t = 0;  // degeneracy guard
      if (t < limit - 1e-12 ||
          (t <= limit + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
        limit = t;
        leave = i;
        leave_target = target;
      }
    }

    double flip = kInf;
    if (std::isfinite(lo_[q]) && std::isfinite(up_[q])) flip = up_[q] - lo_[q];

    if (flip < limit) {
      value_[q] = dir > 0 ? up_[q] : lo_[q];
      for (int i = 0; i < m_; ++i) value_[basis_[i]] -= flip * dir * w[i];
      ++pivots_;
      track_stall(flip);
      return Step::Moved;
    }
    if (leave < 0) {
      // no breakpoint ahead: a ray (phase 2) or numerical trouble (phase 1,
      // the composite objective is bounded below and cannot ray out)
      return phase1 ? Step::Capped : Step::NoRay;
    }

    if (limit > 0) {
      value_[q] += limit * dir;
      for (int i = 0; i < m_; ++i) value_[basis_[i]] -= limit * dir * w[i];
    }
    int out_var = basis_[leave];
    value_[out_var] = leave_target;  // snap exactly onto the bound

    in_basis_[static_cast<std::size_t>(out_var)] = false;
    in_basis_[static_cast<std::size_t>(q)] = true;
    basis_[leave] = q;
    push_eta(leave, w);
    ++pivots_;
    track_stall(limit);
    if (static_cast<int>(etas_.size()) >= kRefactorEvery) factorize();
    return Step::Moved;
  }

  void track_stall(double step) {
    if (opts_.dantzig && !use_bland_) {
      stall_ = step <= 1e-12 ? stall_ + 1 : 0;
      if (stall_ > kStallLimit) use_bland_ = true;
    }
  }

  void factorize() {
    if (m_ == 0) {
      etas_.clear();
      return;
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m_; ++i) {
      int v = basis_[i];
      if (v < n_) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(p_.cols, v); it;
             ++it)
          trips.emplace_back(it.row(), i, it.value());
      } else {
        trips.emplace_back(v - n_, i, 1.0);
      }
    }
    B.setFromTriplets(trips.begin(), trips.end());
    lu_.compute(B);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("simplex basis factorization failed");
    Eigen::SparseMatrix<double> Bt = B.transpose();
    lut_.compute(Bt);
    if (lut_.info() != Eigen::Success)
      throw std::runtime_error("simplex basis factorization failed");
    etas_.clear();
  }

  Eigen::VectorXd ftran(const Eigen::VectorXd& v) const {
    if (m_ == 0) return v;
    Eigen::VectorXd y = lu_.solve(v);
    for (const Eta& e : etas_) {
      double yr = y[e.r] / e.wr;
      for (const auto& [i, wi] : e.w) y[i] -= wi * yr;
      y[e.r] = yr;
    }
    return y;
  }

  Eigen::VectorXd btran(const Eigen::VectorXd& v) const {
    if (m_ == 0) return v;
    Eigen::VectorXd u = v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = u[it->r];
      for (const auto& [i, wi] : it->w) s -= wi * u[i];
      u[it->r] = s / it->wr;
    }
    return lut_.solve(u);
  }

  void push_eta(int r, const Eigen::VectorXd& w) {
    if (std::abs(w[r]) < kPivotTol) {
      factorize();  // unstable update, rebuild from the new basis
      return;
    }
    Eta e;
    e.r = r;
    e.wr = w[r];
    for (int i = 0; i < m_; ++i)
      if (i != r && std::abs(w[i]) > 1e-14) e.w.emplace_back(i, w[i]);
    etas_.push_back(std::move(e));
  }

  const Prepared& p_;
  SolverOptions opts_;
  int m_, n_, ntot_ = 0;
  bool use_bland_;
  Eigen::VectorXd cost_, lo_, up_, value_;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
  std::vector<Eta> etas_;
  long pivots_ = 0;
  int stall_ = 0;
};

}  // namespace

Solution revised_simplex_solve(const DualFormLp& lp, const SolverOptions& opts) {
  Prepared p = prepare(lp);
  Solution out;
  if (p.empty_infeasible) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  Eigen::VectorXd c = to_double(lp.c);
  RevisedSimplex solver(p, c, opts);
  out = solver.run();
  return out;
}

}  // namespace rlp::lp
