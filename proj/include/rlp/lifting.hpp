#pragma once

#include "rlp/dual_form.hpp"
#include "rlp/simplex.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rlp::lifting {

// Bipartite colored graph of an LP triplet: one vertex per constraint row,
// one per variable column, an edge wherever A_ij != 0. Edge colors encode
// the exact coefficient values, row vertex colors the b entries, column
// vertex colors the c entries; row and column colors never collide.
struct CoefficientGraph {
  int m = 0;  // row vertices are 0..m-1, column vertices m..m+n-1
  int n = 0;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, edge color)
  std::vector<int> init_color;

  // audit maps: color id -> exact value it stands for
  std::vector<Rational> row_color_value;
  std::vector<Rational> col_color_value;
  std::vector<Rational> edge_color_value;

  int vertices() const { return m + n; }
};

struct LiftOptions {
  bool row_dedup = true;
  // when set, values are bucketed by rounding to this many decimals before
  // coloring; exact value equality otherwise (bucketing can merge unequal
  // values and then soundness rests on the buckets being faithful)
  std::optional<int> color_eps_decimals;
};

CoefficientGraph build_coefficient_graph(
    const lp::DualFormLp& lp, std::optional<int> color_eps_decimals = {});

// Bipartite equitable partition {P_1..P_p} over columns, {Q_1..Q_q} over
// rows. Class ids are canonical: numbered by first member in vertex order.
struct Partition {
  std::vector<int> row_class;  // size m, values 0..num_row_classes-1
  std::vector<int> col_class;  // size n, values 0..num_col_classes-1
  int num_row_classes = 0;
  int num_col_classes = 0;
  int rounds = 0;  // refinement rounds that changed the partition

  std::vector<int> row_class_sizes() const;
  std::vector<int> col_class_sizes() const;
};

// Colour refinement with exact signature tables: each round recolors every
// vertex by (own color, sorted multiset of (neighbor color, edge color)),
// compared exactly, renumbered by first occurrence in vertex order. Stops
// when the partition no longer refines; at most |V| rounds.
Partition color_passing(const CoefficientGraph& g);

struct EquitableCheck {
  bool ok = true;
  std::string witness;  // first violating vertex pair and class on failure
};

// Brute-force definitional check over all (class, class, edge color)
// triples; the oracle for color_passing.
EquitableCheck verify_equitable(const CoefficientGraph& g, const Partition& p);

// Block-constant doubly stochastic matrices (X_P over columns, X_Q over
// rows): entry 1/|class| for vertices in the same class, 0 otherwise.
std::pair<RatSparse, RatSparse> fractional_automorphism(const Partition& p);

// Characteristic matrix of the column partition, stored structurally as the
// class assignment plus class sizes. The normalized form has entries
// 1/sqrt(|P_m|); the unnormalized form is the 0/1 incidence matrix with the
// same column span, which keeps the reduced system rational.
struct CharMatrix {
  std::vector<int> col_class;
  std::vector<int> class_size;

  int n() const { return static_cast<int>(col_class.size()); }
  int p() const { return static_cast<int>(class_size.size()); }

  RatSparse unnormalized() const;                 // B, 0/1
  Eigen::SparseMatrix<double> normalized() const; // B~, 1/sqrt(|P|)
  RatSparse flat() const;                         // X_P = B~ B~^T, rational
};

CharMatrix char_matrix(const Partition& p);

struct LpSize {
  std::size_t vars = 0;
  std::size_t rows = 0;
  std::size_t nnz = 0;
};

// Reduced program. `reduced` is the exact triplet (A B, b, B^T c) over the
// unnormalized incidence matrix; scaling columns by 1/sqrt(|P_m|) gives the
// normalized triplet (A B~, b, B~^T c), available through the accessors.
// Both describe the same LP up to the invertible diagonal reparametrization
// y~ = diag(sqrt(|P_m|)) y, so optima and unlifted points coincide.
struct LiftedLp {
  lp::DualFormLp reduced;
  CharMatrix cm;
  bool deduped = false;
  std::vector<int> kept_row;      // representative ground row per kept row
  std::vector<int> row_class_of;  // ground row -> its class id

  Eigen::SparseMatrix<double> normalized_A() const;
  Eigen::VectorXd normalized_c() const;
};

// Project the LP onto the span of the column partition. Within one row
// class the projected rows are identical (checked exactly); with dedup on,
// one representative per class is kept.
LiftedLp lift(const lp::DualFormLp& lp, const Partition& p,
              const LiftOptions& opts = {});

// x = B y: the ground point is constant on each column class.
RatVector unlift(const LiftedLp& lifted, const RatVector& y);
Eigen::VectorXd unlift(const LiftedLp& lifted, const Eigen::VectorXd& y);

struct LiftReport {
  LpSize ground, lifted;
  int rounds = 0;
  bool verified = false;
  std::map<std::string, double> times_ms;  // graph, colorpass, lift, solve, unlift
  std::string to_json(bool with_times) const;
};

struct LiftedSolveResult {
  lp::Solution solution;  // in ground coordinates, min-form objective
  LiftReport report;
};

// Full pipeline of the reduction: build graph, color-pass, lift, solve the
// reduced LP, unlift, and verify the unlifted point against the ground LP
// (feasibility at 1e-9 / exact, objective equality). A verification failure
// is a hard error. Degenerate inputs (no rows or no columns) short-circuit
// to a plain solve.
LiftedSolveResult lifted_solve(const lp::DualFormLp& lp,
                               const lp::SolverOptions& solver_opts = {},
                               const LiftOptions& lift_opts = {});

}  // namespace rlp::lifting
