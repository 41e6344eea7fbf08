#include "rlp/lifting.hpp"

#include "rlp/ground_lp.hpp"

#include "doctest.h"
#include "lp_gen.hpp"
#include "test_util.hpp"

#include <random>
#include <set>

using namespace rlp;
using namespace rlp::lifting;

namespace {

lp::DualFormLp toy_lp() {
  auto model = lang::parse_rlp(read_model("toy.rlp"));
  auto kb = logkb::evaluate(logkb::parse_logkb(read_model("toy.lkb")));
  return lp::to_dual_form(grounder::ground(lang::to_prenex(model), kb));
}

lp::DualFormLp flow_dual() {
  auto model = lang::parse_rlp(read_model("flow.rlp"));
  auto kb = logkb::evaluate(logkb::parse_logkb(read_model("flow_fig4.lkb")));
  return lp::to_dual_form(grounder::ground(lang::to_prenex(model), kb));
}

// Frucht graph: 12 vertices, 18 edges, cubic, trivial automorphism group.
// LP: maximize sum x_v subject to x_u + x_v <= 2 per edge; uniform colors.
lp::DualFormLp frucht_lp() {
  static const int edges[18][2] = {
      {0, 1}, {1, 2}, {2, 3}, {3, 4},  {4, 5},  {5, 6},  {6, 7},  {7, 8},
      {8, 9}, {9, 10}, {10, 11}, {11, 0}, {0, 7}, {1, 11}, {2, 10}, {3, 5},
      {4, 9}, {6, 8}};
  lp::DualFormLp lp;
  std::vector<Eigen::Triplet<Rational>> trips;
  lp.b.resize(18);
  lp.c.resize(12);
  for (int j = 0; j < 12; ++j) {
    lp.c[j] = Rational(-1);  // minimize -sum x  (i.e. maximize sum x)
    lp.col_names.push_back(Atom{"v" + std::to_string(j), {}});
  }
  for (int i = 0; i < 18; ++i) {
    trips.emplace_back(i, edges[i][0], Rational(1));
    trips.emplace_back(i, edges[i][1], Rational(1));
    lp.b[i] = Rational(2);
    lp.row_provenance.push_back("e" + std::to_string(i));
  }
  lp.A.resize(18, 12);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  lp.negated_objective = true;
  return lp;
}

RatVector rat_vec(std::initializer_list<int> xs) {
  RatVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (int x : xs) v[i++] = Rational(x);
  return v;
}

}  // namespace

TEST_CASE("coefficient graph of the toy LP matches the worked example") {
  auto g = build_coefficient_graph(toy_lp());
  CHECK(g.m == 4);
  CHECK(g.n == 3);
  // column colors: {x,y} share c=0, {z} has c=1
  CHECK(g.init_color[4] == g.init_color[5]);
  CHECK(g.init_color[4] != g.init_color[6]);
  // row colors: b = 1, 0, 0, -1
  CHECK(g.init_color[1] == g.init_color[2]);
  CHECK(g.init_color[0] != g.init_color[1]);
  CHECK(g.init_color[0] != g.init_color[3]);
  // no row color equals a column color
  for (int i = 0; i < 4; ++i)
    for (int j = 4; j < 7; ++j) CHECK(g.init_color[i] != g.init_color[j]);
  // edge colors partition into {1} and {-1}
  CHECK(g.edge_color_value.size() == 2);
  std::set<std::string> vals;
  for (const auto& v : g.edge_color_value) vals.insert(to_string(v));
  CHECK(vals == std::set<std::string>{"-1", "1"});
}

TEST_CASE("identity LP gives disjoint equal-colored edges") {
  lp::DualFormLp lp;
  const int n = 5;
  std::vector<Eigen::Triplet<Rational>> trips;
  lp.b.resize(n);
  lp.c.resize(n);
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, Rational(1));
    lp.b[i] = Rational(7);
    lp.c[i] = Rational(3);
    lp.col_names.push_back(Atom{"x" + std::to_string(i), {}});
  }
  lp.A.resize(n, n);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  auto g = build_coefficient_graph(lp);
  CHECK(g.edge_color_value.size() == 1);
  for (const auto& a : g.adj) CHECK(a.size() == 1);

  auto part = color_passing(g);
  CHECK(part.num_col_classes == 1);
  CHECK(part.num_row_classes == 1);
}

TEST_CASE("color passing reproduces the toy partition") {
  auto g = build_coefficient_graph(toy_lp());
  auto part = color_passing(g);
  REQUIRE(part.num_col_classes == 2);
  REQUIRE(part.num_row_classes == 3);
  CHECK(part.col_class[0] == part.col_class[1]);  // {x,y}
  CHECK(part.col_class[0] != part.col_class[2]);  // {z} separate
  CHECK(part.row_class[1] == part.row_class[2]);  // {r2,r3}
  CHECK(part.row_class[0] != part.row_class[1]);
  CHECK(part.row_class[0] != part.row_class[3]);

  auto check = verify_equitable(g, part);
  CHECK(check.ok);
}

TEST_CASE("Frucht LP collapses to single classes") {
  auto lp = frucht_lp();
  auto g = build_coefficient_graph(lp);
  CHECK(g.edge_color_value.size() == 1);
  auto part = color_passing(g);
  CHECK(part.num_col_classes == 1);
  CHECK(part.num_row_classes == 1);
  CHECK(verify_equitable(g, part).ok);
}

TEST_CASE("all-distinct colors yield the discrete partition in zero rounds") {
  lp::DualFormLp lp;
  const int n = 4;
  std::vector<Eigen::Triplet<Rational>> trips;
  lp.b.resize(n);
  lp.c.resize(n);
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, Rational(1));
    lp.b[i] = Rational(i + 1);
    lp.c[i] = Rational(10 + i);
    lp.col_names.push_back(Atom{"x" + std::to_string(i), {}});
  }
  lp.A.resize(n, n);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  auto part = color_passing(build_coefficient_graph(lp));
  CHECK(part.num_col_classes == n);
  CHECK(part.num_row_classes == n);
  CHECK(part.rounds == 0);
}

TEST_CASE("verify_equitable rejects a merged toy partition") {
  auto g = build_coefficient_graph(toy_lp());
  auto part = color_passing(g);
  // merge {x,y} with {z}
  Partition bad = part;
  for (auto& c : bad.col_class) c = 0;
  bad.num_col_classes = 1;
  auto check = verify_equitable(g, bad);
  CHECK_FALSE(check.ok);
  CHECK(!check.witness.empty());
}

TEST_CASE("singleton classes are vacuously equitable") {
  auto g = build_coefficient_graph(flow_dual());
  Partition discrete;
  discrete.row_class.resize(static_cast<std::size_t>(g.m));
  discrete.col_class.resize(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.m; ++i) discrete.row_class[i] = i;
  for (int j = 0; j < g.n; ++j) discrete.col_class[j] = j;
  discrete.num_row_classes = g.m;
  discrete.num_col_classes = g.n;
  CHECK(verify_equitable(g, discrete).ok);
}

TEST_CASE("fractional automorphism of the toy partition") {
  auto lp = toy_lp();
  auto part = color_passing(build_coefficient_graph(lp));
  auto [xp, xq] = fractional_automorphism(part);

  RatMatrix XP = RatMatrix(xp);
  CHECK(XP(0, 0) == Rational(1, 2));
  CHECK(XP(0, 1) == Rational(1, 2));
  CHECK(XP(1, 0) == Rational(1, 2));
  CHECK(XP(0, 2) == 0);
  CHECK(XP(2, 2) == 1);

  // X_Q A = A X_P, c^T X_P = c^T, X_Q b = b, all exactly
  RatSparse lhs = xq * lp.A;
  RatSparse rhs = lp.A * xp;
  RatMatrix L(lhs), R(rhs);
  CHECK(L == R);
  RatVector cX = xp.transpose() * lp.c;
  for (int j = 0; j < 3; ++j) CHECK(cX[j] == lp.c[j]);
  RatVector qb = xq * lp.b;
  for (int i = 0; i < 4; ++i) CHECK(qb[i] == lp.b[i]);
}

TEST_CASE("discrete partition gives identity automorphisms") {
  Partition p;
  p.row_class = {0, 1};
  p.col_class = {0, 1, 2};
  p.num_row_classes = 2;
  p.num_col_classes = 3;
  auto [xp, xq] = fractional_automorphism(p);
  CHECK(RatMatrix(xp) == RatMatrix(RatMatrix::Identity(3, 3)));
  CHECK(RatMatrix(xq) == RatMatrix(RatMatrix::Identity(2, 2)));
}

TEST_CASE("frucht partition gives the all-ones automorphism") {
  auto lp = frucht_lp();
  auto part = color_passing(build_coefficient_graph(lp));
  auto [xp, xq] = fractional_automorphism(part);
  RatMatrix XP(xp);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) CHECK(XP(i, j) == Rational(1, 12));
}

TEST_CASE("characteristic matrix basics") {
  Partition p;
  p.col_class = {0, 0, 1};
  p.row_class = {0};
  p.num_col_classes = 2;
  p.num_row_classes = 1;
  auto cm = char_matrix(p);
  auto Bn = Eigen::MatrixXd(cm.normalized());
  CHECK(Bn(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(Bn(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(Bn(2, 1) == doctest::Approx(1.0));
  CHECK(Bn(2, 0) == 0.0);

  // singleton classes give the identity
  Partition q;
  q.col_class = {0, 1, 2};
  q.num_col_classes = 3;
  q.row_class = {0};
  q.num_row_classes = 1;
  auto cmq = char_matrix(q);
  CHECK(Eigen::MatrixXd(cmq.normalized())
            .isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("B~ B~^T equals the flat matrix on random partitions") {
  std::mt19937 rng(99);
  for (int t = 0; t < 50; ++t) {
    std::uniform_int_distribution<int> nd(1, 12);
    int n = nd(rng);
    std::uniform_int_distribution<int> kd(0, n - 1);
    Partition p;
    p.col_class.resize(static_cast<std::size_t>(n));
    std::set<int> used;
    for (int i = 0; i < n; ++i) {
      p.col_class[static_cast<std::size_t>(i)] = kd(rng);
      used.insert(p.col_class[static_cast<std::size_t>(i)]);
    }
    // compact ids
    std::map<int, int> remap;
    for (int u : used) remap.emplace(u, static_cast<int>(remap.size()));
    for (auto& c : p.col_class) c = remap[c];
    p.num_col_classes = static_cast<int>(remap.size());
    p.num_row_classes = 1;
    p.row_class = {0};

    auto cm = char_matrix(p);
    Eigen::MatrixXd Bn(cm.normalized());
    Eigen::MatrixXd prod = Bn * Bn.transpose();
    RatMatrix flat(cm.flat());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(prod(i, j) == doctest::Approx(rlp::to_double(flat(i, j)))
                                .epsilon(1e-12));
    // orthonormal columns
    Eigen::MatrixXd gram = Bn.transpose() * Bn;
    CHECK(gram.isApprox(
        Eigen::MatrixXd::Identity(cm.p(), cm.p()), 1e-12));
  }
}

TEST_CASE("lifting the toy LP reproduces the worked reduction") {
  auto lp = toy_lp();
  auto part = color_passing(build_coefficient_graph(lp));

  LiftOptions keep_all;
  keep_all.row_dedup = false;
  auto lifted = lift(lp, part, keep_all);
  REQUIRE(lifted.reduced.cols() == 2);
  REQUIRE(lifted.reduced.rows() == 4);

  // unnormalized reduced system: A B = [[2,1],[-1,0],[-1,0],[2,-1]]
  RatMatrix AB(lifted.reduced.A);
  CHECK(AB(0, 0) == 2);
  CHECK(AB(0, 1) == 1);
  CHECK(AB(1, 0) == -1);
  CHECK(AB(1, 1) == 0);
  CHECK(AB(2, 0) == -1);
  CHECK(AB(3, 0) == 2);
  CHECK(AB(3, 1) == -1);
  CHECK(lifted.reduced.c[0] == 0);
  CHECK(lifted.reduced.c[1] == 1);

  // normalized (paper) form: A B~ = [[2/sqrt2, 1], [-1/sqrt2, 0], ...]
  Eigen::MatrixXd ABn(lifted.normalized_A());
  const double s2 = std::sqrt(2.0);
  CHECK(ABn(0, 0) == doctest::Approx(2.0 / s2));
  CHECK(ABn(0, 1) == doctest::Approx(1.0));
  CHECK(ABn(1, 0) == doctest::Approx(-1.0 / s2));
  CHECK(ABn(3, 0) == doctest::Approx(2.0 / s2));
  CHECK(ABn(3, 1) == doctest::Approx(-1.0));
  CHECK(lifted.normalized_c()[0] == doctest::Approx(0.0));
  CHECK(lifted.normalized_c()[1] == doctest::Approx(1.0));

  // with dedup the duplicate row {r2,r3} collapses: 3 rows
  auto deduped = lift(lp, part, {});
  CHECK(deduped.reduced.rows() == 3);
  CHECK(deduped.deduped);
}

TEST_CASE("discrete partition lifts to the same LP") {
  auto lp = toy_lp();
  Partition discrete;
  discrete.col_class = {0, 1, 2};
  discrete.row_class = {0, 1, 2, 3};
  discrete.num_col_classes = 3;
  discrete.num_row_classes = 4;
  auto lifted = lift(lp, discrete, {});
  CHECK(lifted.reduced.cols() == 3);
  CHECK(lifted.reduced.rows() == 4);
  CHECK(RatMatrix(lifted.reduced.A) == RatMatrix(lp.A));
  for (int j = 0; j < 3; ++j) CHECK(lifted.reduced.c[j] == lp.c[j]);
}

TEST_CASE("unlift maps class values back to members") {
  auto lp = toy_lp();
  auto part = color_passing(build_coefficient_graph(lp));
  auto lifted = lift(lp, part, {});

  // solving the reduced system by hand gives y = (0, 1) in unnormalized
  // coordinates; unlifting yields (0,0,1)
  RatVector y = rat_vec({0, 1});
  RatVector x = unlift(lifted, y);
  CHECK(x[0] == 0);
  CHECK(x[1] == 0);
  CHECK(x[2] == 1);

  RatVector zero = rat_vec({0, 0});
  RatVector xz = unlift(lifted, zero);
  for (int j = 0; j < 3; ++j) CHECK(xz[j] == 0);
}

TEST_CASE("lifted_solve on the toy LP") {
  auto res = lifted_solve(toy_lp());
  REQUIRE(res.solution.status == lp::SolveStatus::Optimal);
  CHECK(*res.solution.objective_exact == 1);
  CHECK((*res.solution.x_exact)[2] == 1);
  CHECK(res.report.verified);
  CHECK(res.report.ground.vars == 3);
  CHECK(res.report.lifted.vars == 2);
  CHECK(res.report.lifted.rows == 3);
}

TEST_CASE("lifted_solve on the flow LP matches the plain solve exactly") {
  auto lp = flow_dual();
  auto plain = lp::solve(lp, {});
  auto lifted = lifted_solve(lp);
  REQUIRE(plain.status == lp::SolveStatus::Optimal);
  REQUIRE(lifted.solution.status == lp::SolveStatus::Optimal);
  CHECK(*plain.objective_exact == *lifted.solution.objective_exact);
  // original sense: maximization recovers the max-flow value 5
  CHECK(lp.original_objective(*plain.objective_exact) == 5);
  CHECK(lifted.report.verified);
}

TEST_CASE("frucht LP lifts to one variable") {
  auto res = lifted_solve(frucht_lp());
  REQUIRE(res.solution.status == lp::SolveStatus::Optimal);
  CHECK(res.report.ground.vars == 12);
  CHECK(res.report.lifted.vars == 1);
  CHECK(res.report.lifted.rows == 1);
  // max sum x with x_u + x_v <= 2 on a cubic graph: all ones, objective 12
  CHECK(frucht_lp().original_objective(*res.solution.objective_exact) == 12);
  for (int j = 0; j < 12; ++j) CHECK((*res.solution.x_exact)[j] == 1);
}

TEST_CASE("fully asymmetric LP keeps its size and objective") {
  lp::DualFormLp lp;
  std::vector<Eigen::Triplet<Rational>> trips;
  lp.b.resize(4);
  lp.c.resize(2);
  lp.c[0] = Rational(1);
  lp.c[1] = Rational(2);
  int vals[4][2] = {{1, 2}, {3, -1}, {-1, 0}, {0, -1}};
  int bs[4] = {5, 7, 0, 0};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 2; ++j)
      if (vals[i][j]) trips.emplace_back(i, j, Rational(vals[i][j]));
    lp.b[i] = Rational(bs[i]);
  }
  lp.A.resize(4, 2);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  lp.col_names = {Atom{"a", {}}, Atom{"b", {}}};
  lp.row_provenance = {"r0", "r1", "r2", "r3"};

  auto plain = lp::solve(lp, {});
  auto res = lifted_solve(lp);
  CHECK(res.report.lifted.vars == res.report.ground.vars);
  CHECK(*plain.objective_exact == *res.solution.objective_exact);
}

TEST_CASE("degenerate empty LPs short-circuit") {
  lp::DualFormLp lp;
  lp.A.resize(0, 0);
  lp.b.resize(0);
  lp.c.resize(0);
  auto res = lifted_solve(lp);
  CHECK(res.solution.status == lp::SolveStatus::Optimal);
}

TEST_CASE("planted symmetry suite (exact, desk scale)") {
  std::mt19937 rng(4242);
  for (int t = 0; t < 25; ++t) {
    auto planted = make_planted_lp(rng, 12, 60);
    const auto& lp = planted.lp;

    auto g = build_coefficient_graph(lp);
    auto part = color_passing(g);
    CHECK(verify_equitable(g, part).ok);
    CHECK(part.rounds <= g.vertices());
    // blocks must merge: no more column classes than planted blocks
    CHECK(part.num_col_classes <= planted.blocks);

    auto [xp, xq] = fractional_automorphism(part);
    RatSparse lhs = xq * lp.A;
    RatSparse rhs = lp.A * xp;
    CHECK(RatMatrix(lhs) == RatMatrix(rhs));
    RatVector cX = xp.transpose() * lp.c;
    bool c_ok = true, b_ok = true;
    for (Eigen::Index j = 0; j < lp.cols(); ++j)
      c_ok = c_ok && cX[j] == lp.c[j];
    RatVector qb = xq * lp.b;
    for (Eigen::Index i = 0; i < lp.rows(); ++i) b_ok = b_ok && qb[i] == lp.b[i];
    CHECK(c_ok);
    CHECK(b_ok);

    auto plain = lp::solve(lp, {});
    auto res = lifted_solve(lp);
    REQUIRE(plain.status == lp::SolveStatus::Optimal);
    REQUIRE(res.solution.status == lp::SolveStatus::Optimal);
    CHECK(*plain.objective_exact == *res.solution.objective_exact);
    CHECK(res.report.verified);

    // X_P x stays feasible with the same objective (exact)
    RatVector x = *plain.x_exact;
    RatVector px = xp * x;
    CHECK(lp::check_feasible(lp, px, Rational(0)).ok);
    Rational o1 = 0, o2 = 0;
    for (Eigen::Index j = 0; j < lp.cols(); ++j) {
      o1 += lp.c[j] * x[j];
      o2 += lp.c[j] * px[j];
    }
    CHECK(o1 == o2);
  }
}

TEST_CASE("projected rows within a row class are identical") {
  std::mt19937 rng(777);
  for (int t = 0; t < 10; ++t) {
    auto planted = make_planted_lp(rng, 12, 40);
    auto part = color_passing(build_coefficient_graph(planted.lp));
    LiftOptions keep_all;
    keep_all.row_dedup = false;
    auto lifted = lift(planted.lp, part, keep_all);  // throws on violation
    CHECK(lifted.reduced.rows() == planted.lp.rows());
  }
}

TEST_CASE("color bucketing merges nearby values when asked") {
  lp::DualFormLp lp;
  std::vector<Eigen::Triplet<Rational>> trips;
  lp.b.resize(2);
  lp.c.resize(2);
  // two almost-equal coefficients: exact coloring keeps them apart,
  // 3-decimal bucketing merges them
  trips.emplace_back(0, 0, Rational(1));
  trips.emplace_back(1, 1, Rational(1) + Rational(1, 10000000));
  lp.A.resize(2, 2);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  lp.b[0] = lp.b[1] = Rational(1);
  lp.c[0] = lp.c[1] = Rational(1);
  lp.col_names = {Atom{"a", {}}, Atom{"b", {}}};

  auto exact = build_coefficient_graph(lp);
  CHECK(exact.edge_color_value.size() == 2);
  auto bucketed = build_coefficient_graph(lp, 3);
  CHECK(bucketed.edge_color_value.size() == 1);
}

TEST_CASE("X_P maps feasible fixture points to equally good feasible points") {
  auto lp = flow_dual();
  auto part = color_passing(build_coefficient_graph(lp));
  auto [xp, xq] = fractional_automorphism(part);

  auto opt = lp::solve(lp, {});
  REQUIRE(opt.status == lp::SolveStatus::Optimal);
  RatVector zero = RatVector::Zero(lp.cols());
  // exact rational convex combinations of the zero flow and the optimum
  for (int num = 0; num <= 4; ++num) {
    Rational lam(num, 4);
    RatVector x = zero;
    for (Eigen::Index j = 0; j < lp.cols(); ++j)
      x[j] = lam * (*opt.x_exact)[j];
    REQUIRE(lp::check_feasible(lp, x, Rational(0)).ok);
    RatVector px = xp * x;
    CHECK(lp::check_feasible(lp, px, Rational(0)).ok);
    Rational o1 = 0, o2 = 0;
    for (Eigen::Index j = 0; j < lp.cols(); ++j) {
      o1 += lp.c[j] * x[j];
      o2 += lp.c[j] * px[j];
    }
    CHECK(o1 == o2);
  }
}

TEST_CASE("row dedup off keeps the paper-shaped reduction sound") {
  std::mt19937 rng(31337);
  LiftOptions keep_all;
  keep_all.row_dedup = false;
  for (int t = 0; t < 5; ++t) {
    auto planted = make_planted_lp(rng, 12, 50);
    auto plain = lp::solve(planted.lp, {});
    auto res = lifted_solve(planted.lp, {}, keep_all);
    REQUIRE(plain.status == lp::SolveStatus::Optimal);
    REQUIRE(res.solution.status == lp::SolveStatus::Optimal);
    CHECK(*plain.objective_exact == *res.solution.objective_exact);
    CHECK(res.report.lifted.rows == res.report.ground.rows);
  }
}
