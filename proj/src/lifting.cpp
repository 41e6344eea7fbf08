#include "rlp/lifting.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rlp::lifting {

namespace {

// exact color key; with bucketing the rounded decimal string is the key
std::string color_key(const Rational& v, const std::optional<int>& decimals) {
  if (!decimals) return to_string(v);
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(*decimals);
  os << rlp::to_double(v);
  std::string s = os.str();
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    bool zero = true;
    for (char ch : s)
      if (ch != '-' && ch != '0' && ch != '.') zero = false;
    if (zero) s = s.substr(1);
  }
  return s;
}

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

CoefficientGraph build_coefficient_graph(const lp::DualFormLp& lp,
                                         std::optional<int> eps) {
  CoefficientGraph g;
  g.m = static_cast<int>(lp.rows());
  g.n = static_cast<int>(lp.cols());
  g.adj.resize(static_cast<std::size_t>(g.vertices()));
  g.init_color.resize(static_cast<std::size_t>(g.vertices()));

  std::map<std::string, int> row_colors, col_colors, edge_colors;
  for (int i = 0; i < g.m; ++i) {
    auto key = color_key(lp.b[i], eps);
    auto [it, inserted] = row_colors.emplace(key, static_cast<int>(row_colors.size()));
    if (inserted) g.row_color_value.push_back(lp.b[i]);
    g.init_color[static_cast<std::size_t>(i)] = it->second;
  }
  const int col_base = static_cast<int>(row_colors.size());
  for (int j = 0; j < g.n; ++j) {
    auto key = color_key(lp.c[j], eps);
    auto [it, inserted] = col_colors.emplace(key, static_cast<int>(col_colors.size()));
    if (inserted) g.col_color_value.push_back(lp.c[j]);
    g.init_color[static_cast<std::size_t>(g.m + j)] = col_base + it->second;
  }
  for (int j = 0; j < lp.A.outerSize(); ++j)
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it) {
      auto key = color_key(it.value(), eps);
      auto [cit, inserted] =
          edge_colors.emplace(key, static_cast<int>(edge_colors.size()));
      if (inserted) g.edge_color_value.push_back(it.value());
      int row_v = static_cast<int>(it.row());
      int col_v = g.m + j;
      g.adj[static_cast<std::size_t>(row_v)].emplace_back(col_v, cit->second);
      g.adj[static_cast<std::size_t>(col_v)].emplace_back(row_v, cit->second);
    }
  return g;
}

std::vector<int> Partition::row_class_sizes() const {
  std::vector<int> s(static_cast<std::size_t>(num_row_classes), 0);
  for (int c : row_class) ++s[static_cast<std::size_t>(c)];
  return s;
}

std::vector<int> Partition::col_class_sizes() const {
  std::vector<int> s(static_cast<std::size_t>(num_col_classes), 0);
  for (int c : col_class) ++s[static_cast<std::size_t>(c)];
  return s;
}

Partition color_passing(const CoefficientGraph& g) {
  const int V = g.vertices();
  std::vector<int> color(g.init_color.begin(), g.init_color.end());

  // canonical renumbering of the initial coloring by first occurrence
  auto renumber = [&](std::vector<int>& col) {
    std::map<int, int> remap;
    for (int v = 0; v < V; ++v) {
      auto [it, inserted] = remap.emplace(col[static_cast<std::size_t>(v)],
                                          static_cast<int>(remap.size()));
      col[static_cast<std::size_t>(v)] = it->second;
    }
    return static_cast<int>(remap.size());
  };
  int num_colors = renumber(color);

  int rounds = 0;
  for (int iter = 0; iter < V; ++iter) {
    // signature: own color then the sorted (neighbor, edge) color pairs
    std::map<std::vector<int>, int> table;
    std::vector<int> next(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) {
      std::vector<std::pair<int, int>> nb;
      nb.reserve(g.adj[static_cast<std::size_t>(v)].size());
      for (auto [u, ec] : g.adj[static_cast<std::size_t>(v)])
        nb.emplace_back(color[static_cast<std::size_t>(u)], ec);
      std::sort(nb.begin(), nb.end());
      std::vector<int> sig;
      sig.reserve(1 + 2 * nb.size());
      sig.push_back(color[static_cast<std::size_t>(v)]);
      for (auto [a, b] : nb) {
        sig.push_back(a);
        sig.push_back(b);
      }
      auto [it, inserted] = table.emplace(std::move(sig),
                                          static_cast<int>(table.size()));
      next[static_cast<std::size_t>(v)] = it->second;
    }
    int next_count = static_cast<int>(table.size());
    // first-occurrence renumbering makes ids canonical per round
    renumber(next);
    if (next_count == num_colors) break;  // stable partition
    color = std::move(next);
    num_colors = next_count;
    ++rounds;
  }

  Partition part;
  part.rounds = rounds;
  part.row_class.resize(static_cast<std::size_t>(g.m));
  part.col_class.resize(static_cast<std::size_t>(g.n));
  std::map<int, int> row_ids, col_ids;
  for (int i = 0; i < g.m; ++i) {
    auto [it, ins] = row_ids.emplace(color[static_cast<std::size_t>(i)],
                                     static_cast<int>(row_ids.size()));
    part.row_class[static_cast<std::size_t>(i)] = it->second;
  }
  for (int j = 0; j < g.n; ++j) {
    auto [it, ins] = col_ids.emplace(color[static_cast<std::size_t>(g.m + j)],
                                     static_cast<int>(col_ids.size()));
    part.col_class[static_cast<std::size_t>(j)] = it->second;
  }
  part.num_row_classes = static_cast<int>(row_ids.size());
  part.num_col_classes = static_cast<int>(col_ids.size());
  return part;
}

EquitableCheck verify_equitable(const CoefficientGraph& g, const Partition& p) {
  EquitableCheck res;
  const int V = g.vertices();
  // unified class id per vertex: rows keep theirs, columns are offset
  auto cls = [&](int v) {
    return v < g.m
               ? p.row_class[static_cast<std::size_t>(v)]
               : p.num_row_classes + p.col_class[static_cast<std::size_t>(v - g.m)];
  };

  // per vertex: sorted counts of (target class, edge color)
  std::vector<std::map<std::pair<int, int>, int>> sig(
      static_cast<std::size_t>(V));
  for (int v = 0; v < V; ++v)
    for (auto [u, ec] : g.adj[static_cast<std::size_t>(v)])
      ++sig[static_cast<std::size_t>(v)][{cls(u), ec}];

  std::map<int, int> representative;
  for (int v = 0; v < V; ++v) {
    int c = cls(v);
    auto [it, inserted] = representative.emplace(c, v);
    if (inserted) continue;
    int r = it->second;
    if (sig[static_cast<std::size_t>(v)] != sig[static_cast<std::size_t>(r)]) {
      res.ok = false;
      std::ostringstream os;
      os << "vertices " << r << " and " << v << " share class " << c
         << " but differ in colored degree";
      // locate one differing (class, color) pair for the witness
      for (const auto& [key, cnt] : sig[static_cast<std::size_t>(r)]) {
        auto jt = sig[static_cast<std::size_t>(v)].find(key);
        int other = jt == sig[static_cast<std::size_t>(v)].end() ? 0 : jt->second;
        if (other != cnt) {
          os << " (into class " << key.first << " with edge color "
             << key.second << ": " << cnt << " vs " << other << ")";
          break;
        }
      }
      res.witness = os.str();
      return res;
    }
  }
  return res;
}

std::pair<RatSparse, RatSparse> fractional_automorphism(const Partition& p) {
  auto build = [](const std::vector<int>& cls, int k) {
    const auto n = static_cast<Eigen::Index>(cls.size());
    std::vector<int> size(static_cast<std::size_t>(k), 0);
    for (int c : cls) ++size[static_cast<std::size_t>(c)];
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < cls.size(); ++i)
      members[static_cast<std::size_t>(cls[i])].push_back(static_cast<int>(i));
    std::vector<Eigen::Triplet<Rational>> trips;
    for (int c = 0; c < k; ++c) {
      Rational w(1, size[static_cast<std::size_t>(c)]);
      for (int i : members[static_cast<std::size_t>(c)])
        for (int j : members[static_cast<std::size_t>(c)])
          trips.emplace_back(i, j, w);
    }
    RatSparse X(n, n);
    X.setFromTriplets(trips.begin(), trips.end());
    return X;
  };
  return {build(p.col_class, p.num_col_classes),
          build(p.row_class, p.num_row_classes)};
}

CharMatrix char_matrix(const Partition& p) {
  CharMatrix cm;
  cm.col_class = p.col_class;
  cm.class_size.assign(static_cast<std::size_t>(p.num_col_classes), 0);
  for (int c : p.col_class) ++cm.class_size[static_cast<std::size_t>(c)];
  return cm;
}

RatSparse CharMatrix::unnormalized() const {
  std::vector<Eigen::Triplet<Rational>> trips;
  for (int i = 0; i < n(); ++i)
    trips.emplace_back(i, col_class[static_cast<std::size_t>(i)], Rational(1));
  RatSparse B(n(), p());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

Eigen::SparseMatrix<double> CharMatrix::normalized() const {
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n(); ++i) {
    int c = col_class[static_cast<std::size_t>(i)];
    trips.emplace_back(i, c,
                       1.0 / std::sqrt(static_cast<double>(
                                 class_size[static_cast<std::size_t>(c)])));
  }
  Eigen::SparseMatrix<double> B(n(), p());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

RatSparse CharMatrix::flat() const {
  std::vector<std::vector<int>> members(static_cast<std::size_t>(p()));
  for (int i = 0; i < n(); ++i)
    members[static_cast<std::size_t>(col_class[static_cast<std::size_t>(i)])]
        .push_back(i);
  std::vector<Eigen::Triplet<Rational>> trips;
  for (int c = 0; c < p(); ++c) {
    Rational w(1, class_size[static_cast<std::size_t>(c)]);
    for (int i : members[static_cast<std::size_t>(c)])
      for (int j : members[static_cast<std::size_t>(c)])
        trips.emplace_back(i, j, w);
  }
  RatSparse X(n(), n());
  X.setFromTriplets(trips.begin(), trips.end());
  return X;
}

LiftedLp lift(const lp::DualFormLp& lp, const Partition& p,
              const LiftOptions& opts) {
  LiftedLp out;
  out.cm = char_matrix(p);
  out.row_class_of = p.row_class;
  const int m = static_cast<int>(lp.rows());
  const int pcols = out.cm.p();

  // A * B exactly: sum the ground columns of each class
  std::vector<std::map<int, Rational>> rows(static_cast<std::size_t>(m));
  for (int j = 0; j < lp.A.outerSize(); ++j) {
    int cj = p.col_class[static_cast<std::size_t>(j)];
    for (RatSparse::InnerIterator it(lp.A, j); it; ++it) {
      auto& cell = rows[static_cast<std::size_t>(it.row())][cj];
      cell += it.value();
    }
  }
  for (auto& r : rows)
    for (auto it = r.begin(); it != r.end();)
      it = it->second == 0 ? r.erase(it) : std::next(it);

  // within one row class the projected rows and b entries must coincide;
  // this is exactly the equitability consequence the dedup rests on
  std::vector<int> rep(static_cast<std::size_t>(p.num_row_classes), -1);
  for (int i = 0; i < m; ++i) {
    int c = p.row_class[static_cast<std::size_t>(i)];
    int& r = rep[static_cast<std::size_t>(c)];
    if (r < 0) {
      r = i;
      continue;
    }
    if (rows[static_cast<std::size_t>(i)] != rows[static_cast<std::size_t>(r)] ||
        lp.b[i] != lp.b[r])
      throw std::runtime_error(
          "lift soundness violation: projected rows differ inside row class " +
          std::to_string(c) + " (rows " + std::to_string(r) + ", " +
          std::to_string(i) + ")");
  }

  std::vector<int> keep;
  if (opts.row_dedup) {
    out.deduped = true;
    keep.assign(rep.begin(), rep.end());
    std::sort(keep.begin(), keep.end());
  } else {
    keep.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) keep[static_cast<std::size_t>(i)] = i;
  }
  out.kept_row = keep;

  lp::DualFormLp& red = out.reduced;
  red.A.resize(static_cast<Eigen::Index>(keep.size()), pcols);
  std::vector<Eigen::Triplet<Rational>> trips;
  red.b.resize(static_cast<Eigen::Index>(keep.size()));
  red.row_provenance.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    int i = keep[k];
    for (const auto& [cj, v] : rows[static_cast<std::size_t>(i)])
      trips.emplace_back(static_cast<Eigen::Index>(k), cj, v);
    red.b[static_cast<Eigen::Index>(k)] = lp.b[i];
    red.row_provenance.push_back(lp.row_provenance.empty()
                                     ? "row " + std::to_string(i)
                                     : lp.row_provenance[static_cast<std::size_t>(i)]);
  }
  red.A.setFromTriplets(trips.begin(), trips.end());

  red.c.resize(pcols);
  for (int c = 0; c < pcols; ++c) red.c[c] = 0;
  for (int j = 0; j < static_cast<int>(lp.cols()); ++j)
    red.c[p.col_class[static_cast<std::size_t>(j)]] += lp.c[j];

  // name each class after its first member column
  std::vector<int> first(static_cast<std::size_t>(pcols), -1);
  for (int j = 0; j < static_cast<int>(lp.cols()); ++j) {
    int c = p.col_class[static_cast<std::size_t>(j)];
    if (first[static_cast<std::size_t>(c)] < 0)
      first[static_cast<std::size_t>(c)] = j;
  }
  for (int c = 0; c < pcols; ++c)
    red.col_names.push_back(
        lp.col_names.empty()
            ? Atom{"class" + std::to_string(c), {}}
            : lp.col_names[static_cast<std::size_t>(
                  first[static_cast<std::size_t>(c)])]);

  red.objective_offset = lp.objective_offset;
  red.negated_objective = lp.negated_objective;
  return out;
}

Eigen::SparseMatrix<double> LiftedLp::normalized_A() const {
  Eigen::SparseMatrix<double> A = lp::to_double(reduced.A);
  for (int c = 0; c < cm.p(); ++c) {
    double s = std::sqrt(static_cast<double>(
        cm.class_size[static_cast<std::size_t>(c)]));
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
      it.valueRef() /= s;
  }
  return A;
}

Eigen::VectorXd LiftedLp::normalized_c() const {
  Eigen::VectorXd c = lp::to_double(reduced.c);
  for (int k = 0; k < cm.p(); ++k)
    c[k] /= std::sqrt(
        static_cast<double>(cm.class_size[static_cast<std::size_t>(k)]));
  return c;
}

RatVector unlift(const LiftedLp& lifted, const RatVector& y) {
  RatVector x(lifted.cm.n());
  for (int j = 0; j < lifted.cm.n(); ++j)
    x[j] = y[lifted.cm.col_class[static_cast<std::size_t>(j)]];
  return x;
}

Eigen::VectorXd unlift(const LiftedLp& lifted, const Eigen::VectorXd& y) {
  Eigen::VectorXd x(lifted.cm.n());
  for (int j = 0; j < lifted.cm.n(); ++j)
    x[j] = y[lifted.cm.col_class[static_cast<std::size_t>(j)]];
  return x;
}

std::string LiftReport::to_json(bool with_times) const {
  nlohmann::ordered_json j;
  j["ground"] = {{"vars", ground.vars}, {"rows", ground.rows}, {"nnz", ground.nnz}};
  j["lifted"] = {{"vars", lifted.vars}, {"rows", lifted.rows}, {"nnz", lifted.nnz}};
  j["rounds"] = rounds;
  if (with_times) {
    nlohmann::ordered_json t;
    for (const auto& [k, v] : times_ms) t[k] = v;
    j["times_ms"] = std::move(t);
  }
  j["verified"] = verified;
  return j.dump(2);
}

LiftedSolveResult lifted_solve(const lp::DualFormLp& lp,
                               const lp::SolverOptions& solver_opts,
                               const LiftOptions& lift_opts) {
  LiftedSolveResult res;
  res.report.ground = {static_cast<std::size_t>(lp.cols()),
                       static_cast<std::size_t>(lp.rows()), lp.nonzeros()};

  if (lp.rows() == 0 || lp.cols() == 0) {
    res.solution = lp::solve(lp, solver_opts);
    res.report.lifted = res.report.ground;
    res.report.verified = res.solution.status == lp::SolveStatus::Optimal;
    return res;
  }

  double t0 = now_ms();
  CoefficientGraph g = build_coefficient_graph(lp, lift_opts.color_eps_decimals);
  double t1 = now_ms();
  Partition part = color_passing(g);
  double t2 = now_ms();
  LiftedLp lifted = lift(lp, part, lift_opts);
  double t3 = now_ms();
  lp::Solution reduced_sol = lp::solve(lifted.reduced, solver_opts);
  double t4 = now_ms();

  res.report.rounds = part.rounds;
  res.report.lifted = {static_cast<std::size_t>(lifted.reduced.cols()),
                       static_cast<std::size_t>(lifted.reduced.rows()),
                       lifted.reduced.nonzeros()};
  res.report.times_ms["graph"] = t1 - t0;
  res.report.times_ms["colorpass"] = t2 - t1;
  res.report.times_ms["lift"] = t3 - t2;
  res.report.times_ms["solve"] = t4 - t3;

  res.solution.status = reduced_sol.status;
  res.solution.pivots = reduced_sol.pivots;
  if (reduced_sol.status != lp::SolveStatus::Optimal) {
    res.report.times_ms["unlift"] = 0.0;
    return res;
  }

  double t5;
  if (reduced_sol.x_exact) {
    RatVector x = unlift(lifted, *reduced_sol.x_exact);
    t5 = now_ms();
    res.solution.x_exact = x;
    res.solution.x = lp::to_double(x);
    Rational obj = 0;
    for (Eigen::Index j = 0; j < lp.cols(); ++j) obj += lp.c[j] * x[j];
    res.solution.objective_exact = obj;
    res.solution.objective = rlp::to_double(obj);

    if (obj != *reduced_sol.objective_exact)
      throw std::runtime_error(
          "lifted objective does not match the unlifted point exactly");
    auto feas = lp::check_feasible(lp, x, Rational(0));
    if (!feas.ok)
      throw std::runtime_error(
          "unlifted point is infeasible in the ground LP: worst row " +
          feas.provenance);
  } else {
    Eigen::VectorXd x = unlift(lifted, reduced_sol.x);
    t5 = now_ms();
    res.solution.x = x;
    double obj = 0;
    for (Eigen::Index j = 0; j < lp.cols(); ++j)
      obj += rlp::to_double(lp.c[j]) * x[j];
    res.solution.objective = obj;

    double scale = 1.0 + std::abs(reduced_sol.objective);
    if (std::abs(obj - reduced_sol.objective) > 1e-6 * scale)
      throw std::runtime_error(
          "lifted objective deviates from the unlifted point");
    auto feas = lp::check_feasible(lp, x, 1e-9);
    if (!feas.ok)
      throw std::runtime_error(
          "unlifted point is infeasible in the ground LP: worst row " +
          feas.provenance + " by " + std::to_string(feas.worst_violation));
  }
  res.report.times_ms["unlift"] = t5 - t4;
  res.report.verified = true;
  return res;
}

}  // namespace rlp::lifting
