#include "rlp/pipeline.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace rlp::pipeline {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PipelineError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

lp::SolverOptions solver_options(const RunConfig& c) {
  lp::SolverOptions opts;
  opts.mode = c.solver == RunConfig::Solver::InternalFloat
                  ? lp::SolverOptions::Mode::Float
                  : lp::SolverOptions::Mode::RationalExact;
  opts.dantzig = c.dantzig;
  opts.max_pivots = c.max_pivots;
  return opts;
}

lifting::LiftOptions lift_options(const RunConfig& c) {
  lifting::LiftOptions opts;
  opts.row_dedup = c.row_dedup;
  opts.color_eps_decimals = c.color_eps_decimals;
  return opts;
}

std::string value_string(const Eigen::VectorXd& x,
                         const std::optional<RatVector>& exact,
                         Eigen::Index j) {
  if (exact) return to_string((*exact)[j]);
  return format_double(x[j]);
}

}  // namespace

Compiled compile(const RunConfig& config) {
  Compiled out;
  std::string lkb =
      config.lkb_text ? *config.lkb_text : slurp(config.lkb_path);
  std::string rlp =
      config.rlp_text ? *config.rlp_text : slurp(config.rlp_path);

  try {
    out.program = logkb::parse_logkb(lkb);
  } catch (const logkb::KbError& e) {
    throw PipelineError(config.lkb_path + ": " + e.what());
  }
  try {
    out.model = lang::parse_rlp(rlp);
  } catch (const lang::RlpError& e) {
    throw PipelineError(config.rlp_path + ": " + e.what());
  }

  auto report = lang::validate(out.model, out.program);
  if (!report.ok())
    throw PipelineError("validation failed:\n" + report.str());

  logkb::EvalOptions eopts;
  eopts.max_atoms = config.max_atoms;
  try {
    out.kb = logkb::evaluate(out.program, eopts);
    out.flat = lang::to_prenex(out.model);
    out.ground = grounder::ground(out.flat, out.kb);
  } catch (const logkb::KbError& e) {
    throw PipelineError(config.lkb_path + ": " + e.what());
  } catch (const grounder::GroundError& e) {
    throw PipelineError(std::string("grounding failed: ") + e.what());
  }
  out.dual = lp::to_dual_form(out.ground);
  return out;
}

RunResult run(const RunConfig& config) {
  Compiled c = compile(config);
  RunResult res;
  res.warnings = c.ground.warnings;
  res.ground_size = {static_cast<std::size_t>(c.dual.cols()),
                     static_cast<std::size_t>(c.dual.rows()),
                     c.dual.nonzeros()};

  lp::Solution sol;
  if (config.solver == RunConfig::Solver::External) {
    const lp::DualFormLp* target = &c.dual;
    std::optional<lifting::LiftedLp> lifted;
    if (config.lift) {
      auto g = lifting::build_coefficient_graph(c.dual,
                                                config.color_eps_decimals);
      auto part = lifting::color_passing(g);
      lifted = lifting::lift(c.dual, part, lift_options(config));
      target = &lifted->reduced;
      res.lifted = true;
      res.lift_report.rounds = part.rounds;
      res.lift_report.ground = res.ground_size;
      res.lift_report.lifted = {static_cast<std::size_t>(target->cols()),
                                static_cast<std::size_t>(target->rows()),
                                target->nonzeros()};
    }
    auto ext = lp::solve_external(config.external_cmd, *target);
    if (!ext.ok) throw PipelineError("external solver failed: " + ext.error);
    sol.status = lp::SolveStatus::Optimal;
    sol.x = config.lift ? lifting::unlift(*lifted, ext.x) : ext.x;
    double obj = 0;
    for (Eigen::Index j = 0; j < c.dual.cols(); ++j)
      obj += to_double(c.dual.c[j]) * sol.x[j];
    sol.objective = obj;
    auto feas = lp::check_feasible(c.dual, sol.x, 1e-6);
    if (!feas.ok)
      throw PipelineError("external solution infeasible at " +
                          feas.provenance);
    if (config.lift) res.lift_report.verified = true;
  } else if (config.lift) {
    auto lifted =
        lifting::lifted_solve(c.dual, solver_options(config), lift_options(config));
    sol = lifted.solution;
    res.lifted = true;
    res.lift_report = lifted.report;
  } else {
    sol = lp::solve(c.dual, solver_options(config));
  }

  res.status = sol.status;
  if (sol.status == lp::SolveStatus::Optimal) {
    if (sol.objective_exact) {
      res.objective_exact = c.dual.original_objective(*sol.objective_exact);
      res.objective = to_double(*res.objective_exact);
    } else {
      res.objective = c.dual.original_objective(sol.objective);
    }
    for (Eigen::Index j = 0; j < c.dual.cols(); ++j)
      res.solution.emplace_back(
          to_string(c.dual.col_names[static_cast<std::size_t>(j)]),
          value_string(sol.x, sol.x_exact, j));
  }
  return res;
}

StatsResult stats(const RunConfig& config) {
  Compiled c = compile(config);
  StatsResult out;
  out.ground = {static_cast<std::size_t>(c.dual.cols()),
                static_cast<std::size_t>(c.dual.rows()), c.dual.nonzeros()};
  if (c.dual.rows() == 0 || c.dual.cols() == 0) {
    out.lifted = out.ground;
    return out;
  }
  auto g = lifting::build_coefficient_graph(c.dual, config.color_eps_decimals);
  auto part = lifting::color_passing(g);
  auto lifted = lifting::lift(c.dual, part, lift_options(config));
  out.lifted = {static_cast<std::size_t>(lifted.reduced.cols()),
                static_cast<std::size_t>(lifted.reduced.rows()),
                lifted.reduced.nonzeros()};
  out.rounds = part.rounds;
  out.var_ratio = out.ground.vars == 0
                      ? 1.0
                      : static_cast<double>(out.lifted.vars) /
                            static_cast<double>(out.ground.vars);
  return out;
}

std::string export_model(const ExportConfig& config,
                         std::string* name_map_json) {
  Compiled c = compile(config.base);
  lp::ExportResult exp;
  if (config.lifted) {
    auto g = lifting::build_coefficient_graph(c.dual,
                                              config.base.color_eps_decimals);
    auto part = lifting::color_passing(g);
    auto lifted = lifting::lift(c.dual, part, lift_options(config.base));
    exp = lp::export_lp(lifted.reduced, config.format);
  } else {
    exp = lp::export_lp(c.ground, config.format);
  }
  if (name_map_json) *name_map_json = exp.name_map_json();
  return exp.text;
}

std::string RunResult::to_json(bool with_times) const {
  nlohmann::ordered_json j;
  j["status"] = lp::to_string(status);
  if (status == lp::SolveStatus::Optimal) {
    j["objective"] = format_double(objective);
    if (objective_exact) j["objective_exact"] = to_string(*objective_exact);
    nlohmann::ordered_json sol = nlohmann::ordered_json::object();
    for (const auto& [name, value] : solution) sol[name] = value;
    j["solution"] = std::move(sol);
  }
  j["ground"] = {{"vars", ground_size.vars},
                 {"rows", ground_size.rows},
                 {"nnz", ground_size.nnz}};
  if (lifted)
    j["lift"] = nlohmann::ordered_json::parse(lift_report.to_json(with_times));
  if (!warnings.empty()) j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

int RunResult::exit_code() const {
  switch (status) {
    case lp::SolveStatus::Optimal: return 0;
    case lp::SolveStatus::Infeasible: return 2;
    case lp::SolveStatus::Unbounded: return 3;
    case lp::SolveStatus::IterLimit: return 4;
  }
  return 1;
}

std::string StatsResult::to_csv(const std::string& rlp,
                                const std::string& lkb, bool header) const {
  std::ostringstream os;
  if (header)
    os << "rlp,lkb,ground_vars,ground_rows,ground_nnz,"
          "lifted_vars,lifted_rows,lifted_nnz,rounds,var_ratio\n";
  os << rlp << "," << lkb << "," << ground.vars << "," << ground.rows << ","
     << ground.nnz << "," << lifted.vars << "," << lifted.rows << ","
     << lifted.nnz << "," << rounds << "," << format_double(var_ratio)
     << "\n";
  return os.str();
}

std::string StatsResult::to_json() const {
  nlohmann::ordered_json j;
  j["ground"] = {{"vars", ground.vars}, {"rows", ground.rows}, {"nnz", ground.nnz}};
  j["lifted"] = {{"vars", lifted.vars}, {"rows", lifted.rows}, {"nnz", lifted.nnz}};
  j["rounds"] = rounds;
  j["var_ratio"] = var_ratio;
  return j.dump(2) + "\n";
}

}  // namespace rlp::pipeline
