#pragma once

#include "rlp/ground_lp.hpp"
#include "rlp/lifting.hpp"
#include "rlp/lp_export.hpp"
#include "rlp/simplex.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rlp::pipeline {

struct PipelineError : std::runtime_error {
  explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunConfig {
  std::string rlp_path;
  std::string lkb_path;
  // inline sources take precedence over paths when set (mostly for tests)
  std::optional<std::string> rlp_text;
  std::optional<std::string> lkb_text;

  bool lift = true;

  enum class Solver { InternalRational, InternalFloat, External } solver =
      Solver::InternalRational;
  std::string external_cmd;  // Solver::External

  bool row_dedup = true;
  std::optional<int> color_eps_decimals;
  bool dantzig = false;
  long max_pivots = 1'000'000;
  long max_atoms = 10'000'000;
  bool with_times = false;  // include stage timings in the JSON
};

struct RunResult {
  lp::SolveStatus status = lp::SolveStatus::Optimal;
  // objective in the model's original sense
  double objective = 0.0;
  std::optional<Rational> objective_exact;
  // one entry per declared-variable ground atom, column order
  std::vector<std::pair<std::string, std::string>> solution;
  bool lifted = false;
  lifting::LiftReport lift_report;
  lifting::LpSize ground_size;  // of the dual-form LP that was (or would be) solved
  std::vector<std::string> warnings;

  std::string to_json(bool with_times = false) const;
  // 0 optimal, 2 infeasible, 3 unbounded, 4 iteration limit
  int exit_code() const;
};

// parse -> validate -> prenex -> ground -> dual form -> (lift) -> solve ->
// unlift -> verify. Throws PipelineError (with file/line context from the
// underlying stage) on any model, KB or validation problem.
RunResult run(const RunConfig& config);

struct StatsResult {
  lifting::LpSize ground, lifted;
  int rounds = 0;
  double var_ratio = 1.0;  // lifted vars / ground vars
  std::string to_json() const;
  // one data row keyed by the input files, suitable for table building
  std::string to_csv(const std::string& rlp, const std::string& lkb,
                     bool header) const;
};

// grounds and lifts without solving
StatsResult stats(const RunConfig& config);

struct ExportConfig {
  RunConfig base;
  lp::ExportFormat format = lp::ExportFormat::Mps;
  bool lifted = false;  // export the reduced LP instead of the ground one
};

// returns the problem text; `name_map_json` receives the mangling map
std::string export_model(const ExportConfig& config, std::string* name_map_json);

// intermediate products for tests and tools
struct Compiled {
  logkb::LogicProgram program;
  logkb::MaterializedKb kb;
  lang::RlpModel model;       // as parsed
  lang::RlpModel flat;        // prenex, definitions expanded
  grounder::GroundLp ground;
  lp::DualFormLp dual;
};
Compiled compile(const RunConfig& config);

}  // namespace rlp::pipeline
