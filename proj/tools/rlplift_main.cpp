#include "rlp/pipeline.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using rlp::pipeline::ExportConfig;
using rlp::pipeline::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& solver) {
  cmd->add_option("--rlp", cfg.rlp_path, "model template file")->required();
  cmd->add_option("--lkb", cfg.lkb_path, "logical knowledge base file")
      ->required();
  cmd->add_flag("--lift,!--no-lift", cfg.lift,
                "reduce the LP via its equitable partition (default on)");
  cmd->add_option("--solver", solver,
                  "internal-rational | internal-float | external:<cmd> "
                  "(default internal-rational)");
  cmd->add_flag("!--no-row-dedup", cfg.row_dedup,
                "keep duplicate constraint rows of a lifted row class");
  cmd->add_option("--color-eps", cfg.color_eps_decimals,
                  "bucket coefficient colors to this many decimals "
                  "(default: exact value equality)");
  cmd->add_flag("--dantzig", cfg.dantzig, "Dantzig pricing instead of Bland");
  cmd->add_option("--max-pivots", cfg.max_pivots, "simplex pivot cap");
  cmd->add_option("--max-atoms", cfg.max_atoms,
                  "knowledge-base materialization cap");
  cmd->add_flag("--timings", cfg.with_times, "include stage times in JSON");
}

bool apply_solver(RunConfig& cfg, const std::string& solver, std::string& err) {
  if (solver.empty() || solver == "internal-rational") {
    cfg.solver = RunConfig::Solver::InternalRational;
  } else if (solver == "internal-float") {
    cfg.solver = RunConfig::Solver::InternalFloat;
  } else if (solver.rfind("external:", 0) == 0) {
    cfg.solver = RunConfig::Solver::External;
    cfg.external_cmd = solver.substr(9);
  } else if (solver == "external") {
    cfg.solver = RunConfig::Solver::External;
    const char* env = std::getenv("RLPLIFT_EXTERNAL_SOLVER");
    if (!env) {
      err = "external solver requested but RLPLIFT_EXTERNAL_SOLVER is unset";
      return false;
    }
    cfg.external_cmd = env;
  } else {
    err = "unknown solver '" + solver + "'";
    return false;
  }
  return true;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relational linear programs: ground, lift, solve"};
  app.require_subcommand(1);

  RunConfig run_cfg, stats_cfg, export_cfg_base;
  std::string run_solver, stats_solver, export_solver;
  std::string run_json, stats_json;
  std::string export_format = "mps", export_out, export_map_out;
  bool export_lifted = false;

  CLI::App* run_cmd =
      app.add_subcommand("run", "ground, optionally lift, solve and report");
  add_common(run_cmd, run_cfg, run_solver);
  run_cmd->add_option("--json", run_json, "write the result JSON here");

  CLI::App* stats_cmd =
      app.add_subcommand("stats", "report ground and lifted sizes");
  add_common(stats_cmd, stats_cfg, stats_solver);
  stats_cmd->add_option("--json", stats_json, "write the stats JSON here");
  std::string stats_csv;
  bool csv_header = false;
  stats_cmd->add_option("--csv", stats_csv,
                        "append one CSV size row to this file");
  stats_cmd->add_flag("--csv-header", csv_header,
                      "start the CSV with a header row");

  CLI::App* export_cmd =
      app.add_subcommand("export", "write the LP in a solver format");
  add_common(export_cmd, export_cfg_base, export_solver);
  export_cmd->add_option("--format", export_format, "lp | mps (default mps)");
  export_cmd->add_option("--out", export_out, "output file (default stdout)");
  export_cmd->add_option("--name-map", export_map_out,
                         "write the column mangling map JSON here");
  export_cmd->add_flag("--lifted", export_lifted,
                       "export the reduced LP instead of the ground one");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      std::string err;
      if (!apply_solver(run_cfg, run_solver, err)) {
        std::cerr << "error: " << err << "\n";
        return 1;
      }
      auto res = rlp::pipeline::run(run_cfg);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      write_or_print(run_json, res.to_json(run_cfg.with_times));
      if (res.status != rlp::lp::SolveStatus::Optimal)
        std::cerr << "status: " << rlp::lp::to_string(res.status) << "\n";
      return res.exit_code();
    }
    if (stats_cmd->parsed()) {
      auto res = rlp::pipeline::stats(stats_cfg);
      write_or_print(stats_json, res.to_json());
      if (!stats_csv.empty()) {
        std::ofstream csv(stats_csv, std::ios::app);
        csv << res.to_csv(stats_cfg.rlp_path, stats_cfg.lkb_path, csv_header);
      }
      return 0;
    }
    // export
    ExportConfig ecfg;
    ecfg.base = export_cfg_base;
    ecfg.lifted = export_lifted;
    if (export_format == "lp") {
      ecfg.format = rlp::lp::ExportFormat::LpFile;
    } else if (export_format == "mps") {
      ecfg.format = rlp::lp::ExportFormat::Mps;
    } else {
      std::cerr << "error: unknown format '" << export_format << "'\n";
      return 1;
    }
    std::string map_json;
    std::string text = rlp::pipeline::export_model(ecfg, &map_json);
    write_or_print(export_out, text);
    if (!export_map_out.empty()) write_or_print(export_map_out, map_json);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
