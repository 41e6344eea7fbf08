#pragma once

#include "rlp/dual_form.hpp"
#include "rlp/ground_lp.hpp"

#include <map>
#include <string>

namespace rlp::lp {

enum class ExportFormat { LpFile, Mps };

// Ground atom names carry parentheses and commas, which no solver format
// accepts; columns become X<index>, rows C<index> (8 characters, fixed-MPS
// safe) and the mangling map travels alongside.
struct ExportResult {
  std::string text;
  std::map<std::string, std::string> name_map;  // mangled -> original

  std::string name_map_json() const;
};

// min <c,x> s.t. Ax <= b with free variables; deterministic output,
// shortest round-trip decimals
ExportResult export_lp(const DualFormLp& lp, ExportFormat fmt);

// original senses and relations; a maximizing objective is flagged with an
// OBJSENSE section in MPS and "Maximize" in LP format
ExportResult export_lp(const grounder::GroundLp& lp, ExportFormat fmt);

// Spawns `cmd <problem.mps> <solution.txt>` in a scratch directory and
// reads back one "<name> <value>" pair per line (missing columns default
// to zero). Returns the point in the LP's column order.
struct ExternalSolve {
  bool ok = false;
  std::string error;
  Eigen::VectorXd x;
};

ExternalSolve solve_external(const std::string& cmd, const DualFormLp& lp);

}  // namespace rlp::lp
