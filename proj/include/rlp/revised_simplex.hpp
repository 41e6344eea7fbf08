#pragma once

#include "rlp/simplex.hpp"

namespace rlp::lp {

// Float-mode solver: revised primal simplex with variable bounds.
// Preprocessing recovers structure that the inequality-only dual form
// flattened away, without changing the feasible set:
//   - tagged row pairs from '=' constraints become equality rows
//     (slack fixed at zero),
//   - singleton rows become variable bounds.
// The basis is held as a sparse LU factorization with product-form eta
// updates and periodic refactorization. Bland's rule by default; Dantzig
// pricing (with a stall fallback to Bland) behind the flag.
Solution revised_simplex_solve(const DualFormLp& lp, const SolverOptions& opts);

}  // namespace rlp::lp
