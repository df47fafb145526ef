#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tnqudo/problem.hpp"
#include "tnqudo/stair.hpp"
#include "tnqudo/tn_core.hpp"

namespace tnqudo {

/// Limit on the largest row tensor, d^(n-1) entries. The default admits
/// n <= 16 for d = 2 and n <= 10 for d = 3. TNQUDO_DENSE_CAP overrides it.
struct DenseCaps {
  std::size_t max_row_states = 32768;
  static DenseCaps from_env();
};

enum class ContractionPath {
  sparse,  // index-selection loops over the mu = i, nu = j patterns
  dense,   // every node materialized and contracted as a full array
};

struct DenseOptions {
  ContractionPath path = ContractionPath::sparse;
  bool reuse = true;
  DenseCaps caps = DenseCaps::from_env();
};

/// Full stair network for a general (dense-coupling) problem. Throws
/// CapacityError when d^(n-1) exceeds the cap.
StairNetwork build_stair(const Problem& p, const SolverConfig& cfg,
                         const DenseCaps& caps = DenseCaps::from_env());

/// Marginal of variable i with x_0..x_{i-1} fixed to `fixed`: rows below i are
/// absorbed bottom to top, each right to left, with fixed wires sliced out.
MarginalVector contract_marginal(const StairNetwork& net, int i, std::span<const int> fixed,
                                 ContractionPath path = ContractionPath::sparse,
                                 bool normalize = true);

/// Determines x_0, x_1, ... in order by argmax of each marginal. With reuse,
/// the row tensors from the first contraction are kept and sliced for every
/// later variable.
SolveResult solve_dense(const Problem& p, const SolverConfig& cfg, const DenseOptions& opt = {});

}  // namespace tnqudo
