#pragma once

#include <cstddef>
#include <span>

#include "tnqudo/problem.hpp"
#include "tnqudo/tn_core.hpp"

namespace tnqudo {

struct OracleResult {
  Assignment best;
  double best_cost = 0.0;
  std::size_t optima_count = 0;
};

/// Maximum number of enumerated states, 2e6 by default. TNQUDO_BRUTE_CAP
/// overrides it.
struct OracleCaps {
  std::size_t max_states = 2'000'000;
  static OracleCaps from_env();
};

/// Exhaustive search in lexicographic order (x_0 most significant). Costs
/// within 1e-9 * max(1, |best|) of each other count as tied; ties keep the
/// lexicographically smallest assignment. Throws CapacityError above the cap.
OracleResult brute_force(const Problem& p, const OracleCaps& caps = OracleCaps::from_env());

/// Entry j = sum over completions with x_0..x_{i-1} = fixed and x_i = j of
/// exp(-tau (C(x) - offset)), by enumeration with compensated summation. Not
/// normalized.
MarginalVector direct_marginal(const Problem& p, int i, std::span<const int> fixed, double tau,
                               double offset = 0.0,
                               const OracleCaps& caps = OracleCaps::from_env());

}  // namespace tnqudo
