#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tnqudo/chain_solver.hpp"

namespace tnqudo {

/// Y_m: best value of x_m for every predecessor combination t = sum_j d^j a_j
/// with a_j = x_{m-1-j}, j < min(k, m).
struct WaterfallTable {
  int row = 0;
  int preds = 0;
  std::vector<int> best;

  bool uniform() const;
};

struct WaterfallStats {
  int uniform_events = 0;
  double w_prob = 0.0;  // uniform_events / n
  int peak_tables_held = 0;
  int restarts = 0;
};

struct WaterfallOptions {
  /// tau multiplier for the prefix left after a cascade; 1 disables restarts.
  double restart_factor = 1.0;
  ChainCaps caps = ChainCaps::from_env();
};

struct WaterfallResult {
  Assignment assignment;
  double cost = 0.0;
  double tau = 0.0;
  WaterfallStats stats;
};

/// Restarted tau never exceeds this value.
inline constexpr double kMaxRestartTau = 1e9;

/// Y_m from B_m: for each predecessor combination, the argmax of the
/// conditional marginal shared with the matrix method.
WaterfallTable candidate_table(const MessageState& b_m, const ChainProblem& c, int m, double tau);

/// Cascade test over rows m, m+1, ..., m+k'-1 (tables[i] is Y_{m+i}). Y_m must
/// be constant; each later Y_{m+i} must be constant over the entries whose
/// first i predecessors equal the values already found. Returns those values
/// on a cascade. A null entry is a row resolved earlier and counts as
/// constant at known[i].
std::optional<std::vector<int>> check_cascade(std::span<const WaterfallTable* const> tables,
                                              std::span<const int> known, int d);
std::optional<std::vector<int>> check_cascade(std::span<const WaterfallTable> tables, int d);

/// Backward pass keeping only the Y tables; each cascade resolves every
/// pending row from m down the chain by lookup and frees those tables.
WaterfallResult solve_waterfall(const ChainProblem& c, const SolverConfig& cfg,
                                const WaterfallOptions& opt = {});

}  // namespace tnqudo
