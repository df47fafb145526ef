#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tnqudo/problem.hpp"
#include "tnqudo/stair.hpp"
#include "tnqudo/tn_core.hpp"

namespace tnqudo {

/// Bound on d^k, the state count of a message or boundary tensor. 2^20 by
/// default; TNQUDO_CHAIN_CAP overrides it.
struct ChainCaps {
  std::size_t max_states = std::size_t{1} << 20;
  static ChainCaps from_env();
  /// Throws CapacityError when d^min(k, n) exceeds the bound.
  void check(const ChainProblem& c) const;
};

/// Backward message B_m over the window x_m .. x_{m+width-1}, width =
/// min(k, n - m), state t = sum_j d^j x_{m+j}. Held as log-weights with the
/// maximum shifted to 0.
struct MessageState {
  int origin = 0;
  int width = 0;
  int d = 2;
  std::vector<double> log_weights;

  std::size_t size() const noexcept { return log_weights.size(); }
  /// Linear view, maximum entry 1.
  std::vector<double> entries() const;
};

/// Operator of row m: maps B_{m+1} over (x_{m+1}..x_{m+w_in}) to B_m over
/// (x_m..x_{m+w_out-1}). The entry from state (a_1..a_{w_in}) to state
/// (z, a_1..a_{w_out-1}) is phi_mm(z) prod_j phi_{m,m+j}(z, a_j); every other
/// entry is zero. Away from the chain end w_in = w_out = k and a_k is summed.
class TransferOperator {
 public:
  TransferOperator(const ChainProblem& c, int m, double tau);

  int row() const noexcept { return m_; }
  int in_width() const noexcept { return w_in_; }
  int out_width() const noexcept { return w_out_; }

  /// log of the entry at (t_out, t_in); -inf off the nonzero pattern.
  double log_entry(std::size_t t_out, std::size_t t_in) const;
  double entry(std::size_t t_out, std::size_t t_in) const;

  /// Row-major d^w_out x d^w_in matrix.
  std::vector<double> dense() const;
  /// Nonzero entries, counted over the full matrix.
  std::size_t nonzero_count() const;

  /// B_m from B_{m+1} by visiting only the nonzero pattern.
  MessageState apply(const MessageState& next, bool normalize) const;

 private:
  double log_weight(int z, std::size_t t_in) const;

  int m_, d_, k_, w_in_, w_out_;
  std::vector<double> self_;               // -tau c_mm(z)
  std::vector<std::vector<double>> pair_;  // pair_[j-1][z*d + a]: -tau c_{m,m+j}(z, a)
};

/// B_0 .. B_{n-1}, every message kept for the forward determination.
std::vector<MessageState> backward_pass_matrix(const ChainProblem& c, const SolverConfig& cfg,
                                               const ChainCaps& caps = ChainCaps::from_env());

/// Log-weights over x_m given B_m and the predecessors preds[j] = x_{m-1-j},
/// j < min(k, m). Couplings between the predecessors and every variable in
/// B_m's window are included, so the result is the exact conditional
/// marginal up to a constant.
std::vector<double> conditional_log_marginal(const ChainProblem& c, int m,
                                             const MessageState& b_m,
                                             std::span<const int> preds, double tau);

/// Predecessors of x_m in the order x_{m-1}, x_{m-2}, ... taken from x.
std::vector<int> predecessors(const ChainProblem& c, int m, std::span<const int> x);

/// C(x) from the chain's tables.
double chain_cost(const ChainProblem& c, std::span<const int> x);

/// Matrix method: one backward pass, then x_0, x_1, ... by argmax.
SolveResult solve_matrix(const ChainProblem& c, const SolverConfig& cfg,
                         const ChainCaps& caps = ChainCaps::from_env());

/// Banded stair network with superposition and self nodes fused into the
/// copy nodes.
StairNetwork build_chain_stair(const ChainProblem& c, const SolverConfig& cfg);

struct TensorOptions {
  /// Contract materialized nodes over every index combination instead of
  /// the nonzero pattern.
  bool dense_nodes = false;
  ChainCaps caps = ChainCaps::from_env();
};

/// Tensor method: rows of the banded stair absorbed bottom to top, the
/// boundary holding the open wires of up to k rows; every boundary is kept
/// and read back for x_0, x_1, ...
SolveResult solve_tensor(const ChainProblem& c, const SolverConfig& cfg,
                         const TensorOptions& opt = {});

}  // namespace tnqudo
