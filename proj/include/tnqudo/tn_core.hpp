#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnqudo/problem.hpp"

namespace tnqudo {

enum class TieBreak { lowest_index };

/// Geometric grid of `count` imaginary-time values on [min, max].
struct TauGrid {
  double min = 0.1;
  double max = 500.0;
  int count = 100;

  std::vector<double> values() const;
  void validate() const;
};

struct SolverConfig {
  double tau = 1.0;
  TieBreak tie_break = TieBreak::lowest_index;
  bool normalize = true;
  std::optional<TauGrid> tau_grid;

  void validate() const;
  /// Copy with a different tau (grid dropped).
  SolverConfig with_tau(double t) const;
};

/// d-entry vector of marginal weights whose argmax picks a variable's value.
struct MarginalVector {
  std::vector<double> entries;
  bool scale_dropped = false;
};

// Imaginary-time factors. QUBO/QUDO: exp(-tau (Q_ll a^2 + D_l a)) and
// exp(-tau Q_lm a b); T-QUDO: exp(-tau Qhat_{l,l,a,a}) and
// exp(-tau Qhat_{l,m,a,b}). Absent coefficients give 1.
double factor_self(const Problem& p, int l, int a, double tau);
double factor_cross(const Problem& p, int l, int m, int a, int b, double tau);

/// Index of the largest entry, ties to the lowest index. Throws NumericFault
/// on NaN or an empty vector.
int argmax_extract(std::span<const double> v);
inline int argmax_extract(const MarginalVector& v) { return argmax_extract(v.entries); }

/// Heaviside of sum_a s_a v_a with s_a = +1 when bit `bit` of a is set and -1
/// otherwise. H(0) = 0.
int bit_extract(std::span<const double> v, int bit);

/// Number of bits needed to write values in [0, d).
int bit_count(int d);

/// Value assembled from per-bit Heaviside extraction.
int bits_extract(std::span<const double> v);

/// Divides by the maximum entry. Throws NumericFault naming `step` when the
/// vector is empty, all zero, negative or non-finite.
MarginalVector normalize(std::span<const double> v, const std::string& step = "normalize");

/// In-place variant used by contraction kernels; returns the dropped scale.
double normalize_in_place(std::span<double> v, const std::string& step);

// ---------------------------------------------------------------------------
// Log-weight helpers used by the chain solvers. A log-weight vector stores
// log(w) with -inf for exact zeros; normalizing shifts the maximum to 0.

/// Shifts so that the maximum is 0; returns the removed shift. Throws
/// NumericFault if every entry is -inf or any entry is NaN/+inf.
double normalize_log_in_place(std::span<double> logw, const std::string& step);

/// exp(logw - max(logw)) as a MarginalVector with max entry 1.
MarginalVector marginal_from_log(std::span<const double> logw, const std::string& step);

/// Streaming log-sum-exp accumulator.
class LogSumExp {
 public:
  void add(double x) noexcept;
  double value() const noexcept;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// ---------------------------------------------------------------------------
// Tensor nodes of the stair network.

enum class NodeKind {
  plus,              // +_i = 1
  plus_trace,        // P+_i = 1
  self_interaction,  // S^l_{i mu}
  cross_interaction, // S^{lm}_{i mu j nu}
  cross_last_row,    // S^{n-1,m}_{i mu j}
  copy,              // C_{i mu nu}
};

std::string_view to_string(NodeKind kind);

/// One node of a stair network with its element rule. Self and cross nodes
/// carry their local cost table (d or d*d entries); the element is
/// exp(-tau * cost) on the structurally nonzero pattern and 0 elsewhere.
///
/// A fused copy node carries the self costs of its row, the superposition and
/// self-interaction having been folded into it; its diagonal is then
/// exp(-tau * cost) instead of 1.
class TensorNode {
 public:
  static TensorNode plus(int d);
  static TensorNode plus_trace(int d);
  static TensorNode self_interaction(int l, int d, double tau, std::vector<double> costs);
  static TensorNode cross_interaction(int l, int m, int d, double tau,
                                      std::vector<double> costs);
  static TensorNode cross_last_row(int l, int m, int d, double tau,
                                   std::vector<double> costs);
  static TensorNode copy(int l, int d);
  static TensorNode copy_fused(int l, int d, double tau, std::vector<double> self_costs);

  NodeKind kind() const noexcept { return kind_; }
  int d() const noexcept { return d_; }
  /// Index count: 1, 2, 3 or 4.
  int rank() const noexcept;
  /// Variables the node refers to (l, m); -1 when unused.
  int first() const noexcept { return l_; }
  int second() const noexcept { return m_; }
  bool fused() const noexcept { return kind_ == NodeKind::copy && !costs_.empty(); }

  /// Element at the given multi-index (length rank()), in the index order
  /// +_i, S^l_{i mu}, S^{lm}_{i mu j nu}, S^{n-1,m}_{i mu j}, C_{i mu nu}.
  double element(std::span<const int> idx) const;
  /// log(element), -inf for structural zeros. Finite where element() may
  /// overflow.
  double log_element(std::span<const int> idx) const;

  /// Nonzero elements, found by enumerating every multi-index.
  std::size_t count_nonzeros() const;

  /// Row-major dense materialization (d^rank entries).
  std::vector<double> materialize() const;

  /// Local cost for the self node or a fused copy (size d), or cross nodes
  /// (a*d + b).
  std::span<const double> costs() const noexcept { return costs_; }
  double tau() const noexcept { return tau_; }

 private:
  TensorNode(NodeKind kind, int l, int m, int d, double tau, std::vector<double> costs);

  NodeKind kind_;
  int l_, m_, d_;
  double tau_;
  std::vector<double> costs_;
};

}  // namespace tnqudo

namespace tnqudo {

/// Outcome of one solve: the assignment, its cost, the tau used and the
/// per-variable marginals that produced it.
struct SolveResult {
  Assignment assignment;
  double cost = 0.0;
  double tau = 0.0;
  std::vector<MarginalVector> marginals;
};

/// Runs `solve(tau)` once, or once per grid point when the config carries a
/// tau grid, keeping the lowest cost (earliest grid point on ties). Works for
/// any result type with a `cost` member.
template <class Solve>
auto best_over_tau(const SolverConfig& cfg, Solve&& solve) -> decltype(solve(0.0)) {
  cfg.validate();
  if (!cfg.tau_grid) return solve(cfg.tau);
  decltype(solve(0.0)) best;
  bool have = false;
  for (double t : cfg.tau_grid->values()) {
    auto r = solve(t);
    if (!have || r.cost < best.cost) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace tnqudo
