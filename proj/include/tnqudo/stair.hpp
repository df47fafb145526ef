#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tnqudo/problem.hpp"
#include "tnqudo/tn_core.hpp"

namespace tnqudo {

/// One row of a stair network, nodes listed left to right.
///
/// Row r carries x_r horizontally. Its cross nodes S^{l r} (l < r) sit on the
/// vertical wires emitted by the copy nodes of earlier rows; a wire ends at
/// the last row it reaches, where its node is the 3-index S^{n-1,m} kind. The
/// copy node C_r emits wire r downward and is absent from the last row.
struct StairRow {
  int variable = 0;
  std::vector<TensorNode> nodes;

  int cross_count() const;
  /// Cross node coupling this row to variable l, or nullptr.
  const TensorNode* cross_with(int l) const;
  /// Self costs c_rr(a) held by the self node or a fused copy node.
  std::span<const double> self_costs() const;
  /// Self weights exp(-tau c_rr(a)).
  std::vector<double> self_weights() const;
};

struct StairNetwork {
  int n = 0;
  int d = 0;
  int band = 0;  // n - 1 for the dense network
  double tau = 0.0;
  bool fused = false;
  std::vector<StairRow> rows;
};

/// Builds the network for couplings with j - i <= band. Unfused rows are
/// [+, S^{rr}, S^{l r}..., C_r, P+]; fused rows fold + and S^{rr} into the
/// copy node: [C_r(self costs), S^{l r}...].
StairNetwork build_banded_stair(const Problem& p, int band, double tau, bool fused);

/// Same layout with band k taken from a chain view.
StairNetwork build_banded_stair(const ChainProblem& c, double tau, bool fused);

}  // namespace tnqudo
