#include "tnqudo/stair.hpp"

#include <algorithm>
#include <cmath>

#include "tnqudo/error.hpp"

namespace tnqudo {

int StairRow::cross_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const TensorNode& t) {
    return t.kind() == NodeKind::cross_interaction || t.kind() == NodeKind::cross_last_row;
  }));
}

const TensorNode* StairRow::cross_with(int l) const {
  for (const auto& t : nodes)
    if ((t.kind() == NodeKind::cross_interaction || t.kind() == NodeKind::cross_last_row) &&
        t.first() == l)
      return &t;
  return nullptr;
}

std::span<const double> StairRow::self_costs() const {
  for (const auto& t : nodes)
    if (t.kind() == NodeKind::self_interaction || t.fused()) return t.costs();
  throw InvalidArgument("row has no self-interaction");
}

std::vector<double> StairRow::self_weights() const {
  for (const auto& t : nodes) {
    if (t.kind() == NodeKind::self_interaction) {
      std::vector<double> w(t.d());
      for (int a = 0; a < t.d(); ++a) w[a] = std::exp(-t.tau() * t.costs()[a]);
      return w;
    }
    if (t.fused()) {
      std::vector<double> w(t.d());
      for (int a = 0; a < t.d(); ++a) w[a] = std::exp(-t.tau() * t.costs()[a]);
      return w;
    }
  }
  throw InvalidArgument("row has no self-interaction");
}

namespace {

// self_cost(r, a) and pair_cost(l, r, a, b) supply the node tables.
template <class Self, class Pair>
StairNetwork build(int n, int d, int band, double tau, bool fused, Self self_cost,
                   Pair pair_cost) {
  StairNetwork net;
  net.n = n;
  net.d = d;
  net.band = band;
  net.tau = tau;
  net.fused = fused;
  net.rows.resize(n);
  for (int r = 0; r < n; ++r) {
    StairRow& row = net.rows[r];
    row.variable = r;
    std::vector<double> self(d);
    for (int a = 0; a < d; ++a) self[a] = self_cost(r, a);
    if (fused) {
      row.nodes.push_back(TensorNode::copy_fused(r, d, tau, self));
    } else {
      row.nodes.push_back(TensorNode::plus(d));
      row.nodes.push_back(TensorNode::self_interaction(r, d, tau, self));
    }
    for (int l = std::max(0, r - band); l < r; ++l) {
      std::vector<double> costs(static_cast<std::size_t>(d) * d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) costs[a * d + b] = pair_cost(l, r, a, b);
      // Wire l reaches rows l+1 .. min(l+band, n-1) and ends at the last one.
      const bool terminal = r == std::min(l + band, n - 1);
      row.nodes.push_back(terminal ? TensorNode::cross_last_row(l, r, d, tau, std::move(costs))
                                   : TensorNode::cross_interaction(l, r, d, tau, std::move(costs)));
    }
    if (!fused) {
      if (r < n - 1) row.nodes.push_back(TensorNode::copy(r, d));
      row.nodes.push_back(TensorNode::plus_trace(d));
    }
  }
  return net;
}

}  // namespace

StairNetwork build_banded_stair(const Problem& p, int band, double tau, bool fused) {
  if (band < 1) throw InvalidArgument("band must be >= 1");
  if (auto bad = p.first_pair_beyond(band)) throw NotAChain(bad->first, bad->second, band);
  return build(
      p.n(), p.d(), band, tau, fused, [&](int r, int a) { return p.self_cost(r, a); },
      [&](int l, int r, int a, int b) { return p.pair_cost(l, r, a, b); });
}

StairNetwork build_banded_stair(const ChainProblem& c, double tau, bool fused) {
  return build(
      c.n(), c.d(), c.k(), tau, fused, [&](int r, int a) { return c.self_cost(r, a); },
      [&](int l, int r, int a, int b) { return c.pair_cost(r, r - l, a, b); });
}

}  // namespace tnqudo
