#include "tnqudo/dense_solver.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "labeled_tensor.hpp"
#include "tnqudo/error.hpp"

namespace tnqudo {

namespace {

using detail::LabeledTensor;
using detail::power;

// Dense tensor over the vertical wires lo..hi-1 crossing between two rows;
// wire w has digit weight d^(w - lo).
struct RowTensor {
  int lo = 0;
  int hi = 0;
  std::vector<double> data;
};

std::vector<double> cross_table(const TensorNode& node) {
  std::vector<double> t(node.costs().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(-node.tau() * node.costs()[i]);
  return t;
}

// Weights on x_r from the row's self node and its couplings to fixed wires.
std::vector<double> row_head(const StairNetwork& net, int r, std::span<const int> fixed) {
  const StairRow& row = net.rows[r];
  std::vector<double> head = row.self_weights();
  for (int l = 0; l < static_cast<int>(fixed.size()) && l < r; ++l) {
    const TensorNode* node = row.cross_with(l);
    if (!node) continue;
    for (int z = 0; z < net.d; ++z)
      head[z] *= std::exp(-node->tau() * node->costs()[fixed[l] * net.d + z]);
  }
  return head;
}

RowTensor absorb_row_sparse(const StairNetwork& net, int r, const RowTensor* below,
                            std::span<const int> fixed) {
  const int d = net.d;
  const int lo = static_cast<int>(fixed.size());
  const std::size_t top = power(d, r - lo);  // digit weight of x_r
  std::vector<double> t = below ? below->data : std::vector<double>(top * d, 1.0);

  const StairRow& row = net.rows[r];
  for (int l = r - 1; l >= lo; --l) {  // right to left
    const TensorNode* node = row.cross_with(l);
    if (!node) continue;
    const auto phi = cross_table(*node);
    const std::size_t wl = power(d, l - lo);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      const std::size_t a = (flat / wl) % d;
      const std::size_t b = flat / top;
      t[flat] *= phi[a * d + b];
    }
  }
  const auto head = row_head(net, r, fixed);
  RowTensor out{lo, r, std::vector<double>(top, 0.0)};
  for (int z = 0; z < d; ++z)
    for (std::size_t rest = 0; rest < top; ++rest) out.data[rest] += head[z] * t[rest + z * top];
  return out;
}

// Labels: horizontal bond after node p of row r, and the segment of wire w
// between rows r and r + 1.
int hbond(int r, int p) { return -(r * 4096 + p + 1); }
int segment(int w, int r) { return 1 + w * 4096 + (r + 1); }

LabeledTensor node_tensor(const TensorNode& node, std::vector<int> labels) {
  return LabeledTensor{node.d(), std::move(labels), node.materialize()};
}

// Contracts row r with the tensor below it, node by node from the right.
// Fixed wires are sliced out of their nodes. When `open_row` is set the
// superposition at the row start is dropped and its bond left open.
LabeledTensor contract_row_dense(const StairNetwork& net, int r, const RowTensor* below,
                                 std::span<const int> fixed, bool open_row) {
  const int d = net.d;
  const int lo = static_cast<int>(fixed.size());
  const StairRow& row = net.rows[r];
  std::optional<LabeledTensor> acc;
  auto fold = [&acc](LabeledTensor t) { acc = acc ? detail::contract(*acc, t) : std::move(t); };

  for (int p = static_cast<int>(row.nodes.size()) - 1; p >= 0; --p) {
    const TensorNode& node = row.nodes[p];
    const int left = hbond(r, p - 1), right = hbond(r, p);
    switch (node.kind()) {
      case NodeKind::plus_trace:
        fold(node_tensor(node, {left}));
        break;
      case NodeKind::copy: {
        fold(node_tensor(node, {left, right, segment(r, r)}));
        if (below) {
          LabeledTensor t{d, {}, below->data};
          for (int w = below->hi - 1; w >= below->lo; --w) t.labels.push_back(segment(w, r));
          fold(std::move(t));
        }
        break;
      }
      case NodeKind::cross_interaction:
      case NodeKind::cross_last_row: {
        const int l = node.first();
        const bool four = node.kind() == NodeKind::cross_interaction;
        std::vector<int> labels{left, right, segment(l, r - 1)};
        if (four) labels.push_back(segment(l, r));
        LabeledTensor t = node_tensor(node, labels);
        if (l < lo) {
          t = detail::slice(t, segment(l, r - 1), fixed[l]);
          if (four) t = detail::slice(t, segment(l, r), fixed[l]);
        }
        fold(std::move(t));
        break;
      }
      case NodeKind::self_interaction:
        fold(node_tensor(node, {open_row ? hbond(r, -1) : left, right}));
        break;
      case NodeKind::plus:
        if (!open_row) fold(node_tensor(node, {right}));
        break;
    }
  }
  // The last row has no copy node; its tensor below is absent by construction.
  return *acc;
}

RowTensor absorb_row_dense(const StairNetwork& net, int r, const RowTensor* below,
                           std::span<const int> fixed) {
  const int lo = static_cast<int>(fixed.size());
  LabeledTensor t = contract_row_dense(net, r, below, fixed, false);
  std::vector<int> order;
  for (int w = r - 1; w >= lo; --w) order.push_back(segment(w, r - 1));
  if (order.empty()) {
    // Only a scalar remains (r == lo); keep it as a one-entry tensor.
    return RowTensor{lo, r, t.data};
  }
  t = detail::permute(t, order);
  return RowTensor{lo, r, std::move(t.data)};
}

RowTensor absorb_row(const StairNetwork& net, int r, const RowTensor* below,
                     std::span<const int> fixed, ContractionPath path, bool normalize) {
  RowTensor out = path == ContractionPath::sparse ? absorb_row_sparse(net, r, below, fixed)
                                                  : absorb_row_dense(net, r, below, fixed);
  if (normalize) {
    normalize_in_place(out.data, "row " + std::to_string(r));
  } else {
    for (double x : out.data)
      if (!std::isfinite(x)) throw NumericFault("row " + std::to_string(r) + ": overflow");
  }
  return out;
}

// Marginal of row i from the tensor below it. `below` spans wires lo..i with
// lo <= fixed.size(); wires under lo are already sliced out of it.
MarginalVector marginal_row(const StairNetwork& net, int i, const RowTensor* below,
                            std::span<const int> fixed, ContractionPath path, bool normalize) {
  const int d = net.d;
  std::vector<double> v(d);
  if (path == ContractionPath::sparse) {
    const auto head = row_head(net, i, fixed);
    std::size_t base = 0, top = 1;
    if (below) {
      for (int w = below->lo; w < i; ++w) base += fixed[w] * power(d, w - below->lo);
      top = power(d, i - below->lo);
    }
    for (int z = 0; z < d; ++z) v[z] = head[z] * (below ? below->data[base + z * top] : 1.0);
  } else {
    // Slice the reused tensor down to wire i before the dense row contraction.
    std::optional<RowTensor> sliced;
    if (below && below->lo < i) {
      LabeledTensor t{d, {}, below->data};
      for (int w = below->hi - 1; w >= below->lo; --w) t.labels.push_back(w);
      for (int w = below->lo; w < i; ++w) t = detail::slice(t, w, fixed[w]);
      sliced = RowTensor{i, i + 1, std::move(t.data)};
      below = &*sliced;
    }
    LabeledTensor t = contract_row_dense(net, i, below, fixed.first(i), true);
    v = std::move(t.data);
  }
  const std::string step = "marginal of x_" + std::to_string(i);
  if (!normalize) {
    for (double x : v)
      if (!std::isfinite(x)) throw NumericFault(step + ": overflow");
    return MarginalVector{v, false};
  }
  return tnqudo::normalize(v, step);
}

}  // namespace

DenseCaps DenseCaps::from_env() {
  DenseCaps caps;
  if (const char* env = std::getenv("TNQUDO_DENSE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) caps.max_row_states = static_cast<std::size_t>(v);
  }
  return caps;
}

StairNetwork build_stair(const Problem& p, const SolverConfig& cfg, const DenseCaps& caps) {
  cfg.validate();
  std::size_t states = 1;
  for (int i = 0; i + 1 < p.n(); ++i) {
    states *= static_cast<std::size_t>(p.d());
    if (states > caps.max_row_states)
      throw CapacityError("dense network with n = " + std::to_string(p.n()) +
                          ", d = " + std::to_string(p.d()) + " exceeds the row-tensor cap of " +
                          std::to_string(caps.max_row_states) + " states");
  }
  return build_banded_stair(p, std::max(1, p.n() - 1), cfg.tau, false);
}

MarginalVector contract_marginal(const StairNetwork& net, int i, std::span<const int> fixed,
                                 ContractionPath path, bool normalize) {
  if (i < 0 || i >= net.n) throw InvalidArgument("variable index out of range");
  if (static_cast<int>(fixed.size()) != i)
    throw InvalidArgument("fixed prefix must cover exactly x_0..x_{i-1}");
  for (int v : fixed)
    if (v < 0 || v >= net.d) throw InvalidArgument("fixed value out of range");
  if (path == ContractionPath::dense && net.band < net.n - 1)
    throw InvalidArgument("the dense contraction path needs the full stair network");
  std::optional<RowTensor> below;
  for (int r = net.n - 1; r > i; --r)
    below = absorb_row(net, r, below ? &*below : nullptr, fixed, path, normalize);
  return marginal_row(net, i, below ? &*below : nullptr, fixed, path, normalize);
}

SolveResult solve_dense(const Problem& p, const SolverConfig& cfg, const DenseOptions& opt) {
  return best_over_tau(cfg, [&](double tau) {
    const SolverConfig c = cfg.with_tau(tau);
    const StairNetwork net = build_stair(p, c, opt.caps);
    SolveResult res;
    res.tau = tau;
    res.assignment.reserve(p.n());
    if (opt.reuse) {
      // stored[r] is the tensor left after absorbing rows r..n-1.
      std::vector<std::optional<RowTensor>> stored(p.n() + 1);
      for (int r = p.n() - 1; r >= 1; --r)
        stored[r] = absorb_row(net, r, stored[r + 1] ? &*stored[r + 1] : nullptr, {}, opt.path,
                               c.normalize);
      for (int i = 0; i < p.n(); ++i) {
        const RowTensor* below = stored[i + 1] ? &*stored[i + 1] : nullptr;
        res.marginals.push_back(
            marginal_row(net, i, below, res.assignment, opt.path, c.normalize));
        res.assignment.push_back(argmax_extract(res.marginals.back()));
      }
    } else {
      for (int i = 0; i < p.n(); ++i) {
        res.marginals.push_back(contract_marginal(net, i, res.assignment, opt.path, c.normalize));
        res.assignment.push_back(argmax_extract(res.marginals.back()));
      }
    }
    res.cost = evaluate_cost(p, res.assignment);
    return res;
  });
}

}  // namespace tnqudo
