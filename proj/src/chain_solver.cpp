#include "tnqudo/chain_solver.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "tnqudo/error.hpp"

namespace tnqudo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t ipow(int d, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(d);
  return r;
}


void finish_log(std::vector<double>& lw, bool normalize, const std::string& step) {
  if (normalize) {
    normalize_log_in_place(lw, step);
    return;
  }
  for (double x : lw)
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity())
      throw NumericFault(step + ": non-finite log weight");
}

}  // namespace

ChainCaps ChainCaps::from_env() {
  ChainCaps caps;
  if (const char* env = std::getenv("TNQUDO_CHAIN_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) caps.max_states = static_cast<std::size_t>(v);
  }
  return caps;
}

void ChainCaps::check(const ChainProblem& c) const {
  std::size_t states = 1;
  for (int i = 0; i < std::min(c.k(), c.n()); ++i) {
    states *= static_cast<std::size_t>(c.d());
    if (states > max_states)
      throw CapacityError("d^k = " + std::to_string(c.d()) + "^" + std::to_string(c.k()) +
                          " exceeds the message cap of " + std::to_string(max_states));
  }
}

std::vector<double> MessageState::entries() const {
  return marginal_from_log(log_weights, "message " + std::to_string(origin)).entries;
}

// ---------------------------------------------------------------------------

TransferOperator::TransferOperator(const ChainProblem& c, int m, double tau)
    : m_(m), d_(c.d()), k_(c.k()) {
  if (m < 0 || m >= c.n()) throw InvalidArgument("transfer operator row out of range");
  w_in_ = std::min(k_, c.n() - 1 - m);
  w_out_ = std::min(k_, c.n() - m);
  self_.resize(d_);
  for (int z = 0; z < d_; ++z) self_[z] = -tau * c.self_cost(m, z);
  pair_.resize(w_in_);
  for (int j = 1; j <= w_in_; ++j) {
    auto& t = pair_[j - 1];
    t.resize(static_cast<std::size_t>(d_) * d_);
    for (int z = 0; z < d_; ++z)
      for (int a = 0; a < d_; ++a) t[z * d_ + a] = -tau * c.pair_cost(m + j, j, z, a);
  }
}

double TransferOperator::log_weight(int z, std::size_t t_in) const {
  double lw = self_[z];
  for (int j = 1; j <= w_in_; ++j, t_in /= d_) lw += pair_[j - 1][z * d_ + t_in % d_];
  return lw;
}

double TransferOperator::log_entry(std::size_t t_out, std::size_t t_in) const {
  const int z = static_cast<int>(t_out % d_);
  // The shared variables x_{m+1} .. x_{m+w_out-1} must agree.
  const std::size_t shared = ipow(d_, w_out_ - 1);
  if (t_out / d_ != t_in % shared) return kNegInf;
  return log_weight(z, t_in);
}

double TransferOperator::entry(std::size_t t_out, std::size_t t_in) const {
  const double lw = log_entry(t_out, t_in);
  return lw == kNegInf ? 0.0 : std::exp(lw);
}

std::vector<double> TransferOperator::dense() const {
  const std::size_t rows = ipow(d_, w_out_), cols = ipow(d_, w_in_);
  std::vector<double> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = entry(r, c);
  return out;
}

std::size_t TransferOperator::nonzero_count() const {
  const std::size_t rows = ipow(d_, w_out_), cols = ipow(d_, w_in_);
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (log_entry(r, c) != kNegInf) ++count;
  return count;
}

MessageState TransferOperator::apply(const MessageState& next, bool normalize) const {
  const std::size_t in_states = ipow(d_, w_in_);
  if (next.size() != in_states) throw InvalidArgument("message width does not match operator");
  MessageState out{m_, w_out_, d_, {}};
  const std::size_t out_states = ipow(d_, w_out_);
  if (w_out_ == w_in_ + 1) {
    // Chain end: nothing leaves the window, every entry has one term.
    out.log_weights.resize(out_states);
    for (std::size_t t = 0; t < in_states; ++t)
      for (int z = 0; z < d_; ++z)
        out.log_weights[z + d_ * t] = log_weight(z, t) + next.log_weights[t];
  } else {
    std::vector<LogSumExp> acc(out_states);
    const std::size_t shared = ipow(d_, w_out_ - 1);
    for (std::size_t t = 0; t < in_states; ++t)
      for (int z = 0; z < d_; ++z)
        acc[z + d_ * (t % shared)].add(log_weight(z, t) + next.log_weights[t]);
    out.log_weights.resize(out_states);
    for (std::size_t t = 0; t < out_states; ++t) out.log_weights[t] = acc[t].value();
  }
  finish_log(out.log_weights, normalize, "message " + std::to_string(m_));
  return out;
}

std::vector<MessageState> backward_pass_matrix(const ChainProblem& c, const SolverConfig& cfg,
                                               const ChainCaps& caps) {
  cfg.validate();
  caps.check(c);
  std::vector<MessageState> msgs(c.n());
  MessageState tail{c.n(), 0, c.d(), {0.0}};
  for (int m = c.n() - 1; m >= 0; --m) {
    const TransferOperator op(c, m, cfg.tau);
    msgs[m] = op.apply(m + 1 < c.n() ? msgs[m + 1] : tail, cfg.normalize);
  }
  return msgs;
}

std::vector<double> conditional_log_marginal(const ChainProblem& c, int m,
                                             const MessageState& b_m,
                                             std::span<const int> preds, double tau) {
  const int d = c.d(), k = c.k();
  if (static_cast<int>(preds.size()) != c.lower_neighbors(m))
    throw InvalidArgument("predecessor count does not match the chain");
  // g[i][v]: couplings of x_{m+i} = v to the fixed predecessors.
  std::vector<std::vector<double>> g(b_m.width, std::vector<double>(d, 0.0));
  for (int i = 0; i < b_m.width; ++i)
    for (int j = 1; j + i <= k && j <= static_cast<int>(preds.size()); ++j)
      for (int v = 0; v < d; ++v) g[i][v] -= tau * c.pair_cost(m + i, i + j, preds[j - 1], v);

  std::vector<LogSumExp> acc(d);
  for (std::size_t t = 0; t < b_m.size(); ++t) {
    double lw = b_m.log_weights[t];
    std::size_t rest = t;
    for (int i = 0; i < b_m.width; ++i, rest /= d) lw += g[i][rest % d];
    acc[t % d].add(lw);
  }
  std::vector<double> out(d);
  for (int z = 0; z < d; ++z) out[z] = acc[z].value();
  return out;
}

std::vector<int> predecessors(const ChainProblem& c, int m, std::span<const int> x) {
  std::vector<int> preds(c.lower_neighbors(m));
  for (std::size_t j = 0; j < preds.size(); ++j) preds[j] = x[m - 1 - j];
  return preds;
}

double chain_cost(const ChainProblem& c, std::span<const int> x) {
  if (static_cast<int>(x.size()) != c.n())
    throw InvalidAssignment("assignment length does not match the chain");
  double cost = 0.0;
  for (int m = 0; m < c.n(); ++m) {
    if (x[m] < 0 || x[m] >= c.d()) throw InvalidAssignment("assignment value out of range");
    cost += c.self_cost(m, x[m]);
    for (int j = 1; j <= c.lower_neighbors(m); ++j) cost += c.pair_cost(m, j, x[m - j], x[m]);
  }
  return cost;
}

SolveResult solve_matrix(const ChainProblem& c, const SolverConfig& cfg, const ChainCaps& caps) {
  return best_over_tau(cfg, [&](double tau) {
    const SolverConfig run = cfg.with_tau(tau);
    const auto msgs = backward_pass_matrix(c, run, caps);
    SolveResult res;
    res.tau = tau;
    for (int m = 0; m < c.n(); ++m) {
      const auto preds = predecessors(c, m, res.assignment);
      const auto lw = conditional_log_marginal(c, m, msgs[m], preds, tau);
      res.marginals.push_back(marginal_from_log(lw, "marginal of x_" + std::to_string(m)));
      res.assignment.push_back(argmax_extract(res.marginals.back()));
    }
    res.cost = chain_cost(c, res.assignment);
    return res;
  });
}

// ---------------------------------------------------------------------------
// Tensor method.

StairNetwork build_chain_stair(const ChainProblem& c, const SolverConfig& cfg) {
  cfg.validate();
  return build_banded_stair(c, cfg.tau, true);
}

namespace {

// Boundary after absorbing rows s..n-1: log-weights over the open wires
// lo..s-1 (wire w has digit weight d^(w - lo)).
struct Boundary {
  int lo = 0;
  int hi = 0;  // exclusive
  std::vector<double> log_weights;
};

int boundary_lo(int s, int k) { return std::max(0, s - k); }

// log of the row-r factors for x_r = z and wires lo..r-1 taken from `wire`,
// read off the nonzero pattern.
double row_log_sparse(const StairRow& row, int d, int z, const std::vector<int>& wire, int lo) {
  double lw = -row.nodes.front().tau() * row.self_costs()[z];
  for (const auto& node : row.nodes) {
    if (node.kind() != NodeKind::cross_interaction && node.kind() != NodeKind::cross_last_row)
      continue;
    lw -= node.tau() * node.costs()[wire[node.first() - lo] * d + z];
  }
  return lw;
}

// Absorbs row r into `below` through the nonzero pattern: each output state
// fixes the up wires, which equal the down wires, and only x_r is summed.
Boundary absorb_sparse(const StairNetwork& net, int r, const Boundary& below, int k) {
  const int d = net.d;
  const int lo = boundary_lo(r, k);
  Boundary out{lo, r, {}};
  const std::size_t states = ipow(d, r - lo);
  out.log_weights.resize(states);
  std::vector<int> wire(r - lo + 1);
  for (std::size_t t = 0; t < states; ++t) {
    std::size_t rest = t;
    for (int w = lo; w < r; ++w, rest /= d) wire[w - lo] = static_cast<int>(rest % d);
    LogSumExp acc;
    for (int z = 0; z < d; ++z) {
      wire[r - lo] = z;
      std::size_t tb = 0;
      for (int w = r; w >= below.lo; --w) tb = tb * d + wire[w - lo];
      acc.add(below.log_weights[tb] + row_log_sparse(net.rows[r], d, z, wire, lo));
    }
    out.log_weights[t] = acc.value();
  }
  return out;
}

// Same contraction with every node taken as a full array. The horizontal
// bond is carried explicitly and each continuing wire has independent up and
// down indices, so the work is d^(2k+1) per row instead of d^(k+1).
Boundary absorb_dense(const StairNetwork& net, int r, const Boundary& below, int k) {
  const int d = net.d;
  const int lo = boundary_lo(r, k);
  const StairRow& row = net.rows[r];
  const TensorNode& copy = row.nodes.front();
  std::vector<const TensorNode*> cross;
  for (const auto& node : row.nodes)
    if (node.kind() == NodeKind::cross_interaction || node.kind() == NodeKind::cross_last_row)
      cross.push_back(&node);

  // Down wires: those of `below` other than r itself.
  const int down_count = r - below.lo;
  Boundary out{lo, r, {}};
  const std::size_t up_states = ipow(d, r - lo);
  const std::size_t down_states = ipow(d, down_count);
  out.log_weights.resize(up_states);
  std::vector<int> up(r - lo), down(down_count);
  std::vector<double> vec(d), next(d);
  for (std::size_t t = 0; t < up_states; ++t) {
    std::size_t rest = t;
    for (int w = lo; w < r; ++w, rest /= d) up[w - lo] = static_cast<int>(rest % d);
    LogSumExp total;
    for (std::size_t tv = 0; tv < down_states; ++tv) {
      rest = tv;
      for (int w = below.lo; w < r; ++w, rest /= d) down[w - below.lo] = static_cast<int>(rest % d);
      for (int nu = 0; nu < d; ++nu) {  // down index of the copy node, wire r
        for (int mu = 0; mu < d; ++mu) {
          LogSumExp s;
          for (int i = 0; i < d; ++i) {
            const int idx[3] = {i, mu, nu};
            s.add(copy.log_element(idx));
          }
          vec[mu] = s.value();
        }
        for (const TensorNode* node : cross) {
          const int l = node->first();
          for (int mu = 0; mu < d; ++mu) {
            LogSumExp s;
            for (int i = 0; i < d; ++i) {
              if (node->kind() == NodeKind::cross_interaction) {
                const int idx[4] = {i, mu, up[l - lo], down[l - below.lo]};
                s.add(vec[i] + node->log_element(idx));
              } else {
                const int idx[3] = {i, mu, up[l - lo]};
                s.add(vec[i] + node->log_element(idx));
              }
            }
            next[mu] = s.value();
          }
          std::swap(vec, next);
        }
        LogSumExp row_sum;
        for (int mu = 0; mu < d; ++mu) row_sum.add(vec[mu]);
        const std::size_t tb = tv + ipow(d, down_count) * nu;
        total.add(row_sum.value() + below.log_weights[tb]);
      }
    }
    out.log_weights[t] = total.value();
  }
  return out;
}

}  // namespace

SolveResult solve_tensor(const ChainProblem& c, const SolverConfig& cfg,
                         const TensorOptions& opt) {
  opt.caps.check(c);
  return best_over_tau(cfg, [&](double tau) {
    const SolverConfig run = cfg.with_tau(tau);
    const StairNetwork net = build_chain_stair(c, run);
    const int n = c.n(), d = c.d(), k = c.k();

    // bounds[s] holds the boundary after absorbing rows s..n-1.
    std::vector<Boundary> bounds(n + 1);
    const int tail_lo = boundary_lo(n, k);
    bounds[n] = Boundary{tail_lo, n, std::vector<double>(ipow(d, n - tail_lo), 0.0)};
    for (int r = n - 1; r >= 1; --r) {
      bounds[r] = opt.dense_nodes ? absorb_dense(net, r, bounds[r + 1], k)
                                  : absorb_sparse(net, r, bounds[r + 1], k);
      finish_log(bounds[r].log_weights, run.normalize, "row " + std::to_string(r));
    }

    SolveResult res;
    res.tau = tau;
    for (int r = 0; r < n; ++r) {
      const Boundary& below = bounds[r + 1];
      const int lo = boundary_lo(r, k);
      std::vector<int> wire(r - lo + 1);
      for (int w = lo; w < r; ++w) wire[w - lo] = res.assignment[w];
      std::vector<double> lw(d);
      for (int z = 0; z < d; ++z) {
        wire[r - lo] = z;
        std::size_t tb = 0;
        for (int w = below.hi - 1; w >= below.lo; --w) tb = tb * d + wire[w - lo];
        lw[z] = below.log_weights[tb] + row_log_sparse(net.rows[r], d, z, wire, lo);
      }
      res.marginals.push_back(marginal_from_log(lw, "marginal of x_" + std::to_string(r)));
      res.assignment.push_back(argmax_extract(res.marginals.back()));
    }
    res.cost = chain_cost(c, res.assignment);
    return res;
  });
}

}  // namespace tnqudo
