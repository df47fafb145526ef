#include "tnqudo/tn_core.hpp"

#include <algorithm>
#include <cmath>

#include "tnqudo/error.hpp"

namespace tnqudo {

std::vector<double> TauGrid::values() const {
  validate();
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  const double ratio = std::log(max / min);
  for (int i = 0; i < count; ++i)
    out.push_back(i + 1 == count ? max : min * std::exp(ratio * i / (count - 1)));
  return out;
}

void TauGrid::validate() const {
  if (!(min > 0.0) || !std::isfinite(max)) throw InvalidArgument("tau grid needs 0 < min");
  if (!(min < max)) throw InvalidArgument("tau grid needs min < max");
  if (count < 1) throw InvalidArgument("tau grid needs count >= 1");
}

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive and finite");
  if (tau_grid) tau_grid->validate();
}

SolverConfig SolverConfig::with_tau(double t) const {
  SolverConfig c = *this;
  c.tau = t;
  c.tau_grid.reset();
  return c;
}

double factor_self(const Problem& p, int l, int a, double tau) {
  if (l < 0 || l >= p.n() || a < 0 || a >= p.d())
    throw InvalidArgument("factor_self index out of range");
  return std::exp(-tau * p.self_cost(l, a));
}

double factor_cross(const Problem& p, int l, int m, int a, int b, double tau) {
  if (l < 0 || m >= p.n() || l >= m || a < 0 || a >= p.d() || b < 0 || b >= p.d())
    throw InvalidArgument("factor_cross index out of range");
  return std::exp(-tau * p.pair_cost(l, m, a, b));
}

int argmax_extract(std::span<const double> v) {
  if (v.empty()) throw NumericFault("argmax of an empty vector");
  int best = 0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (std::isnan(v[a])) throw NumericFault("NaN entry in marginal vector");
    if (v[a] > v[best]) best = static_cast<int>(a);
  }
  return best;
}

int bit_count(int d) {
  int bits = 0;
  while ((1 << bits) < d) ++bits;
  return bits;
}

int bit_extract(std::span<const double> v, int bit) {
  double omega = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a)
    omega += ((a >> bit) & 1U) ? v[a] : -v[a];
  return omega > 0.0 ? 1 : 0;
}

int bits_extract(std::span<const double> v) {
  int value = 0;
  const int bits = bit_count(static_cast<int>(v.size()));
  for (int j = 0; j < bits; ++j) value |= bit_extract(v, j) << j;
  return value;
}

double normalize_in_place(std::span<double> v, const std::string& step) {
  if (v.empty()) throw NumericFault(step + ": empty vector");
  double mx = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericFault(step + ": overflow (non-finite entry)");
    if (x < 0.0) throw NumericFault(step + ": negative entry");
    mx = std::max(mx, x);
  }
  if (mx == 0.0) throw NumericFault(step + ": underflow (all entries zero)");
  for (double& x : v) x /= mx;
  return mx;
}

MarginalVector normalize(std::span<const double> v, const std::string& step) {
  MarginalVector out{{v.begin(), v.end()}, true};
  normalize_in_place(out.entries, step);
  return out;
}

double normalize_log_in_place(std::span<double> logw, const std::string& step) {
  if (logw.empty()) throw NumericFault(step + ": empty vector");
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : logw) {
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity())
      throw NumericFault(step + ": non-finite log weight");
    mx = std::max(mx, x);
  }
  if (mx == -std::numeric_limits<double>::infinity())
    throw NumericFault(step + ": underflow (all weights zero)");
  for (double& x : logw) x -= mx;
  return mx;
}

MarginalVector marginal_from_log(std::span<const double> logw, const std::string& step) {
  std::vector<double> shifted(logw.begin(), logw.end());
  normalize_log_in_place(shifted, step);
  MarginalVector out;
  out.entries.reserve(shifted.size());
  for (double x : shifted) out.entries.push_back(std::exp(x));
  out.scale_dropped = true;
  return out;
}

void LogSumExp::add(double x) noexcept {
  if (x == -std::numeric_limits<double>::infinity()) return;
  if (x <= max_) {
    sum_ += std::exp(x - max_);
  } else {
    sum_ = sum_ * std::exp(max_ - x) + 1.0;
    max_ = x;
  }
}

double LogSumExp::value() const noexcept {
  if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(sum_);
}

// ---------------------------------------------------------------------------

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::plus: return "plus";
    case NodeKind::plus_trace: return "plus_trace";
    case NodeKind::self_interaction: return "self_interaction";
    case NodeKind::cross_interaction: return "cross_interaction";
    case NodeKind::cross_last_row: return "cross_last_row";
    case NodeKind::copy: return "copy";
  }
  return "?";
}

TensorNode::TensorNode(NodeKind kind, int l, int m, int d, double tau,
                       std::vector<double> costs)
    : kind_(kind), l_(l), m_(m), d_(d), tau_(tau), costs_(std::move(costs)) {
  if (d < 2) throw InvalidArgument("node dimension must be >= 2");
}

TensorNode TensorNode::plus(int d) {
  return TensorNode(NodeKind::plus, -1, -1, d, 0.0, {});
}

TensorNode TensorNode::plus_trace(int d) {
  return TensorNode(NodeKind::plus_trace, -1, -1, d, 0.0, {});
}

TensorNode TensorNode::self_interaction(int l, int d, double tau, std::vector<double> costs) {
  if (static_cast<int>(costs.size()) != d) throw InvalidArgument("self node needs d costs");
  return TensorNode(NodeKind::self_interaction, l, -1, d, tau, std::move(costs));
}

TensorNode TensorNode::cross_interaction(int l, int m, int d, double tau,
                                         std::vector<double> costs) {
  if (static_cast<int>(costs.size()) != d * d) throw InvalidArgument("cross node needs d^2 costs");
  return TensorNode(NodeKind::cross_interaction, l, m, d, tau, std::move(costs));
}

TensorNode TensorNode::cross_last_row(int l, int m, int d, double tau,
                                      std::vector<double> costs) {
  if (static_cast<int>(costs.size()) != d * d) throw InvalidArgument("cross node needs d^2 costs");
  return TensorNode(NodeKind::cross_last_row, l, m, d, tau, std::move(costs));
}

TensorNode TensorNode::copy(int l, int d) {
  return TensorNode(NodeKind::copy, l, -1, d, 0.0, {});
}

TensorNode TensorNode::copy_fused(int l, int d, double tau, std::vector<double> self_costs) {
  if (static_cast<int>(self_costs.size()) != d) throw InvalidArgument("fused copy node needs d costs");
  return TensorNode(NodeKind::copy, l, -1, d, tau, std::move(self_costs));
}

int TensorNode::rank() const noexcept {
  switch (kind_) {
    case NodeKind::plus:
    case NodeKind::plus_trace: return 1;
    case NodeKind::self_interaction: return 2;
    case NodeKind::cross_last_row:
    case NodeKind::copy: return 3;
    case NodeKind::cross_interaction: return 4;
  }
  return 0;
}

double TensorNode::element(std::span<const int> idx) const {
  const double lw = log_element(idx);
  return lw == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(lw);
}

double TensorNode::log_element(std::span<const int> idx) const {
  constexpr double zero = -std::numeric_limits<double>::infinity();
  if (static_cast<int>(idx.size()) != rank()) throw InvalidArgument("wrong index count");
  for (int x : idx)
    if (x < 0 || x >= d_) throw InvalidArgument("node index out of range");
  switch (kind_) {
    case NodeKind::plus:
    case NodeKind::plus_trace:
      return 0.0;
    case NodeKind::self_interaction:  // (i, mu)
      return idx[0] == idx[1] ? -tau_ * costs_[idx[0]] : zero;
    case NodeKind::cross_interaction:  // (i, mu, j, nu)
      return idx[0] == idx[1] && idx[2] == idx[3] ? -tau_ * costs_[idx[2] * d_ + idx[0]] : zero;
    case NodeKind::cross_last_row:  // (i, mu, j)
      return idx[0] == idx[1] ? -tau_ * costs_[idx[2] * d_ + idx[0]] : zero;
    case NodeKind::copy:  // (i, mu, nu)
      if (idx[0] != idx[1] || idx[1] != idx[2]) return zero;
      return costs_.empty() ? 0.0 : -tau_ * costs_[idx[0]];
  }
  return zero;
}

std::vector<double> TensorNode::materialize() const {
  const int r = rank();
  std::size_t total = 1;
  for (int i = 0; i < r; ++i) total *= static_cast<std::size_t>(d_);
  std::vector<double> out(total);
  std::vector<int> idx(r, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int i = r - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % d_);
      rem /= d_;
    }
    out[flat] = element(idx);
  }
  return out;
}

std::size_t TensorNode::count_nonzeros() const {
  const auto dense = materialize();
  return static_cast<std::size_t>(
      std::count_if(dense.begin(), dense.end(), [](double x) { return x != 0.0; }));
}

}  // namespace tnqudo
