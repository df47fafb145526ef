#include "tnqudo/waterfall.hpp"

#include <algorithm>
#include <memory>
#include <string>

#include "tnqudo/error.hpp"

namespace tnqudo {

namespace {

std::size_t ipow(int d, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(d);
  return r;
}

}  // namespace

bool WaterfallTable::uniform() const {
  return std::all_of(best.begin(), best.end(), [&](int v) { return v == best.front(); });
}

WaterfallTable candidate_table(const MessageState& b_m, const ChainProblem& c, int m, double tau) {
  WaterfallTable table{m, c.lower_neighbors(m), {}};
  const int d = c.d();
  const std::size_t count = ipow(d, table.preds);
  table.best.resize(count);
  std::vector<int> preds(table.preds);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t rest = t;
    for (int j = 0; j < table.preds; ++j, rest /= d) preds[j] = static_cast<int>(rest % d);
    const auto lw = conditional_log_marginal(c, m, b_m, preds, tau);
    table.best[t] = argmax_extract(marginal_from_log(lw, "candidate of x_" + std::to_string(m)));
  }
  return table;
}

std::optional<std::vector<int>> check_cascade(std::span<const WaterfallTable* const> tables,
                                              std::span<const int> known, int d) {
  std::vector<int> found;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const WaterfallTable* y = tables[i];
    if (!y) {
      found.push_back(known[i]);
      continue;
    }
    // Digits 0 .. fixed-1 hold x_{m+i-1}, ..., x_m, all found already.
    const int fixed = std::min<int>(static_cast<int>(i), y->preds);
    std::size_t base = 0;
    for (int j = 0; j < fixed; ++j) base += found[i - 1 - j] * ipow(d, j);
    const std::size_t step = ipow(d, fixed);
    const int value = y->best[base];
    for (std::size_t t = base; t < y->best.size(); t += step)
      if (y->best[t] != value) return std::nullopt;
    found.push_back(value);
  }
  return found;
}

std::optional<std::vector<int>> check_cascade(std::span<const WaterfallTable> tables, int d) {
  std::vector<const WaterfallTable*> ptrs;
  for (const auto& t : tables) ptrs.push_back(&t);
  return check_cascade(ptrs, std::vector<int>(tables.size(), 0), d);
}

WaterfallResult solve_waterfall(const ChainProblem& chain, const SolverConfig& cfg,
                                const WaterfallOptions& opt) {
  if (!(opt.restart_factor > 0.0)) throw InvalidArgument("restart factor must be positive");
  opt.caps.check(chain);
  return best_over_tau(cfg, [&](double tau0) {
    const int n = chain.n(), d = chain.d(), k = chain.k();
    ChainProblem c = chain;
    double tau = tau0;
    WaterfallResult res;
    res.tau = tau0;
    std::vector<std::optional<int>> x(n);
    std::vector<std::unique_ptr<WaterfallTable>> tables(n);
    int held = 0;

    MessageState next{n, 0, d, {0.0}};
    for (int m = n - 1; m >= 0; --m) {
      const TransferOperator op(c, m, tau);
      MessageState b = op.apply(next, cfg.normalize);
      tables[m] = std::make_unique<WaterfallTable>(candidate_table(b, c, m, tau));
      res.stats.peak_tables_held = std::max(res.stats.peak_tables_held, ++held);
      next = std::move(b);

      const int width = std::min(k, c.n() - m);
      std::vector<const WaterfallTable*> rows(width);
      std::vector<int> known(width, 0);
      for (int i = 0; i < width; ++i) {
        rows[i] = tables[m + i].get();
        if (!rows[i]) known[i] = *x[m + i];
      }
      const auto cascade = check_cascade(rows, known, d);
      if (!cascade) continue;

      ++res.stats.uniform_events;
      for (int i = 0; i < width; ++i) x[m + i] = (*cascade)[i];
      for (int r = m; r < n && tables[r]; ++r) {
        if (!x[r]) {
          std::size_t t = 0;
          for (int j = tables[r]->preds - 1; j >= 0; --j) t = t * d + *x[r - 1 - j];
          x[r] = tables[r]->best[t];
        }
        tables[r].reset();
        --held;
      }
      if (m > 0 && opt.restart_factor != 1.0) {
        std::vector<int> suffix;
        for (int r = m; r < std::min(m + k, c.n()); ++r) suffix.push_back(*x[r]);
        c = c.prefix_with_known_suffix(m, suffix);
        tau = std::min(tau * opt.restart_factor, kMaxRestartTau);
        next = MessageState{m, 0, d, {0.0}};
        ++res.stats.restarts;
      }
    }
    for (int r = 0; r < n; ++r) res.assignment.push_back(*x[r]);
    res.cost = chain_cost(chain, res.assignment);
    res.stats.w_prob = static_cast<double>(res.stats.uniform_events) / n;
    return res;
  });
}

}  // namespace tnqudo
