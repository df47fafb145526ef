#include "tnqudo/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "tnqudo/error.hpp"

namespace tnqudo {

namespace {

// Cost tables arranged for incremental evaluation: assigning x_m adds
// self[m][x_m] plus pair costs against every earlier coupled variable.
struct CostTables {
  int n = 0, d = 0;
  std::vector<std::vector<double>> self;
  struct Link {
    int l;
    std::vector<double> table;  // a * d + b with a = x_l, b = x_m
  };
  std::vector<std::vector<Link>> links;

  explicit CostTables(const Problem& p) : n(p.n()), d(p.d()), self(n), links(n) {
    for (int m = 0; m < n; ++m) {
      self[m].resize(d);
      for (int a = 0; a < d; ++a) self[m][a] = p.self_cost(m, a);
      for (int l = 0; l < m; ++l) {
        std::vector<double> t(static_cast<std::size_t>(d) * d);
        bool any = false;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            t[a * d + b] = p.pair_cost(l, m, a, b);
            any = any || t[a * d + b] != 0.0;
          }
        if (any) links[m].push_back({l, std::move(t)});
      }
    }
  }

  double step(const std::vector<int>& x, int m) const {
    double c = self[m][x[m]];
    for (const auto& link : links[m]) c += link.table[x[link.l] * d + x[m]];
    return c;
  }
};

std::size_t count_states(int d, int free, std::size_t cap) {
  std::size_t s = 1;
  for (int i = 0; i < free; ++i) {
    s *= static_cast<std::size_t>(d);
    if (s > cap)
      throw CapacityError("enumeration of " + std::to_string(d) + "^" + std::to_string(free) +
                          " states exceeds the cap of " + std::to_string(cap));
  }
  return s;
}

// Neumaier summation.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

bool tied(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

OracleCaps OracleCaps::from_env() {
  OracleCaps caps;
  if (const char* env = std::getenv("TNQUDO_BRUTE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) caps.max_states = static_cast<std::size_t>(v);
  }
  return caps;
}

OracleResult brute_force(const Problem& p, const OracleCaps& caps) {
  count_states(p.d(), p.n(), caps.max_states);
  const CostTables tables(p);
  const int n = p.n(), d = p.d();
  std::vector<int> x(n, 0);
  std::vector<double> partial(n + 1, 0.0);  // partial[m] = cost of x_0..x_{m-1}
  OracleResult res;

  // Iterative depth-first walk; level m is the variable being varied.
  int m = 0;
  x[0] = -1;
  while (m >= 0) {
    if (++x[m] >= d) {
      --m;
      continue;
    }
    partial[m + 1] = partial[m] + tables.step(x, m);
    if (m + 1 < n) {
      ++m;
      x[m] = -1;
      continue;
    }
    const double c = partial[n];
    if (res.optima_count == 0) {
      res.best = x;
      res.best_cost = c;
      res.optima_count = 1;
    } else if (tied(c, res.best_cost)) {
      ++res.optima_count;
    } else if (c < res.best_cost) {
      res.best = x;
      res.best_cost = c;
      res.optima_count = 1;
    }
  }
  return res;
}

MarginalVector direct_marginal(const Problem& p, int i, std::span<const int> fixed, double tau,
                               double offset, const OracleCaps& caps) {
  const int n = p.n(), d = p.d();
  if (i < 0 || i >= n) throw InvalidArgument("variable index out of range");
  if (static_cast<int>(fixed.size()) != i)
    throw InvalidArgument("fixed prefix must cover exactly x_0..x_{i-1}");
  for (int v : fixed)
    if (v < 0 || v >= d) throw InvalidArgument("fixed value out of range");
  count_states(d, n - i, caps.max_states);

  const CostTables tables(p);
  std::vector<int> x(fixed.begin(), fixed.end());
  x.resize(n, 0);
  std::vector<double> partial(n + 1, 0.0);
  for (int m = 0; m < i; ++m) partial[m + 1] = partial[m] + tables.step(x, m);

  std::vector<CompensatedSum> sums(d);
  int m = i;
  x[i] = -1;
  while (m >= i) {
    if (++x[m] >= d) {
      --m;
      continue;
    }
    partial[m + 1] = partial[m] + tables.step(x, m);
    if (m + 1 < n) {
      ++m;
      x[m] = -1;
      continue;
    }
    sums[x[i]].add(std::exp(-tau * (partial[n] - offset)));
  }
  MarginalVector out;
  out.entries.resize(d);
  for (int j = 0; j < d; ++j) out.entries[j] = sums[j].value();
  return out;
}

}  // namespace tnqudo
