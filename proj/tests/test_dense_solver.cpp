#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "tnqudo/dense_solver.hpp"
#include "tnqudo/error.hpp"
#include "tnqudo/oracle.hpp"

using namespace tnqudo;

namespace {

SolverConfig at_tau(double tau) {
  SolverConfig c;
  c.tau = tau;
  return c;
}

Problem pair_instance(double q) {
  Problem p(ProblemKind::qubo, 2, 2);
  p.set_quad(0, 1, q);
  return p;
}

Problem triangle(double q) {
  Problem p(ProblemKind::qubo, 3, 2);
  p.set_quad(0, 1, q);
  p.set_quad(0, 2, q);
  p.set_quad(1, 2, q);
  return p;
}

Problem dense_random(ProblemKind kind, int n, int d, std::uint64_t seed) {
  return random_instance({kind, n, d, n - 1, seed, kind == ProblemKind::qudo && seed % 2 == 0});
}

double max_rel_dev(std::vector<double> a, std::vector<double> b) {
  const double ma = *std::max_element(a.begin(), a.end());
  const double mb = *std::max_element(b.begin(), b.end());
  double dev = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] / ma - b[i] / mb));
  return dev;
}

}  // namespace

TEST(BuildStair, RowLayout) {
  auto p = dense_random(ProblemKind::qudo, 5, 2, 1);
  const auto net = build_stair(p, at_tau(1.0));
  ASSERT_EQ(net.rows.size(), 5u);
  for (int r = 0; r < 5; ++r) {
    const auto& row = net.rows[r];
    EXPECT_EQ(row.cross_count(), r);
    EXPECT_EQ(row.nodes.front().kind(), NodeKind::plus);
    EXPECT_EQ(row.nodes[1].kind(), NodeKind::self_interaction);
    EXPECT_EQ(row.nodes.back().kind(), NodeKind::plus_trace);
    const bool has_copy = std::any_of(row.nodes.begin(), row.nodes.end(),
                                      [](const TensorNode& t) { return t.kind() == NodeKind::copy; });
    EXPECT_EQ(has_copy, r < 4);
    for (int l = 0; l < r; ++l) {
      const auto* node = row.cross_with(l);
      ASSERT_NE(node, nullptr);
      EXPECT_EQ(node->kind(), r == 4 ? NodeKind::cross_last_row : NodeKind::cross_interaction);
      EXPECT_EQ(node->second(), r);
    }
  }
}

TEST(BuildStair, CapacityCap) {
  Problem big(ProblemKind::qubo, 30, 2);
  EXPECT_THROW(build_stair(big, at_tau(1.0)), CapacityError);
  EXPECT_NO_THROW(build_stair(Problem(ProblemKind::qubo, 16, 2), at_tau(1.0)));
  EXPECT_THROW(build_stair(Problem(ProblemKind::qubo, 17, 2), at_tau(1.0)), CapacityError);
  EXPECT_NO_THROW(build_stair(Problem(ProblemKind::qudo, 10, 3), at_tau(1.0)));
  EXPECT_THROW(build_stair(Problem(ProblemKind::qudo, 11, 3), at_tau(1.0)), CapacityError);
  EXPECT_NO_THROW(build_stair(Problem(ProblemKind::qudo, 11, 3), at_tau(1.0), DenseCaps{59049}));
}

TEST(ContractMarginal, TwoVariableExamples) {
  const auto net = build_stair(pair_instance(1.0), at_tau(1.0));
  for (auto path : {ContractionPath::sparse, ContractionPath::dense}) {
    const auto m0 = contract_marginal(net, 0, {}, path);
    EXPECT_NEAR(m0.entries[1] / m0.entries[0], (1 + std::exp(-1.0)) / 2, 1e-15);
    EXPECT_NEAR(m0.entries[1] / m0.entries[0] * 2, 1.36788, 1e-5);
    EXPECT_EQ(argmax_extract(m0), 0);
    const auto m1 = contract_marginal(net, 1, std::vector{1}, path);
    EXPECT_NEAR(m1.entries[1] / m1.entries[0], std::exp(-1.0), 1e-15);
    EXPECT_EQ(argmax_extract(m1), 0);
  }
  const auto neg = build_stair(pair_instance(-1.0), at_tau(1.0));
  const auto m = contract_marginal(neg, 0, {});
  EXPECT_NEAR(m.entries[1] / m.entries[0], (1 + std::exp(1.0)) / 2, 1e-14);
  EXPECT_EQ(argmax_extract(m), 1);
}

TEST(ContractMarginal, ZeroInstanceIsConstant) {
  const auto net = build_stair(Problem(ProblemKind::qudo, 5, 3), at_tau(2.0));
  for (int i = 0; i < 5; ++i) {
    const auto m = contract_marginal(net, i, Assignment(i, 1));
    for (double v : m.entries) EXPECT_EQ(v, 1.0);
  }
}

TEST(ContractMarginal, LastRowIsCompletionWeights) {
  auto p = dense_random(ProblemKind::qudo, 4, 3, 3);
  const double tau = 1.3;
  const auto net = build_stair(p, at_tau(tau));
  const std::vector<int> fixed{2, 0, 1};
  const auto m = contract_marginal(net, 3, fixed, ContractionPath::sparse, false);
  for (int z = 0; z < 3; ++z) {
    Assignment x = fixed;
    x.push_back(z);
    double local = p.self_cost(3, z);
    for (int l = 0; l < 3; ++l) local += p.pair_cost(l, 3, x[l], z);
    EXPECT_NEAR(m.entries[z], std::exp(-tau * local), 1e-14);
  }
}

TEST(ContractMarginal, RejectsBadPrefix) {
  const auto net = build_stair(triangle(1.0), at_tau(1.0));
  EXPECT_THROW(contract_marginal(net, 1, {}), InvalidArgument);
  EXPECT_THROW(contract_marginal(net, 1, std::vector{2}), InvalidArgument);
  EXPECT_THROW(contract_marginal(net, 3, std::vector{0, 0, 0}), InvalidArgument);
}

TEST(ContractMarginal, MatchesOracle) {
  int cases = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const int d = 2 + static_cast<int>(seed % 2);
    const auto kind = seed % 3 == 0 ? ProblemKind::tqudo : ProblemKind::qudo;
    auto p = dense_random(kind, n, d, seed);
    for (double tau : {0.5, 1.0, 2.0}) {
      const auto net = build_stair(p, at_tau(tau));
      Assignment fixed;
      for (int i = 0; i < n; ++i) {
        const auto got = contract_marginal(net, i, fixed);
        const auto want = direct_marginal(p, i, fixed, tau);
        EXPECT_LE(max_rel_dev(got.entries, want.entries), 1e-10) << "seed " << seed << " i " << i;
        fixed.push_back(static_cast<int>((seed + i) % d));
        ++cases;
      }
    }
  }
  EXPECT_GT(cases, 500);
}

TEST(ContractMarginal, SparseAndDensePathsAgree) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 2 + static_cast<int>(seed % 6);
    const int d = 2 + static_cast<int>(seed % 3);
    auto p = dense_random(seed % 2 ? ProblemKind::tqudo : ProblemKind::qudo, n, d, seed);
    const auto net = build_stair(p, at_tau(1.5));
    Assignment fixed;
    for (int i = 0; i < n; ++i) {
      const auto a = contract_marginal(net, i, fixed, ContractionPath::sparse);
      const auto b = contract_marginal(net, i, fixed, ContractionPath::dense);
      for (int j = 0; j < d; ++j)
        EXPECT_LE(std::abs(a.entries[j] - b.entries[j]), 1e-12 * std::max(a.entries[j], 1e-300))
            << "seed " << seed;
      fixed.push_back(static_cast<int>(seed * 7 + i) % d);
    }
  }
}

TEST(SolveDense, Triangles) {
  auto pos = solve_dense(triangle(1.0), at_tau(10.0));
  EXPECT_EQ(pos.assignment, (Assignment{0, 0, 0}));
  EXPECT_EQ(pos.cost, 0.0);
  auto neg = solve_dense(triangle(-1.0), at_tau(10.0));
  EXPECT_EQ(neg.assignment, (Assignment{1, 1, 1}));
  EXPECT_EQ(neg.cost, -3.0);
  EXPECT_EQ(neg.marginals.size(), 3u);
  auto zero = solve_dense(Problem(ProblemKind::qubo, 3, 2), at_tau(10.0));
  EXPECT_EQ(zero.assignment, (Assignment{0, 0, 0}));
  EXPECT_EQ(zero.cost, 0.0);
}

TEST(SolveDense, ReuseInvariance) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed % 8);
    const int d = 2 + static_cast<int>(seed % 2);
    auto p = dense_random(seed % 4 == 0 ? ProblemKind::tqudo : ProblemKind::qudo, n, d, seed);
    for (double tau : {0.5, 3.0, 20.0}) {
      for (auto path : {ContractionPath::sparse, ContractionPath::dense}) {
        if (path == ContractionPath::dense && n > 6) continue;
        const auto a = solve_dense(p, at_tau(tau), {path, true});
        const auto b = solve_dense(p, at_tau(tau), {path, false});
        EXPECT_EQ(a.assignment, b.assignment) << "seed " << seed;
        for (int i = 0; i < n; ++i)
          EXPECT_LE(max_rel_dev(a.marginals[i].entries, b.marginals[i].entries), 1e-10);
      }
    }
  }
}

TEST(SolveDense, TauMonotoneAboveThreshold) {
  // Above tau0 = (n - 1) ln d / gap the optimum outweighs every other
  // completion, so decoding is exact and the cost stays at the optimum.
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 80 && checked < 20; ++seed) {
    const int n = 3 + static_cast<int>(seed % 6);
    const int d = 2 + static_cast<int>(seed % 2);
    auto p = dense_random(ProblemKind::qudo, n, d, seed);
    std::map<double, int> costs;
    const auto opt = brute_force(p);
    if (opt.optima_count != 1) continue;
    double second = INFINITY;
    Assignment x(n, 0);
    for (;;) {
      const double c = evaluate_cost(p, x);
      if (x != opt.best) second = std::min(second, c);
      int i = n - 1;
      while (i >= 0 && ++x[i] == d) x[i--] = 0;
      if (i < 0) break;
    }
    const double tau0 = (n - 1) * std::log(d) / (second - opt.best_cost);
    if (tau0 > 200) continue;
    double prev = INFINITY;
    int points = 0;
    for (double tau = tau0 * 1.01; tau < 700; tau *= 1.6) {
      SolveResult r;
      try {
        r = solve_dense(p, at_tau(tau));
      } catch (const NumericFault&) {
        break;  // overflow limit reached
      }
      ++points;
      EXPECT_LE(r.cost, prev + 1e-12);
      EXPECT_NEAR(r.cost, opt.best_cost, 1e-12);
      prev = r.cost;
    }
    EXPECT_GE(points, 2);
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(SolveDense, TauGridBestOf) {
  auto p = dense_random(ProblemKind::qudo, 7, 3, 5);
  SolverConfig c;
  c.tau_grid = TauGrid{0.1, 50.0, 12};
  const auto r = solve_dense(p, c);
  double best = INFINITY;
  for (double tau : c.tau_grid->values()) best = std::min(best, solve_dense(p, at_tau(tau)).cost);
  EXPECT_EQ(r.cost, best);
  EXPECT_GE(r.cost, brute_force(p).best_cost - 1e-12);
}
