#include <gtest/gtest.h>

#include "tnqudo/error.hpp"
#include "tnqudo/oracle.hpp"
#include "tnqudo/waterfall.hpp"

using namespace tnqudo;

namespace {

SolverConfig at_tau(double tau) {
  SolverConfig c;
  c.tau = tau;
  return c;
}

// Chain with every coupling across the cut between x_{cut-1} and x_cut zero.
Problem cut_chain(int n, int d, int k, int cut, std::uint64_t seed) {
  auto p = random_instance({ProblemKind::qudo, n, d, k, seed, false});
  for (int l = std::max(0, cut - k); l < cut; ++l)
    for (int r = cut; r < std::min(n, l + k + 1); ++r) p.set_quad(l, r, 0.0);
  return p;
}

}  // namespace

TEST(CandidateTable, DecoupledRowIsUniform) {
  Problem p(ProblemKind::qudo, 4, 2);
  p.set_quad(2, 3, 0.7);
  const auto c = chain_view(p, 1);
  const auto msgs = backward_pass_matrix(c, at_tau(3.0));
  const auto y = candidate_table(msgs[2], c, 2, 3.0);
  EXPECT_EQ(y.best.size(), 2u);
  EXPECT_TRUE(y.uniform());
}

TEST(CandidateTable, StrongCouplingFollowsPredecessor) {
  Problem p(ProblemKind::qubo, 2, 2);
  p.set_quad(0, 1, -3);
  const auto c = chain_view(p, 1);
  const auto msgs = backward_pass_matrix(c, at_tau(5.0));
  EXPECT_EQ(msgs[1].entries(), (std::vector{1.0, 1.0}));
  const auto y = candidate_table(msgs[1], c, 1, 5.0);
  EXPECT_EQ(y.best, (std::vector{0, 1}));
  EXPECT_FALSE(y.uniform());
}

TEST(CandidateTable, FirstRowHasOneEntry) {
  auto p = random_instance({ProblemKind::qudo, 5, 3, 2, 1, false});
  const auto c = chain_view(p, 2);
  const auto msgs = backward_pass_matrix(c, at_tau(1.0));
  EXPECT_EQ(candidate_table(msgs[0], c, 0, 1.0).best.size(), 1u);
  EXPECT_EQ(candidate_table(msgs[1], c, 1, 1.0).best.size(), 3u);
  EXPECT_EQ(candidate_table(msgs[3], c, 3, 1.0).best.size(), 9u);
}

TEST(CheckCascade, SingleNeighbour) {
  const std::vector<WaterfallTable> flat{{3, 1, {1, 1}}};
  const auto r = check_cascade(flat, 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, std::vector{1});
  const std::vector<WaterfallTable> mixed{{3, 1, {0, 1}}};
  EXPECT_FALSE(check_cascade(mixed, 2));
}

TEST(CheckCascade, RestrictedConstancy) {
  // d = 3, k = 2. Y_m is all 2. Y_{m+1} is indexed by (a_0 = x_m, a_1 =
  // x_{m-1}): equal to 0 wherever x_m = 2 and mixed elsewhere.
  WaterfallTable ym{5, 2, std::vector<int>(9, 2)};
  WaterfallTable ym1{6, 2, {1, 0, 0, 2, 1, 0, 1, 2, 0}};
  // Entries with a_0 = 2 sit at t = 2, 5, 8.
  const auto r = check_cascade(std::vector{ym, ym1}, 3);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, (std::vector{2, 0}));
  ym1.best[5] = 1;
  EXPECT_FALSE(check_cascade(std::vector{ym, ym1}, 3));
  // Y_m not constant: no cascade whatever Y_{m+1} holds.
  ym.best[4] = 0;
  ym1.best = std::vector<int>(9, 1);
  EXPECT_FALSE(check_cascade(std::vector{ym, ym1}, 3));
}

TEST(CheckCascade, ResolvedRowsCountAsConstant) {
  const WaterfallTable ym{5, 2, std::vector<int>(4, 1)};
  const std::vector<const WaterfallTable*> rows{&ym, nullptr};
  const auto r = check_cascade(rows, std::vector{0, 1}, 2);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, (std::vector{1, 1}));
}

TEST(SolveWaterfall, DecoupledInstance) {
  for (int k = 1; k <= 3; ++k) {
    Problem p(ProblemKind::qudo, 30, 4);
    const auto r = solve_waterfall(chain_view(p, k), at_tau(10.0));
    EXPECT_EQ(r.assignment, Assignment(30, 0));
    EXPECT_EQ(r.stats.w_prob, 1.0);
    EXPECT_EQ(r.stats.uniform_events, 30);
    EXPECT_EQ(r.stats.peak_tables_held, 1);
  }
}

TEST(SolveWaterfall, SmallChain) {
  Problem p(ProblemKind::qubo, 3, 2);
  p.set_quad(0, 1, -1);
  p.set_quad(1, 2, 1);
  const auto r = solve_waterfall(chain_view(p, 1), at_tau(10.0));
  EXPECT_EQ(r.assignment, (Assignment{1, 1, 0}));
  EXPECT_EQ(r.cost, -1.0);
}

TEST(SolveWaterfall, MatchesMatrixWithoutRestart) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 5 + static_cast<int>(seed * 13 % 196);
    const int d = 2 + static_cast<int>(seed % 3);
    const int k = 1 + static_cast<int>(seed % 2);
    auto p = random_instance({seed % 5 == 0 ? ProblemKind::tqudo : ProblemKind::qudo, n, d, k, seed, false});
    const auto c = chain_view(p, k);
    for (double tau : {1.0, 10.0, 50.0}) {
      const auto a = solve_matrix(c, at_tau(tau));
      const auto b = solve_waterfall(c, at_tau(tau));
      ASSERT_EQ(a.assignment, b.assignment) << "seed " << seed << " tau " << tau;
      EXPECT_EQ(a.cost, b.cost);
      EXPECT_GE(b.stats.uniform_events, 1);
      EXPECT_LE(b.stats.w_prob, 1.0);
    }
  }
}

TEST(SolveWaterfall, UniformTableFixesValue) {
  // With every uniform Y_m recorded during the pass, the final x_m must be the
  // uniform value. Checked through cut instances where Y_cut is uniform.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 40, d = 3, k = 1 + static_cast<int>(seed % 2), cut = 20;
    auto p = cut_chain(n, d, k, cut, seed);
    const auto c = chain_view(p, k);
    const auto msgs = backward_pass_matrix(c, at_tau(8.0));
    const auto y = candidate_table(msgs[cut], c, cut, 8.0);
    ASSERT_TRUE(y.uniform());
    const auto r = solve_waterfall(c, at_tau(8.0));
    EXPECT_EQ(r.assignment[cut], y.best.front());
  }
}

TEST(SolveWaterfall, MemoryDropsAtCut) {
  for (int k = 1; k <= 2; ++k)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const int n = 60;
      auto p = cut_chain(n, 3, k, n / 2, seed + 50);
      const auto r = solve_waterfall(chain_view(p, k), at_tau(10.0));
      EXPECT_LE(r.stats.peak_tables_held, n / 2 + k);
      EXPECT_GE(r.stats.uniform_events, 2);
    }
}

TEST(SolveWaterfall, StrongCouplingsRarelyCascade) {
  auto p = random_instance({ProblemKind::qudo, 200, 3, 1, 77, false});
  const auto r = solve_waterfall(chain_view(p, 1), at_tau(50.0));
  EXPECT_LT(r.stats.w_prob, 1.0);
}

TEST(SolveWaterfall, RestartStaysValid) {
  int restarted = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 8 + static_cast<int>(seed % 5);
    const int k = 1 + static_cast<int>(seed % 2);
    auto p = random_instance({ProblemKind::qudo, n, 2, k, seed, false});
    WaterfallOptions opt;
    opt.restart_factor = 2.0;
    const auto r = solve_waterfall(chain_view(p, k), at_tau(5.0), opt);
    EXPECT_NEAR(r.cost, evaluate_cost(p, r.assignment), 1e-12);
    EXPECT_GE(r.cost, brute_force(p).best_cost - 1e-12);
    restarted += r.stats.restarts > 0;
  }
  EXPECT_GT(restarted, 0);
}

TEST(SolveWaterfall, RestartTauIsCapped) {
  Problem p(ProblemKind::qudo, 20, 2);
  WaterfallOptions opt;
  opt.restart_factor = 1e6;
  const auto r = solve_waterfall(chain_view(p, 1), at_tau(1.0), opt);
  EXPECT_EQ(r.stats.restarts, 19);
  EXPECT_EQ(r.assignment, Assignment(20, 0));
  opt.restart_factor = 0.0;
  EXPECT_THROW(solve_waterfall(chain_view(p, 1), at_tau(1.0), opt), InvalidArgument);
}

TEST(SolveWaterfall, TauGridKeepsBest) {
  auto p = random_instance({ProblemKind::qudo, 10, 3, 1, 3, false});
  SolverConfig cfg;
  cfg.tau_grid = TauGrid{0.1, 500.0, 20};
  const auto r = solve_waterfall(chain_view(p, 1), cfg);
  const auto m = solve_matrix(chain_view(p, 1), cfg);
  EXPECT_EQ(r.cost, m.cost);
  EXPECT_EQ(r.tau, m.tau);
}
