#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tnqudo/error.hpp"
#include "tnqudo/problem.hpp"

using namespace tnqudo;

namespace {

Assignment random_assignment(const Problem& p, std::mt19937_64& rng) {
  Assignment x(p.n());
  for (int& v : x) v = static_cast<int>(rng() % p.d());
  return x;
}

}  // namespace

TEST(EvaluateCost, QuboSubstitution) {
  Problem p(ProblemKind::qubo, 2, 2);
  p.set_quad(0, 0, 1);
  p.set_quad(0, 1, -2);
  p.set_quad(1, 1, 1);
  EXPECT_EQ(evaluate_cost(p, std::vector{1, 1}), 0.0);
  EXPECT_EQ(evaluate_cost(p, std::vector{1, 0}), 1.0);
}

TEST(EvaluateCost, ZeroAssignmentIsZero) {
  auto p = random_instance({ProblemKind::qudo, 6, 3, 2, 11, false});
  EXPECT_EQ(evaluate_cost(p, Assignment(6, 0)), 0.0);
  Problem t(ProblemKind::tqudo, 3, 2);
  EXPECT_EQ(evaluate_cost(t, Assignment(3, 0)), 0.0);
}

TEST(EvaluateCost, QudoWithLinearTerm) {
  Problem p(ProblemKind::qudo, 2, 3);
  p.set_quad(0, 1, 1);
  p.set_lin(0, -2);
  EXPECT_EQ(evaluate_cost(p, std::vector{2, 1}), -2.0);
}

TEST(EvaluateCost, TqudoSelectsElement) {
  Problem p(ProblemKind::tqudo, 2, 2);
  p.set_qhat(0, 1, 1, 0, 5);
  EXPECT_EQ(evaluate_cost(p, std::vector{1, 0}), 5.0);
  EXPECT_EQ(evaluate_cost(p, std::vector{0, 1}), 0.0);
}

TEST(EvaluateCost, RejectsBadAssignments) {
  Problem p(ProblemKind::qudo, 3, 3);
  EXPECT_THROW(evaluate_cost(p, std::vector{0, 1}), InvalidAssignment);
  EXPECT_THROW(evaluate_cost(p, std::vector{0, 1, 3}), InvalidAssignment);
  EXPECT_THROW(evaluate_cost(p, std::vector{0, -1, 0}), InvalidAssignment);
}

TEST(EvaluateCost, TqudoEmbeddingAgrees) {
  std::mt19937_64 rng(3);
  for (int seed = 0; seed < 50; ++seed) {
    const bool lin = seed % 2 == 0;
    const int n = 2 + seed % 7;
    auto p = random_instance({ProblemKind::qudo, n, 2 + seed % 3, 1 + seed % (n - 1),
                              static_cast<std::uint64_t>(seed), lin});
    const auto t = to_tqudo(p);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_assignment(p, rng);
      const double a = evaluate_cost(p, x), b = evaluate_cost(t, x);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(EvaluateCost, QuboAsQudoAgrees) {
  auto p = random_instance({ProblemKind::qubo, 7, 2, 3, 5, false});
  auto q = qubo_as_qudo(p);
  EXPECT_EQ(q.kind(), ProblemKind::qudo);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = random_assignment(p, rng);
    EXPECT_EQ(evaluate_cost(p, x), evaluate_cost(q, x));
  }
}

TEST(ProblemTest, ZeroCoefficientIsAbsent) {
  Problem p(ProblemKind::qudo, 4, 2);
  p.set_quad(0, 3, 1.5);
  EXPECT_EQ(p.bandwidth(), 3);
  p.set_quad(0, 3, 0.0);
  EXPECT_EQ(p.bandwidth(), 0);
  EXPECT_TRUE(p.quad_terms().empty());
}

TEST(ProblemTest, RejectsInvalidEntries) {
  EXPECT_THROW(Problem(ProblemKind::qubo, 3, 3), InvalidArgument);
  EXPECT_THROW(Problem(ProblemKind::qudo, 0, 2), InvalidArgument);
  EXPECT_THROW(Problem(ProblemKind::qudo, 2, 1), InvalidArgument);
  Problem p(ProblemKind::qubo, 3, 2);
  EXPECT_THROW(p.set_quad(2, 1, 1.0), InvalidArgument);
  EXPECT_THROW(p.set_quad(0, 3, 1.0), InvalidArgument);
  EXPECT_THROW(p.set_lin(0, 1.0), InvalidArgument);
  Problem t(ProblemKind::tqudo, 3, 2);
  EXPECT_THROW(t.set_qhat(1, 1, 0, 1, 1.0), InvalidArgument);
  EXPECT_THROW(t.set_qhat(0, 1, 0, 2, 1.0), InvalidArgument);
  EXPECT_THROW(t.set_quad(0, 1, 1.0), InvalidArgument);
}

TEST(ChainView, Tridiagonal) {
  Problem p(ProblemKind::qudo, 4, 2);
  p.set_quad(0, 1, 1);
  p.set_quad(1, 2, 1);
  p.set_quad(2, 3, -1);
  const auto c = chain_view(p, 1);
  EXPECT_EQ(c.k(), 1);
  EXPECT_EQ(c.lower_neighbors(0), 0);
  EXPECT_EQ(c.lower_neighbors(3), 1);
  EXPECT_EQ(c.pair_cost(3, 1, 1, 1), -1.0);
}

TEST(ChainView, NamesOffendingPair) {
  Problem p(ProblemKind::qudo, 5, 2);
  p.set_quad(0, 1, 1);
  p.set_quad(0, 3, 2);
  try {
    chain_view(p, 2);
    FAIL() << "expected NotAChain";
  } catch (const NotAChain& e) {
    EXPECT_EQ(e.i(), 0);
    EXPECT_EQ(e.j(), 3);
    EXPECT_EQ(e.code(), "not-a-chain");
  }
}

TEST(ChainView, DenseWithFullBand) {
  Problem p(ProblemKind::qudo, 5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) p.set_quad(i, j, 0.1 * (i + 1) - 0.07 * j);
  EXPECT_NO_THROW(chain_view(p, 4));
  EXPECT_THROW(chain_view(p, 3), NotAChain);
}

TEST(ChainView, MonotoneInK) {
  for (int seed = 0; seed < 40; ++seed) {
    const int n = 6;
    const int band = 1 + seed % 5;
    auto p = random_instance({ProblemKind::qudo, n, 2, band, static_cast<std::uint64_t>(seed), false});
    for (int k = 2; k < n; ++k) {
      bool ok_k = true, ok_prev = true;
      try { chain_view(p, k); } catch (const NotAChain&) { ok_k = false; }
      try { chain_view(p, k - 1); } catch (const NotAChain&) { ok_prev = false; }
      EXPECT_EQ(ok_k, ok_prev || p.bandwidth() == k);
    }
  }
}

TEST(ChainView, TablesMatchProblem) {
  for (auto kind : {ProblemKind::qudo, ProblemKind::tqudo}) {
    auto p = random_instance({kind, 8, 3, 2, 21, kind == ProblemKind::qudo});
    const auto c = chain_view(p, 2);
    for (int m = 0; m < 8; ++m)
      for (int a = 0; a < 3; ++a) {
        EXPECT_EQ(c.self_cost(m, a), p.self_cost(m, a));
        for (int j = 1; j <= c.lower_neighbors(m); ++j)
          for (int b = 0; b < 3; ++b) EXPECT_EQ(c.pair_cost(m, j, b, a), p.pair_cost(m - j, m, b, a));
      }
  }
}

TEST(ChainView, PrefixWithKnownSuffix) {
  auto p = random_instance({ProblemKind::qudo, 7, 3, 2, 4, true});
  const auto c = chain_view(p, 2);
  const std::vector<int> suffix{2, 0, 1};
  const auto pre = c.prefix_with_known_suffix(4, suffix);
  ASSERT_EQ(pre.n(), 4);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    Assignment head(4);
    for (int& v : head) v = static_cast<int>(rng() % 3);
    Assignment full = head;
    full.insert(full.end(), suffix.begin(), suffix.end());
    // Prefix cost differs from the full cost only by the suffix-internal part.
    double prefix_cost = 0;
    for (int m = 0; m < 4; ++m) {
      prefix_cost += pre.self_cost(m, head[m]);
      for (int j = 1; j <= pre.lower_neighbors(m); ++j)
        prefix_cost += pre.pair_cost(m, j, head[m - j], head[m]);
    }
    Assignment zero_head(4, 0);
    Assignment ref = zero_head;
    ref.insert(ref.end(), suffix.begin(), suffix.end());
    double zero_prefix = 0;
    for (int m = 0; m < 4; ++m) zero_prefix += pre.self_cost(m, 0);
    EXPECT_NEAR(evaluate_cost(p, full) - prefix_cost, evaluate_cost(p, ref) - zero_prefix, 1e-12);
  }
}

TEST(RandomInstance, SeededDeterminism) {
  const RandomInstanceSpec spec{ProblemKind::qudo, 3, 2, 1, 7, false};
  EXPECT_EQ(random_instance(spec), random_instance(spec));
  EXPECT_EQ(serialize_instance(random_instance(spec)), serialize_instance(random_instance(spec)));
  auto other = spec;
  other.seed = 8;
  EXPECT_NE(random_instance(spec), random_instance(other));
}

TEST(RandomInstance, LinearTermOffByDefault) {
  auto p = random_instance({ProblemKind::qudo, 10, 3, 2, 1, false});
  EXPECT_TRUE(p.lin_terms().empty());
  auto q = random_instance({ProblemKind::qudo, 10, 3, 2, 1, true});
  EXPECT_EQ(q.lin_terms().size(), 10u);
}

TEST(RandomInstance, BandAndRange) {
  for (auto kind : {ProblemKind::qubo, ProblemKind::qudo, ProblemKind::tqudo}) {
    auto p = random_instance({kind, 12, 2, 3, 99, false});
    EXPECT_LE(p.bandwidth(), 3);
    for (const auto& [key, v] : p.quad_terms()) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
    for (const auto& [key, v] : p.qhat_terms()) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
      if (key[0] == key[1]) EXPECT_EQ(key[2], key[3]);
    }
  }
}

TEST(RandomInstance, InvalidDimensions) {
  EXPECT_THROW(random_instance({ProblemKind::qubo, 3, 3, 1, 0, false}), InvalidArgument);
  EXPECT_THROW(random_instance({ProblemKind::qudo, 3, 2, 3, 0, false}), InvalidArgument);
  EXPECT_THROW(random_instance({ProblemKind::qudo, 3, 2, 0, 0, false}), InvalidArgument);
  EXPECT_THROW(random_instance({ProblemKind::qudo, 0, 2, 1, 0, false}), InvalidArgument);
}

TEST(InstanceIo, RoundTrip) {
  for (auto kind : {ProblemKind::qubo, ProblemKind::qudo, ProblemKind::tqudo})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto p = random_instance({kind, 9, kind == ProblemKind::qubo ? 2 : 3, 3, seed,
                                kind == ProblemKind::qudo});
      EXPECT_EQ(parse_instance(serialize_instance(p)), p);
    }
}

TEST(InstanceIo, RejectsBadDocuments) {
  EXPECT_THROW(parse_instance("{"), InstanceError);
  EXPECT_THROW(parse_instance(R"({"kind":"qudo","n":3,"d":2,"q":[[2,1,1.0]]})"), InstanceError);
  EXPECT_THROW(parse_instance(R"({"kind":"qudo","n":3,"d":2,"q":[[0,5,1.0]]})"), InstanceError);
  EXPECT_THROW(parse_instance(R"({"kind":"qudo","n":3,"d":2,"q":[[0,1,1.0],[0,1,2.0]]})"),
               InstanceError);
  EXPECT_THROW(parse_instance(R"({"kind":"maxcut","n":3,"d":2,"q":[]})"), InstanceError);
  EXPECT_THROW(parse_instance(R"({"kind":"qubo","n":3,"d":3,"q":[]})"), InstanceError);
  EXPECT_THROW(parse_instance(R"({"kind":"qudo","d":2,"q":[]})"), InstanceError);
}

TEST(InstanceIo, ParsesExample) {
  auto p = parse_instance(
      R"({"kind":"qudo","n":3,"d":2,"q":[[0,1,-1.0],[1,2,1.0]],"lin":[[2,0.25]]})");
  EXPECT_EQ(p.n(), 3);
  EXPECT_EQ(p.quad(0, 1), -1.0);
  EXPECT_EQ(p.lin(2), 0.25);
  EXPECT_EQ(p.bandwidth(), 1);
}
