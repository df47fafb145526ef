#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tnqudo {

enum class ProblemKind { qubo, qudo, tqudo };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_kind(std::string_view text);

using Assignment = std::vector<int>;

/// A QUBO, QUDO or T-QUDO cost model over `n` variables with values in
/// [0, d).
///
/// Coefficients are kept sparsely in upper-triangular maps (i <= j). Storing
/// an exact zero removes the entry, so "absent" and "zero" coincide and the
/// bandwidth reflects only nonzero couplings. A QUBO is a d = 2 QUDO without a
/// linear term; all three kinds share the same downstream code through
/// `self_cost` and `pair_cost`.
class Problem {
 public:
  using PairKey = std::pair<int, int>;
  using TensorKey = std::array<int, 4>;  // (i, j, a, b)

  Problem(ProblemKind kind, int n, int d);

  ProblemKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }

  // Mutators validate indices and the kind; they are meant for construction.
  void set_quad(int i, int j, double value);
  void set_lin(int i, double value);
  void set_qhat(int i, int j, int a, int b, double value);

  double quad(int i, int j) const;
  double lin(int i) const;
  double qhat(int i, int j, int a, int b) const;

  const std::map<PairKey, double>& quad_terms() const noexcept { return quad_; }
  const std::map<int, double>& lin_terms() const noexcept { return lin_; }
  const std::map<TensorKey, double>& qhat_terms() const noexcept {
    return qhat_;
  }

  /// Smallest k such that every stored (i, j) has j - i <= k.
  int bandwidth() const noexcept;

  /// First stored pair with j - i > k, if any (lexicographic order).
  std::optional<PairKey> first_pair_beyond(int k) const;

  /// Cost contributed by variable l alone when x_l = a:
  /// Q_ll a^2 + D_l a, or Qhat_{l,l,a,a} for T-QUDO.
  double self_cost(int l, int a) const;

  /// Cost contributed by the pair l < m when x_l = a and x_m = b:
  /// Q_lm a b, or Qhat_{l,m,a,b} for T-QUDO.
  double pair_cost(int l, int m, int a, int b) const;

  friend bool operator==(const Problem&, const Problem&) = default;

 private:
  void check_var(int i, const char* what) const;
  void check_value(int a, const char* what) const;

  ProblemKind kind_;
  int n_;
  int d_;
  std::map<PairKey, double> quad_;
  std::map<int, double> lin_;
  std::map<TensorKey, double> qhat_;
};

/// Throws InvalidAssignment unless x has n entries in [0, d).
void validate_assignment(const Problem& p, std::span<const int> x);

/// C(x) for the problem's kind.
double evaluate_cost(const Problem& p, std::span<const int> x);

/// Re-expresses a QUBO/QUDO as a T-QUDO with
/// Qhat_{i,j,a,b} = Q_ij a b and Qhat_{i,i,a,a} = Q_ii a^2 + D_i a.
/// A T-QUDO is returned unchanged.
Problem to_tqudo(const Problem& p);

/// The same coefficients relabelled as a QUDO (QUBO only).
Problem qubo_as_qudo(const Problem& p);

/// Dense per-variable cost tables of a problem restricted to a band of width
/// k. Row m stores the self costs of x_m and, for every j in [1, k] with
/// m - j >= 0, the pair costs between x_{m-j} and x_m.
class ChainProblem {
 public:
  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  int k() const noexcept { return k_; }
  ProblemKind kind() const noexcept { return kind_; }

  /// Number of neighbours variable m has on the lower side, min(k, m).
  int lower_neighbors(int m) const noexcept { return m < k_ ? m : k_; }

  double self_cost(int m, int a) const {
    return self_[static_cast<std::size_t>(m) * d_ + a];
  }
  /// Cost of x_{m-j} = a, x_m = b, for 1 <= j <= lower_neighbors(m).
  double pair_cost(int m, int j, int a, int b) const {
    return pair_[((static_cast<std::size_t>(m) * k_ + (j - 1)) * d_ + a) * d_ +
                 b];
  }

  /// Chain over variables 0..m-1 whose self costs absorb the couplings to the
  /// known values of x_m, x_{m+1}, ... given in `suffix` (suffix[0] = x_m).
  ChainProblem prefix_with_known_suffix(int m, std::span<const int> suffix) const;

 private:
  friend ChainProblem chain_view(const Problem& p, int k);
  ChainProblem(ProblemKind kind, int n, int d, int k);

  ProblemKind kind_;
  int n_, d_, k_;
  std::vector<double> self_;
  std::vector<double> pair_;
};

/// Succeeds iff bandwidth(p) <= k; throws NotAChain naming the first
/// offending pair otherwise.
ChainProblem chain_view(const Problem& p, int k);

struct RandomInstanceSpec {
  ProblemKind kind = ProblemKind::qudo;
  int n = 1;
  int d = 2;
  int k = 1;
  std::uint64_t seed = 0;
  bool lin_enabled = false;
};

/// Banded instance with coefficients i.i.d. uniform on [-1, 1], drawn from a
/// seeded mt19937_64 so that equal seeds give bit-identical instances on
/// every platform.
Problem random_instance(const RandomInstanceSpec& spec);

Problem parse_instance(std::string_view text);
std::string serialize_instance(const Problem& p);

}  // namespace tnqudo
