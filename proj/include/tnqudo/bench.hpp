#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tnqudo/problem.hpp"
#include "tnqudo/tn_core.hpp"

namespace tnqudo {

enum class Method { dense, matrix, tensor, waterfall, brute };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);
/// Comma-separated list of method names.
std::vector<Method> parse_methods(std::string_view text);

struct RunOptions {
  SolverConfig cfg;
  /// Neighbour count for the chain methods; 0 takes max(1, bandwidth).
  int k = 0;
  double restart_factor = 1.0;
};

/// One solve with its timing. wall_time covers the solver call only.
struct RunOutcome {
  Method method = Method::matrix;
  Assignment assignment;
  double cost = 0.0;
  std::optional<double> tau;  // winning tau; absent for brute force
  double wall_time = 0.0;
  std::size_t peak_memory_proxy = 0;  // stored row tensors, messages or tables
  std::optional<double> w_prob;
  std::optional<int> restarts;
};

RunOutcome run_method(const Problem& p, Method method, const RunOptions& opt);

/// 1 - c_method / c_ref. With c_ref = 0 the absolute difference
/// c_method - c_ref is returned instead and `absolute` is set.
struct RelativeError {
  double value = 0.0;
  bool absolute = false;
};
RelativeError relative_error(double c_method, double c_ref);

/// "0.5" for a single tau, "grid:MIN:MAX:COUNT" for a grid.
std::string tau_spec(const SolverConfig& cfg);

struct BenchRecord {
  std::string instance;
  std::uint64_t seed = 0;
  int n = 0, d = 0, k = 0;
  Method method = Method::matrix;
  std::string tau_spec;
  std::optional<double> tau;
  double cost = 0.0;
  std::optional<RelativeError> error;
  double wall_time = 0.0;
  std::size_t peak_memory_proxy = 0;
  std::optional<double> w_prob;
};

/// Builds a record, recomputing the cost from the assignment.
BenchRecord make_record(const Problem& p, const std::string& instance, std::uint64_t seed,
                        int k, const RunOutcome& out, const SolverConfig& cfg);

/// Fixed header and column order; wall_time is the only run-dependent
/// column.
std::string csv_header();
std::string csv_row(const BenchRecord& r);
/// Sorts by (instance, method, tau) and writes the header and rows.
void write_csv(std::ostream& os, std::vector<BenchRecord> records);

enum class Reference { brute, best_of };
Reference parse_reference(std::string_view text);

/// Runs every method on p and fills relative errors against the brute-force
/// optimum or the best cost among the methods.
std::vector<BenchRecord> compare(const Problem& p, const std::vector<Method>& methods,
                                 const RunOptions& opt, Reference ref,
                                 const std::string& instance = "input", std::uint64_t seed = 0);

struct ScalingParams {
  char axis = 'n';  // 'n', 'd' or 'k'
  std::vector<int> values;
  int n = 100, d = 2, k = 2;
  ProblemKind kind = ProblemKind::qudo;
  std::vector<Method> methods{Method::matrix, Method::tensor};
  int repeats = 5;
  std::uint64_t seed = 1;
  SolverConfig cfg;
};

/// One record per (axis value, method) with the median wall time over the
/// repeats. Each axis value gets its own seeded instance.
std::vector<BenchRecord> bench_scaling(const ScalingParams& params);

struct WaterfallProbParams {
  std::vector<int> d_values;
  int n = 200;
  int instances = 50;
  int decoupled = 0;  // extra all-zero instances per d, reported separately
  std::uint64_t seed = 1;
  SolverConfig cfg{1.0, TieBreak::lowest_index, true, TauGrid{}};
};

struct WaterfallProbRow {
  int d = 0;
  int n = 0;
  int instances = 0;
  bool decoupled = false;
  double mean_w_prob = 0.0;
  double stderr_w_prob = 0.0;
};

/// Random self terms and linear terms with every coupling removed.
Problem decoupled_instance(int n, int d, std::uint64_t seed);

std::vector<WaterfallProbRow> waterfall_prob(const WaterfallProbParams& params);
std::string waterfall_csv_header();
std::string waterfall_csv_row(const WaterfallProbRow& r);
void write_waterfall_csv(std::ostream& os, const std::vector<WaterfallProbRow>& rows);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace tnqudo
