#include "tnqudo/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "tnqudo/chain_solver.hpp"
#include "tnqudo/dense_solver.hpp"
#include "tnqudo/error.hpp"
#include "tnqudo/oracle.hpp"
#include "tnqudo/waterfall.hpp"

namespace tnqudo {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dense: return "dense";
    case Method::matrix: return "matrix";
    case Method::tensor: return "tensor";
    case Method::waterfall: return "waterfall";
    case Method::brute: return "brute";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::dense, Method::matrix, Method::tensor, Method::waterfall, Method::brute})
    if (text == to_string(m)) return m;
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

std::vector<Method> parse_methods(std::string_view text) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    out.push_back(parse_method(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

Reference parse_reference(std::string_view text) {
  if (text == "brute") return Reference::brute;
  if (text == "best-of") return Reference::best_of;
  throw InvalidArgument("unknown reference '" + std::string(text) + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunOutcome run_method(const Problem& p, Method method, const RunOptions& opt) {
  RunOutcome out;
  out.method = method;
  const int k = opt.k > 0 ? opt.k : std::max(1, p.bandwidth());
  using clock = std::chrono::steady_clock;
  clock::time_point start;
  auto stop = [&] { out.wall_time = std::chrono::duration<double>(clock::now() - start).count(); };

  switch (method) {
    case Method::brute: {
      start = clock::now();
      const auto r = brute_force(p);
      stop();
      out.assignment = r.best;
      break;
    }
    case Method::dense: {
      start = clock::now();
      const auto r = solve_dense(p, opt.cfg);
      stop();
      out.assignment = r.assignment;
      out.tau = r.tau;
      out.peak_memory_proxy = static_cast<std::size_t>(std::max(0, p.n() - 1));
      break;
    }
    case Method::matrix:
    case Method::tensor: {
      const auto chain = chain_view(p, k);
      start = clock::now();
      const auto r = method == Method::matrix ? solve_matrix(chain, opt.cfg)
                                              : solve_tensor(chain, opt.cfg);
      stop();
      out.assignment = r.assignment;
      out.tau = r.tau;
      out.peak_memory_proxy = static_cast<std::size_t>(p.n());
      break;
    }
    case Method::waterfall: {
      const auto chain = chain_view(p, k);
      WaterfallOptions wopt;
      wopt.restart_factor = opt.restart_factor;
      start = clock::now();
      const auto r = solve_waterfall(chain, opt.cfg, wopt);
      stop();
      out.assignment = r.assignment;
      out.tau = r.tau;
      out.peak_memory_proxy = static_cast<std::size_t>(r.stats.peak_tables_held);
      out.w_prob = r.stats.w_prob;
      out.restarts = r.stats.restarts;
      break;
    }
  }
  out.cost = evaluate_cost(p, out.assignment);
  return out;
}

RelativeError relative_error(double c_method, double c_ref) {
  if (c_ref == 0.0) return {c_method - c_ref, true};
  return {1.0 - c_method / c_ref, false};
}

std::string tau_spec(const SolverConfig& cfg) {
  if (!cfg.tau_grid) return format_double(cfg.tau);
  return "grid:" + format_double(cfg.tau_grid->min) + ":" + format_double(cfg.tau_grid->max) +
         ":" + std::to_string(cfg.tau_grid->count);
}

BenchRecord make_record(const Problem& p, const std::string& instance, std::uint64_t seed,
                        int k, const RunOutcome& out, const SolverConfig& cfg) {
  BenchRecord r;
  r.instance = instance;
  r.seed = seed;
  r.n = p.n();
  r.d = p.d();
  r.k = k;
  r.method = out.method;
  r.tau_spec = out.method == Method::brute ? "" : tau_spec(cfg);
  r.tau = out.tau;
  r.cost = evaluate_cost(p, out.assignment);
  r.wall_time = out.wall_time;
  r.peak_memory_proxy = out.peak_memory_proxy;
  r.w_prob = out.w_prob;
  return r;
}

std::string csv_header() {
  return "instance,seed,n,d,k,method,tau_spec,tau,cost,relative_error,error_mode,wall_time,"
         "peak_memory_proxy,w_prob";
}

std::string csv_row(const BenchRecord& r) {
  std::ostringstream os;
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.6f", r.wall_time);
  os << r.instance << ',' << r.seed << ',' << r.n << ',' << r.d << ',' << r.k << ','
     << to_string(r.method) << ',' << r.tau_spec << ',' << (r.tau ? format_double(*r.tau) : "")
     << ',' << format_double(r.cost) << ',' << (r.error ? format_double(r.error->value) : "")
     << ',' << (r.error ? (r.error->absolute ? "absolute" : "relative") : "") << ',' << wall
     << ',' << r.peak_memory_proxy << ',' << (r.w_prob ? format_double(*r.w_prob) : "");
  return os.str();
}

void write_csv(std::ostream& os, std::vector<BenchRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    if (a.instance != b.instance) return a.instance < b.instance;
    if (a.method != b.method) return a.method < b.method;
    return a.tau.value_or(0.0) < b.tau.value_or(0.0);
  });
  os << csv_header() << '\n';
  for (const auto& r : records) os << csv_row(r) << '\n';
}

std::vector<BenchRecord> compare(const Problem& p, const std::vector<Method>& methods,
                                 const RunOptions& opt, Reference ref,
                                 const std::string& instance, std::uint64_t seed) {
  if (methods.empty()) throw InvalidArgument("no methods to compare");
  const int k = opt.k > 0 ? opt.k : std::max(1, p.bandwidth());
  std::vector<BenchRecord> records;
  for (Method m : methods)
    records.push_back(make_record(p, instance, seed, k, run_method(p, m, opt), opt.cfg));
  double c_ref = 0.0;
  if (ref == Reference::brute) {
    c_ref = brute_force(p).best_cost;
  } else {
    c_ref = records.front().cost;
    for (const auto& r : records) c_ref = std::min(c_ref, r.cost);
  }
  for (auto& r : records) r.error = relative_error(r.cost, c_ref);
  return records;
}

std::vector<BenchRecord> bench_scaling(const ScalingParams& params) {
  if (params.values.empty()) throw InvalidArgument("empty sweep range");
  if (params.axis != 'n' && params.axis != 'd' && params.axis != 'k')
    throw InvalidArgument("sweep axis must be n, d or k");
  if (params.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  std::vector<BenchRecord> records;
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    int n = params.n, d = params.d, k = params.k;
    (params.axis == 'n' ? n : params.axis == 'd' ? d : k) = params.values[i];
    const std::uint64_t seed = params.seed + i;
    const Problem p = random_instance({params.kind, n, d, k, seed, false});
    const std::string id = std::string(1, params.axis) + "=" + std::to_string(params.values[i]);
    RunOptions opt{params.cfg, k, 1.0};
    for (Method m : params.methods) {
      std::vector<double> times;
      RunOutcome last;
      for (int rep = 0; rep < params.repeats; ++rep) {
        last = run_method(p, m, opt);
        times.push_back(last.wall_time);
      }
      std::sort(times.begin(), times.end());
      const std::size_t mid = times.size() / 2;
      last.wall_time = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
      records.push_back(make_record(p, id, seed, k, last, params.cfg));
    }
  }
  return records;
}

Problem decoupled_instance(int n, int d, std::uint64_t seed) {
  Problem p = random_instance({ProblemKind::qudo, n, d, 1, seed, true});
  for (int i = 0; i + 1 < n; ++i) p.set_quad(i, i + 1, 0.0);
  return p;
}

std::vector<WaterfallProbRow> waterfall_prob(const WaterfallProbParams& params) {
  if (params.d_values.empty()) throw InvalidArgument("empty d range");
  if (params.instances < 1) throw InvalidArgument("instances must be >= 1");
  if (params.n < 2) throw InvalidArgument("n must be >= 2");
  auto summarize = [](int d, int n, const std::vector<double>& w, bool decoupled) {
    WaterfallProbRow row{d, n, static_cast<int>(w.size()), decoupled, 0.0, 0.0};
    for (double v : w) row.mean_w_prob += v;
    row.mean_w_prob /= static_cast<double>(w.size());
    if (w.size() > 1) {
      double ss = 0.0;
      for (double v : w) ss += (v - row.mean_w_prob) * (v - row.mean_w_prob);
      row.stderr_w_prob = std::sqrt(ss / static_cast<double>(w.size() - 1)) /
                          std::sqrt(static_cast<double>(w.size()));
    }
    return row;
  };
  std::vector<WaterfallProbRow> rows;
  for (int d : params.d_values) {
    std::vector<double> w;
    for (int i = 0; i < params.instances; ++i) {
      const std::uint64_t seed = params.seed + 1000 * static_cast<std::uint64_t>(d) + i;
      const Problem p = random_instance({ProblemKind::qudo, params.n, d, 1, seed, false});
      w.push_back(solve_waterfall(chain_view(p, 1), params.cfg).stats.w_prob);
    }
    rows.push_back(summarize(d, params.n, w, false));
    if (params.decoupled > 0) {
      std::vector<double> wd;
      for (int i = 0; i < params.decoupled; ++i) {
        const std::uint64_t seed = params.seed + 1000 * static_cast<std::uint64_t>(d) + 500 + i;
        wd.push_back(solve_waterfall(chain_view(decoupled_instance(params.n, d, seed), 1),
                                     params.cfg)
                         .stats.w_prob);
      }
      rows.push_back(summarize(d, params.n, wd, true));
    }
  }
  return rows;
}

std::string waterfall_csv_header() { return "d,n,k,instances,decoupled,mean_w_prob,stderr_w_prob"; }

std::string waterfall_csv_row(const WaterfallProbRow& r) {
  return std::to_string(r.d) + "," + std::to_string(r.n) + ",1," + std::to_string(r.instances) +
         "," + (r.decoupled ? "1" : "0") + "," + format_double(r.mean_w_prob) + "," +
         format_double(r.stderr_w_prob);
}

void write_waterfall_csv(std::ostream& os, const std::vector<WaterfallProbRow>& rows) {
  os << waterfall_csv_header() << '\n';
  for (const auto& r : rows) os << waterfall_csv_row(r) << '\n';
}

}  // namespace tnqudo
