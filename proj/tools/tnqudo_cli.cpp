// Command-line front end: instance generation, solving, comparison and the
// benchmark sweeps.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "tnqudo/bench.hpp"
#include "tnqudo/error.hpp"

using namespace tnqudo;

namespace {

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("io", "cannot write '" + path + "'");
}

// "a,b,c" or "lo:hi" or "lo:hi:step".
std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<int> parts;
      std::stringstream ss(text);
      for (std::string item; std::getline(ss, item, ':');) parts.push_back(std::stoi(item));
      if (parts.size() < 2 || parts.size() > 3) throw UsageError("range must be LO:HI[:STEP]");
      const int step = parts.size() == 3 ? parts[2] : 1;
      if (step < 1) throw UsageError("range step must be >= 1");
      for (int v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
    } else {
      std::stringstream ss(text);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse range '" + text + "'");
  }
  if (out.empty()) throw UsageError("empty range '" + text + "'");
  return out;
}

TauGrid parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::vector<std::string> parts;
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--tau-grid expects MIN,MAX,COUNT");
  try {
    TauGrid g{std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2])};
    g.validate();
    return g;
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse --tau-grid '" + text + "'");
  }
}

SolverConfig make_config(double tau, const std::string& grid) {
  SolverConfig cfg;
  cfg.tau = tau;
  if (!grid.empty()) cfg.tau_grid = parse_grid(grid);
  cfg.validate();
  return cfg;
}

std::string report(const RunOutcome& out, const SolverConfig& cfg) {
  nlohmann::ordered_json j;
  j["method"] = to_string(out.method);
  j["assignment"] = out.assignment;
  j["cost"] = out.cost;
  if (out.tau) j["tau"] = *out.tau;
  if (out.method != Method::brute) j["tau_spec"] = tau_spec(cfg);
  if (out.w_prob) j["w_prob"] = *out.w_prob;
  if (out.restarts) j["restarts"] = *out.restarts;
  if (out.method != Method::brute) j["peak_memory_proxy"] = out.peak_memory_proxy;
  j["wall_time"] = out.wall_time;
  return j.dump() + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network solvers for QUBO, QUDO and T-QUDO problems"};
  app.require_subcommand(1);

  std::string input, output, method = "matrix", methods = "matrix,tensor,waterfall";
  std::string tau_grid, reference = "brute", kind = "qudo", axis = "n", range, d_range = "2:6";
  double tau = 50.0, restart_factor = 1.0;
  int n = 10, d = 2, k = 0, repeats = 5, instances = 50, decoupled = 0;
  std::uint64_t seed = 1;
  bool lin = false, no_timing = false;

  auto add_tau = [&](CLI::App* sub) {
    sub->add_option("--tau", tau, "Imaginary time")->capture_default_str();
    sub->add_option("--tau-grid", tau_grid, "Geometric grid MIN,MAX,COUNT; keeps the best cost");
  };

  auto* gen = app.add_subcommand("generate", "Write a seeded random instance");
  gen->add_option("--kind", kind, "qubo, qudo or tqudo")->capture_default_str();
  gen->add_option("--n", n, "Variables")->required();
  gen->add_option("--d", d, "Values per variable")->capture_default_str();
  gen->add_option("--k", k, "Band width")->required();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_flag("--lin", lin, "Draw linear terms (qudo only)");
  gen->add_option("--output", output, "Instance file (stdout if omitted)");

  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("--input", input)->required();
  solve->add_option("--method", method, "dense, matrix, tensor, waterfall or brute")
      ->capture_default_str();
  solve->add_option("--k", k, "Neighbour count for chain methods (default: bandwidth)");
  solve->add_option("--restart-factor", restart_factor, "Waterfall restart tau factor")
      ->capture_default_str();
  solve->add_flag("--no-timing", no_timing, "Report wall_time as 0");
  solve->add_option("--output", output);
  add_tau(solve);

  auto* cmp = app.add_subcommand("compare", "Run several methods and emit CSV records");
  cmp->add_option("--input", input)->required();
  cmp->add_option("--methods", methods)->capture_default_str();
  cmp->add_option("--reference", reference, "brute or best-of")->capture_default_str();
  cmp->add_option("--k", k);
  cmp->add_option("--restart-factor", restart_factor)->capture_default_str();
  cmp->add_option("--output", output);
  add_tau(cmp);

  auto* scale = app.add_subcommand("bench-scaling", "Median run time along one axis");
  scale->add_option("--axis", axis, "n, d or k")->capture_default_str();
  scale->add_option("--range", range, "LO:HI[:STEP] or a comma list")->required();
  scale->add_option("--n", n)->capture_default_str();
  scale->add_option("--d", d)->capture_default_str();
  scale->add_option("--k", k);
  scale->add_option("--kind", kind)->capture_default_str();
  scale->add_option("--methods", methods)->capture_default_str();
  scale->add_option("--repeats", repeats)->capture_default_str();
  scale->add_option("--seed", seed)->capture_default_str();
  scale->add_option("--output", output);
  add_tau(scale);

  auto* wf = app.add_subcommand("waterfall-prob", "Averaged waterfall probability per d");
  wf->add_option("--d-range", d_range)->capture_default_str();
  wf->add_option("--n", n)->capture_default_str();
  wf->add_option("--instances", instances)->capture_default_str();
  wf->add_option("--decoupled", decoupled, "Extra decoupled instances per d")
      ->capture_default_str();
  wf->add_option("--tau-grid", tau_grid, "MIN,MAX,COUNT (default 0.1,500,100)");
  wf->add_option("--seed", seed)->capture_default_str();
  wf->add_option("--output", output);

  // CLI11 reports its own errors; keep the machine-readable form for them too.
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: code=usage message=" << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      if (n < 1) throw UsageError("--n must be >= 1");
      const auto pk = parse_kind(kind);
      if (pk == ProblemKind::qubo && d != 2) throw UsageError("qubo requires --d 2");
      const Problem p = random_instance({pk, n, d, k, seed, lin});
      emit(output, serialize_instance(p));
    } else if (*solve) {
      const Problem p = parse_instance(read_file(input));
      RunOptions opt{make_config(tau, tau_grid), k, restart_factor};
      auto out = run_method(p, parse_method(method), opt);
      if (no_timing) out.wall_time = 0.0;
      emit(output, report(out, opt.cfg));
    } else if (*cmp) {
      const Problem p = parse_instance(read_file(input));
      RunOptions opt{make_config(tau, tau_grid), k, restart_factor};
      std::ostringstream os;
      write_csv(os, compare(p, parse_methods(methods), opt, parse_reference(reference), input));
      emit(output, os.str());
    } else if (*scale) {
      if (axis.size() != 1) throw UsageError("--axis must be n, d or k");
      ScalingParams sp;
      sp.axis = axis[0];
      sp.values = parse_range(range);
      sp.n = n;
      sp.d = d;
      sp.k = k > 0 ? k : 2;
      sp.kind = parse_kind(kind);
      sp.methods = parse_methods(methods);
      sp.repeats = repeats;
      sp.seed = seed;
      sp.cfg = make_config(tau, tau_grid);
      std::ostringstream os;
      write_csv(os, bench_scaling(sp));
      emit(output, os.str());
    } else if (*wf) {
      if (instances < 1) throw UsageError("--instances must be >= 1");
      WaterfallProbParams wp;
      wp.d_values = parse_range(d_range);
      wp.n = n;
      wp.instances = instances;
      wp.decoupled = decoupled;
      wp.seed = seed;
      if (!tau_grid.empty()) wp.cfg.tau_grid = parse_grid(tau_grid);
      std::ostringstream os;
      write_waterfall_csv(os, waterfall_prob(wp));
      emit(output, os.str());
    }
  } catch (const Error& e) {
    std::cerr << "error: code=" << e.code() << " message=" << e.what() << "\n";
    return e.code() == "usage" || e.code() == "invalid-argument" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: code=internal message=" << e.what() << "\n";
    return 1;
  }
  return 0;
}
