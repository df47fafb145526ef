#include "tnqudo/problem.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "json.hpp"
#include "tnqudo/error.hpp"

namespace tnqudo {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::qubo:
      return "qubo";
    case ProblemKind::qudo:
      return "qudo";
    case ProblemKind::tqudo:
      return "tqudo";
  }
  return "?";
}

ProblemKind parse_kind(std::string_view text) {
  if (text == "qubo") return ProblemKind::qubo;
  if (text == "qudo") return ProblemKind::qudo;
  if (text == "tqudo") return ProblemKind::tqudo;
  throw InvalidArgument("unknown problem kind '" + std::string(text) + "'");
}

Problem::Problem(ProblemKind kind, int n, int d) : kind_(kind), n_(n), d_(d) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (d < 2) throw InvalidArgument("d must be >= 2");
  if (kind == ProblemKind::qubo && d != 2)
    throw InvalidArgument("qubo requires d = 2");
}

void Problem::check_var(int i, const char* what) const {
  if (i < 0 || i >= n_)
    throw InvalidArgument(std::string(what) + " index " + std::to_string(i) +
                          " outside [0, " + std::to_string(n_) + ")");
}

void Problem::check_value(int a, const char* what) const {
  if (a < 0 || a >= d_)
    throw InvalidArgument(std::string(what) + " value " + std::to_string(a) +
                          " outside [0, " + std::to_string(d_) + ")");
}

void Problem::set_quad(int i, int j, double value) {
  if (kind_ == ProblemKind::tqudo)
    throw InvalidArgument("tqudo problems store qhat, not q");
  check_var(i, "q");
  check_var(j, "q");
  if (i > j)
    throw InvalidArgument("q entry (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") has i > j");
  if (value == 0.0)
    quad_.erase({i, j});
  else
    quad_[{i, j}] = value;
}

void Problem::set_lin(int i, double value) {
  if (kind_ != ProblemKind::qudo)
    throw InvalidArgument("linear terms are only stored for qudo problems");
  check_var(i, "lin");
  if (value == 0.0)
    lin_.erase(i);
  else
    lin_[i] = value;
}

void Problem::set_qhat(int i, int j, int a, int b, double value) {
  if (kind_ != ProblemKind::tqudo)
    throw InvalidArgument("qhat entries require a tqudo problem");
  check_var(i, "qhat");
  check_var(j, "qhat");
  check_value(a, "qhat");
  check_value(b, "qhat");
  if (i > j)
    throw InvalidArgument("qhat entry (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") has i > j");
  if (i == j && a != b)
    throw InvalidArgument("diagonal qhat entry (" + std::to_string(i) +
                          ", " + std::to_string(i) +
                          ") must have a == b; other entries are never selected");
  TensorKey key{i, j, a, b};
  if (value == 0.0)
    qhat_.erase(key);
  else
    qhat_[key] = value;
}

double Problem::quad(int i, int j) const {
  auto it = quad_.find({i, j});
  return it == quad_.end() ? 0.0 : it->second;
}

double Problem::lin(int i) const {
  auto it = lin_.find(i);
  return it == lin_.end() ? 0.0 : it->second;
}

double Problem::qhat(int i, int j, int a, int b) const {
  auto it = qhat_.find({i, j, a, b});
  return it == qhat_.end() ? 0.0 : it->second;
}

int Problem::bandwidth() const noexcept {
  int k = 0;
  for (const auto& [key, v] : quad_) k = std::max(k, key.second - key.first);
  for (const auto& [key, v] : qhat_) k = std::max(k, key[1] - key[0]);
  return k;
}

std::optional<Problem::PairKey> Problem::first_pair_beyond(int k) const {
  std::optional<PairKey> found;
  auto consider = [&](int i, int j) {
    if (j - i > k && (!found || PairKey{i, j} < *found)) found = PairKey{i, j};
  };
  for (const auto& [key, v] : quad_) consider(key.first, key.second);
  for (const auto& [key, v] : qhat_) consider(key[0], key[1]);
  return found;
}

double Problem::self_cost(int l, int a) const {
  if (kind_ == ProblemKind::tqudo) return qhat(l, l, a, a);
  return quad(l, l) * a * a + lin(l) * a;
}

double Problem::pair_cost(int l, int m, int a, int b) const {
  if (kind_ == ProblemKind::tqudo) return qhat(l, m, a, b);
  return quad(l, m) * a * b;
}

void validate_assignment(const Problem& p, std::span<const int> x) {
  if (static_cast<int>(x.size()) != p.n())
    throw InvalidAssignment("assignment has " + std::to_string(x.size()) +
                            " entries, problem has n = " +
                            std::to_string(p.n()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0 || x[i] >= p.d())
      throw InvalidAssignment("x[" + std::to_string(i) + "] = " +
                              std::to_string(x[i]) + " outside [0, " +
                              std::to_string(p.d()) + ")");
}

double evaluate_cost(const Problem& p, std::span<const int> x) {
  validate_assignment(p, x);
  double cost = 0.0;
  if (p.kind() == ProblemKind::tqudo) {
    for (const auto& [key, v] : p.qhat_terms())
      if (x[key[0]] == key[2] && x[key[1]] == key[3]) cost += v;
    return cost;
  }
  for (const auto& [key, v] : p.quad_terms())
    cost += v * x[key.first] * x[key.second];
  for (const auto& [i, v] : p.lin_terms()) cost += v * x[i];
  return cost;
}

Problem to_tqudo(const Problem& p) {
  if (p.kind() == ProblemKind::tqudo) return p;
  Problem out(ProblemKind::tqudo, p.n(), p.d());
  std::set<int> diag;
  for (const auto& [key, v] : p.quad_terms())
    if (key.first == key.second) diag.insert(key.first);
  for (const auto& [i, v] : p.lin_terms()) diag.insert(i);
  for (int i : diag)
    for (int a = 0; a < p.d(); ++a) out.set_qhat(i, i, a, a, p.self_cost(i, a));
  for (const auto& [key, v] : p.quad_terms()) {
    if (key.first == key.second) continue;
    for (int a = 0; a < p.d(); ++a)
      for (int b = 0; b < p.d(); ++b)
        out.set_qhat(key.first, key.second, a, b,
                     p.pair_cost(key.first, key.second, a, b));
  }
  return out;
}

Problem qubo_as_qudo(const Problem& p) {
  if (p.kind() != ProblemKind::qubo)
    throw InvalidArgument("qubo_as_qudo expects a qubo problem");
  Problem out(ProblemKind::qudo, p.n(), p.d());
  for (const auto& [key, v] : p.quad_terms()) out.set_quad(key.first, key.second, v);
  return out;
}

// ---------------------------------------------------------------------------
// Chain view

ChainProblem::ChainProblem(ProblemKind kind, int n, int d, int k)
    : kind_(kind),
      n_(n),
      d_(d),
      k_(k),
      self_(static_cast<std::size_t>(n) * d, 0.0),
      pair_(static_cast<std::size_t>(n) * k * d * d, 0.0) {}

ChainProblem chain_view(const Problem& p, int k) {
  if (k < 1) throw InvalidArgument("chain_view requires k >= 1");
  if (auto bad = p.first_pair_beyond(k)) throw NotAChain(bad->first, bad->second, k);
  ChainProblem c(p.kind(), p.n(), p.d(), k);
  const int d = p.d();
  for (int m = 0; m < p.n(); ++m) {
    for (int a = 0; a < d; ++a)
      c.self_[static_cast<std::size_t>(m) * d + a] = p.self_cost(m, a);
    for (int j = 1; j <= c.lower_neighbors(m); ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          c.pair_[((static_cast<std::size_t>(m) * k + (j - 1)) * d + a) * d + b] =
              p.pair_cost(m - j, m, a, b);
  }
  return c;
}

ChainProblem ChainProblem::prefix_with_known_suffix(
    int m, std::span<const int> suffix) const {
  if (m < 1 || m > n_) throw InvalidArgument("prefix length out of range");
  ChainProblem out(kind_, m, d_, k_);
  std::copy_n(self_.begin(), static_cast<std::size_t>(m) * d_, out.self_.begin());
  std::copy_n(pair_.begin(), static_cast<std::size_t>(m) * k_ * d_ * d_,
              out.pair_.begin());
  // Couplings (l, r) with l < m <= r turn into self costs on x_l.
  for (int r = m; r < n_ && r - m < static_cast<int>(suffix.size()); ++r) {
    const int b = suffix[r - m];
    for (int j = 1; j <= lower_neighbors(r); ++j) {
      const int l = r - j;
      if (l >= m) continue;
      for (int a = 0; a < d_; ++a)
        out.self_[static_cast<std::size_t>(l) * d_ + a] += pair_cost(r, j, a, b);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

namespace {

// Uniform on [-1, 1] from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

Problem random_instance(const RandomInstanceSpec& spec) {
  if (spec.n < 1) throw InvalidArgument("n must be >= 1");
  if (spec.d < 2) throw InvalidArgument("d must be >= 2");
  if (spec.k < 1 || spec.k >= spec.n)
    throw InvalidArgument("k must satisfy 1 <= k < n");
  if (spec.kind == ProblemKind::qubo && spec.d != 2)
    throw InvalidArgument("qubo requires d = 2");
  if (spec.lin_enabled && spec.kind != ProblemKind::qudo)
    throw InvalidArgument("linear terms are only generated for qudo");

  Problem p(spec.kind, spec.n, spec.d);
  std::mt19937_64 rng(spec.seed);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j <= spec.k && i + j < spec.n; ++j) {
      if (spec.kind == ProblemKind::tqudo) {
        for (int a = 0; a < spec.d; ++a)
          for (int b = 0; b < spec.d; ++b) {
            if (j == 0 && a != b) continue;
            p.set_qhat(i, i + j, a, b, uniform_pm1(rng));
          }
      } else {
        p.set_quad(i, i + j, uniform_pm1(rng));
      }
    }
  }
  if (spec.lin_enabled)
    for (int i = 0; i < spec.n; ++i) p.set_lin(i, uniform_pm1(rng));
  return p;
}

// ---------------------------------------------------------------------------
// Instance files

namespace {

using nlohmann::json;

int as_index(const json& v, const char* field) {
  if (!v.is_number_integer())
    throw InstanceError(std::string(field) + ": index must be an integer");
  return v.get<int>();
}

double as_value(const json& v, const char* field) {
  if (!v.is_number())
    throw InstanceError(std::string(field) + ": coefficient must be a number");
  return v.get<double>();
}

const json& entry_list(const json& doc, const char* field) {
  const json& list = doc.at(field);
  if (!list.is_array()) throw InstanceError(std::string(field) + " must be a list");
  return list;
}

void check_arity(const json& e, std::size_t arity, const char* field) {
  if (!e.is_array() || e.size() != arity)
    throw InstanceError(std::string(field) + " entries must have " +
                        std::to_string(arity) + " elements");
}

}  // namespace

Problem parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw InstanceError("document must be a JSON object");
  for (const char* f : {"kind", "n", "d"})
    if (!doc.contains(f)) throw InstanceError(std::string("missing field '") + f + "'");
  if (!doc["kind"].is_string()) throw InstanceError("kind must be a string");

  try {
    const ProblemKind kind = parse_kind(doc["kind"].get<std::string>());
    Problem p(kind, as_index(doc["n"], "n"), as_index(doc["d"], "d"));

    if (doc.contains("q")) {
      if (kind == ProblemKind::tqudo) throw InstanceError("tqudo documents use qhat, not q");
      std::set<std::pair<int, int>> seen;
      for (const json& e : entry_list(doc, "q")) {
        check_arity(e, 3, "q");
        const int i = as_index(e[0], "q"), j = as_index(e[1], "q");
        if (!seen.insert({i, j}).second)
          throw InstanceError("duplicate q entry (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
        p.set_quad(i, j, as_value(e[2], "q"));
      }
    }
    if (doc.contains("lin")) {
      if (kind != ProblemKind::qudo && !doc["lin"].empty())
        throw InstanceError("lin is only allowed for qudo");
      std::set<int> seen;
      for (const json& e : entry_list(doc, "lin")) {
        check_arity(e, 2, "lin");
        const int i = as_index(e[0], "lin");
        if (!seen.insert(i).second)
          throw InstanceError("duplicate lin entry " + std::to_string(i));
        p.set_lin(i, as_value(e[1], "lin"));
      }
    }
    if (doc.contains("qhat")) {
      if (kind != ProblemKind::tqudo && !doc["qhat"].empty())
        throw InstanceError("qhat is only allowed for tqudo");
      std::set<Problem::TensorKey> seen;
      for (const json& e : entry_list(doc, "qhat")) {
        check_arity(e, 5, "qhat");
        Problem::TensorKey key{as_index(e[0], "qhat"), as_index(e[1], "qhat"),
                               as_index(e[2], "qhat"), as_index(e[3], "qhat")};
        if (!seen.insert(key).second)
          throw InstanceError("duplicate qhat entry (" + std::to_string(key[0]) +
                              ", " + std::to_string(key[1]) + ", " +
                              std::to_string(key[2]) + ", " +
                              std::to_string(key[3]) + ")");
        p.set_qhat(key[0], key[1], key[2], key[3], as_value(e[4], "qhat"));
      }
    }
    return p;
  } catch (const InvalidArgument& e) {
    throw InstanceError(e.what());
  } catch (const json::exception& e) {
    throw InstanceError(std::string("malformed document: ") + e.what());
  }
}

std::string serialize_instance(const Problem& p) {
  nlohmann::ordered_json doc;
  doc["kind"] = std::string(to_string(p.kind()));
  doc["n"] = p.n();
  doc["d"] = p.d();
  if (p.kind() == ProblemKind::tqudo) {
    auto qhat = nlohmann::ordered_json::array();
    for (const auto& [key, v] : p.qhat_terms())
      qhat.push_back({key[0], key[1], key[2], key[3], v});
    doc["qhat"] = std::move(qhat);
  } else {
    auto q = nlohmann::ordered_json::array();
    for (const auto& [key, v] : p.quad_terms()) q.push_back({key.first, key.second, v});
    doc["q"] = std::move(q);
    if (p.kind() == ProblemKind::qudo) {
      auto lin = nlohmann::ordered_json::array();
      for (const auto& [i, v] : p.lin_terms()) lin.push_back({i, v});
      doc["lin"] = std::move(lin);
    }
  }
  return doc.dump() + "\n";
}

}  // namespace tnqudo
