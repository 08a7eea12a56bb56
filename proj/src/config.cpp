#include "volterra/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "volterra/error.hpp"

namespace volterra {
namespace {

using nlohmann::json;

// A JSON object together with its dotted path, for error messages.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
  }

  // Restricts keys to `allowed` so that typos surface instead of being ignored.
  void allow(std::initializer_list<std::string_view> allowed) const {
    const std::set<std::string_view> keys(allowed);
    for (const auto& [key, _] : value_.items())
      if (!keys.count(key)) fail(field(key), "unknown field");
  }

  bool has(const std::string& key) const { return value_.contains(key); }

  Node child(const std::string& key) const {
    static const json empty = json::object();
    return has(key) ? Node(value_.at(key), field(key)) : Node(empty, field(key));
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_number()) fail(field(key), "expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    fail(field(key), "expected a non-negative integer");
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_boolean()) fail(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = value_.at(key);
    if (!v.is_array()) fail(field(key), "expected an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

 private:
  const json& value_;
  std::string path_;
};

// Re-raises a ConfigError from a nested validate() with its field path under "model.".
template <class F>
void scoped(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    throw ConfigError(what.rfind("model.", 0) == 0 ? what : "model." + what);
  }
}

KernelSpec parse_kernel(const Node& node, double horizon) {
  node.allow({"family", "H", "a"});
  KernelSpec k;
  k.family = parse_kernel_family(node.text("family", "brownian"));
  k.hurst = node.number("H", 0.5);
  k.mean_reversion = node.number("a", 1.0);
  k.horizon = horizon;
  scoped([&] { k.validate(); });
  return k;
}

SigmaSpec parse_sigma(const Node& node) {
  node.allow({"family", "sigma0", "beta", "delta", "c1", "c2"});
  SigmaSpec s;
  s.family = parse_sigma_family(node.text("family", "constant"));
  s.sigma0 = node.number("sigma0", s.sigma0);
  s.beta = node.number("beta", s.beta);
  s.delta = node.number("delta", s.delta);
  s.c1 = node.number("c1", s.c1);
  s.c2 = node.number("c2", s.c2);
  scoped([&] { s.validate(); });
  return s;
}

ModelSpec parse_model(const Node& node) {
  node.allow({"kernel", "sigma", "rho", "H", "T", "s0"});
  ModelSpec m;
  m.rho = node.number("rho", 0.0);
  m.T = node.number("T", 1.0);
  if (!(m.T > 0.0)) Node::fail("model.T", "must be positive");
  m.kernel = parse_kernel(node.child("kernel"), m.T);
  m.sigma = parse_sigma(node.child("sigma"));
  m.H = node.number("H", m.kernel.self_similarity_index());
  m.s0 = node.number("s0", 1.0);
  scoped([&] { m.validate(); });
  return m;
}

void parse_solver(const Node& node, SolverConfig& s) {
  s.n = node.count("n", s.n);
  if (s.n < 2) Node::fail(node.field("n"), "must be at least 2");
  s.perturbations = node.count("perturbations", s.perturbations);
  s.refine = node.flag("refine", s.refine);
  s.lbfgs.max_iterations = static_cast<int>(node.count("max_iterations", s.lbfgs.max_iterations));
  s.lbfgs.gradient_tol = node.number("gradient_tol", s.lbfgs.gradient_tol);
  if (!(s.lbfgs.gradient_tol > 0.0)) Node::fail(node.field("gradient_tol"), "must be positive");
}

void positive(const Node& node, const std::string& key, std::uint64_t value) {
  if (value == 0) Node::fail(node.field(key), "must be positive");
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set '" + assignment + "': expected path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  if (value.is_structured()) throw ConfigError("--set " + path + ": only scalar fields can be overridden");
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("--set '" + assignment + "': empty path segment");
    if (!node->is_object()) throw ConfigError("--set " + path + ": '" + key + "' is not inside an object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected an object at top level");
  for (const auto& o : overrides) apply_override(root, o);

  const Node top(root, "");
  top.allow({"model", "seed", "threads", "out", "kernel_check", "rate_function", "smile", "mc_verify",
             "smalltime_verify", "simulate", "eigen"});
  RunConfig cfg;
  cfg.model = parse_model(top.child("model"));
  cfg.seed = top.count("seed", 1);
  cfg.threads = static_cast<int>(top.count("threads", 0));
  cfg.out = top.text("out", "out");

  {
    const Node n = top.child("kernel_check");
    n.allow({"grid", "h_grid", "t_samples"});
    cfg.kernel_check.grid = n.count("grid", 20);
    positive(n, "grid", cfg.kernel_check.grid);
    cfg.kernel_check.h_grid = n.numbers("h_grid");
    if (cfg.kernel_check.h_grid.empty()) {
      for (int k = 0; k < 7; ++k)
        cfg.kernel_check.h_grid.push_back(cfg.model.T * std::pow(10.0, -4.0 + 2.0 * k / 6.0));
    }
    cfg.kernel_check.t_samples = static_cast<int>(n.count("t_samples", 11));
    positive(n, "t_samples", static_cast<std::uint64_t>(cfg.kernel_check.t_samples));
  }
  {
    const Node n = top.child("rate_function");
    n.allow({"x", "n", "perturbations", "refine", "max_iterations", "gradient_tol"});
    cfg.rate_function.x = n.numbers("x");
    parse_solver(n, cfg.rate_function.solver);
  }
  {
    const Node n = top.child("smile");
    n.allow({"y", "regime", "n", "perturbations", "refine", "max_iterations", "gradient_tol", "mc_scale",
             "mc_paths", "n_steps"});
    cfg.smile.y = n.numbers("y");
    cfg.smile.regime = parse_regime(n.text("regime", "small_noise"));
    parse_solver(n, cfg.smile.solver);
    cfg.smile.mc_scale = n.number("mc_scale", 0.0);
    if (!(cfg.smile.mc_scale >= 0.0 && cfg.smile.mc_scale <= 1.0)) Node::fail("smile.mc_scale", "must lie in [0, 1]");
    cfg.smile.mc_paths = n.count("mc_paths", cfg.smile.mc_paths);
    cfg.smile.n_steps = n.count("n_steps", cfg.smile.n_steps);
    positive(n, "n_steps", cfg.smile.n_steps);
  }
  {
    const Node n = top.child("mc_verify");
    n.allow({"y", "eps", "paths", "n_steps", "doubling_check", "include_drift", "theory", "n", "perturbations", "refine",
             "max_iterations", "gradient_tol"});
    auto& m = cfg.mc_verify;
    m.y = n.number("y", m.y);
    m.eps = n.numbers("eps");
    m.paths = n.count("paths", m.paths);
    positive(n, "paths", m.paths);
    m.n_steps = n.count("n_steps", m.n_steps);
    positive(n, "n_steps", m.n_steps);
    m.doubling_check = n.flag("doubling_check", m.doubling_check);
    m.include_drift = n.flag("include_drift", m.include_drift);
    m.theory = n.flag("theory", m.theory);
    parse_solver(n, m.solver);
  }
  {
    const Node n = top.child("smalltime_verify");
    n.allow({"y", "t", "paths", "n_steps", "theory", "n", "perturbations", "refine", "max_iterations",
             "gradient_tol"});
    auto& s = cfg.smalltime_verify;
    s.y = n.number("y", s.y);
    s.t = n.numbers("t");
    s.paths = n.count("paths", s.paths);
    positive(n, "paths", s.paths);
    s.n_steps = n.count("n_steps", s.n_steps);
    positive(n, "n_steps", s.n_steps);
    s.theory = n.flag("theory", s.theory);
    parse_solver(n, s.solver);
  }
  {
    const Node n = top.child("simulate");
    n.allow({"paths", "n_steps"});
    cfg.simulate.paths = n.count("paths", cfg.simulate.paths);
    positive(n, "paths", cfg.simulate.paths);
    cfg.simulate.n_steps = n.count("n_steps", cfg.simulate.n_steps);
    positive(n, "n_steps", cfg.simulate.n_steps);
  }
  {
    const Node n = top.child("eigen");
    n.allow({"n", "count", "a", "eps_fraction", "mc_paths", "mc_steps"});
    auto& e = cfg.eigen;
    e.n = n.count("n", e.n);
    positive(n, "n", e.n);
    e.count = n.count("count", e.count);
    positive(n, "count", e.count);
    e.a = n.number("a", e.a);
    if (!(e.a > 0.0)) Node::fail("eigen.a", "must be positive");
    e.eps_fraction = n.number("eps_fraction", e.eps_fraction);
    if (!(e.eps_fraction > 0.0 && e.eps_fraction < 1.0)) Node::fail("eigen.eps_fraction", "must lie in (0, 1)");
    e.mc_paths = n.count("mc_paths", e.mc_paths);
    e.mc_steps = n.count("mc_steps", e.mc_steps);
    positive(n, "mc_steps", e.mc_steps);
  }
  for (SolverConfig* s : {&cfg.rate_function.solver, &cfg.smile.solver, &cfg.mc_verify.solver,
                          &cfg.smalltime_verify.solver}) {
    s->seed = cfg.seed;
    s->threads = cfg.threads;
  }
  cfg.canonical = root.dump();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

}  // namespace volterra
