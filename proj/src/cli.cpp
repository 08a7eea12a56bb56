#include "volterra/cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "volterra/asymptotics.hpp"
#include "volterra/error.hpp"
#include "volterra/gaussian_engine.hpp"
#include "volterra/kernels.hpp"
#include "volterra/mc_harness.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rate_solver.hpp"
#include "volterra/simd.hpp"

namespace volterra::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, bool>) return v ? "1" : "0";
    else if constexpr (std::is_integral_v<T>) return std::to_string(v);
    else if constexpr (std::is_floating_point_v<T>) return num(v);
    else return std::string(v);
  }

  fs::path path_;
  std::ofstream out_;
};

struct Run {
  Run(const RunConfig& c, std::ostream& l) : cfg(c), log(l), dir(c.out) {}

  const RunConfig& cfg;
  std::ostream& log;
  fs::path dir;
  json summary = json::object();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;

  Csv csv(const std::string& name, const std::string& header) {
    outputs.push_back(name);
    return Csv(dir / name, header);
  }
};

double closed_form_covariance(const KernelSpec& k, double t, double s) {
  switch (k.family) {
    case KernelFamily::brownian: return std::min(t, s);
    case KernelFamily::fbm: {
      const double h2 = 2.0 * k.hurst;
      return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
    }
    case KernelFamily::ornstein_uhlenbeck: {
      const double a = k.mean_reversion;
      const double lo = std::min(t, s);
      return std::exp(-a * (t + s)) * std::expm1(2.0 * a * lo) / (2.0 * a);
    }
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

void kernel_check(Run& run) {
  const auto& cfg = run.cfg;
  const Kernel kernel = cfg.model.make_kernel();
  const auto& kc = cfg.kernel_check;
  const double T = cfg.model.T;
  std::vector<double> times(kc.grid);
  for (std::size_t i = 0; i < kc.grid; ++i) times[i] = T * static_cast<double>(i + 1) / static_cast<double>(kc.grid);
  const CovarianceGrid grid = covariance_grid(kernel, times);
  double max_rel = std::numeric_limits<double>::quiet_NaN();
  if (!std::isnan(closed_form_covariance(cfg.model.kernel, T, T))) {
    max_rel = 0.0;
    for (std::size_t i = 0; i < kc.grid; ++i)
      for (std::size_t j = 0; j < kc.grid; ++j) {
        const double exact = closed_form_covariance(cfg.model.kernel, times[i], times[j]);
        max_rel = std::max(max_rel, std::abs(grid.matrix(i, j) - exact) / std::abs(exact));
      }
  }
  const double alpha = 2.0 * cfg.model.kernel.self_similarity_index();
  auto modulus = run.csv("modulus.csv", "h,modulus,h_pow_alpha");
  for (double h : kc.h_grid) modulus.row(h, modulus_l2(kernel, h, kc.t_samples), std::pow(h, alpha));
  const double slope = holder_slope(kernel, kc.h_grid, kc.t_samples);
  const double defect = self_similarity_defect(kernel, 0.5, 8);
  auto out = run.csv("kernel_check.csv", "quantity,value");
  out.row("covariance_max_rel_error", max_rel);
  out.row("holder_slope", slope);
  out.row("expected_slope", alpha);
  out.row("self_similarity_defect", defect);
  out.row("diagonal_exponent", kernel.diagonal_exponent());
  out.row("origin_exponent", kernel.origin_exponent());
  run.summary["covariance_max_rel_error"] = max_rel;
  run.summary["holder_slope"] = slope;
  run.summary["self_similarity_defect"] = defect;
  run.log << "covariance max rel error " << num(max_rel) << "\nholder slope " << num(slope) << " (expected "
          << num(alpha) << ")\nself-similarity defect " << num(defect) << '\n';
}

void rate_function_cmd(Run& run) {
  const auto& cfg = run.cfg;
  const auto& rc = cfg.rate_function;
  if (rc.x.empty()) throw ConfigError("rate_function.x: must be a non-empty array");
  const Kernel kernel = cfg.model.make_kernel();
  const RateProblem problem(kernel, cfg.model.sigma, cfg.model.rho, rc.solver.n, cfg.threads);
  std::unique_ptr<RateProblem> fine;
  if (rc.solver.refine) fine = std::make_unique<RateProblem>(kernel, cfg.model.sigma, cfg.model.rho, 2 * rc.solver.n, cfg.threads);
  auto out = run.csv("rate_function.csv", "x,I,converged,starts,n,value_at_2n");
  for (double x : rc.x) {
    const RateResult r = problem.solve(x, rc.solver);
    double at_2n = std::numeric_limits<double>::quiet_NaN();
    if (fine) at_2n = fine->solve(x, rc.solver).value;
    out.row(x, r.value, r.converged, r.starts_tried, rc.solver.n, at_2n);
    if (!r.converged) run.warnings.push_back("rate at x = " + num(x) + " did not converge");
    run.log << "I(" << num(x) << ") = " << num(r.value) << (r.converged ? "" : " (not converged)") << '\n';
  }
}

void smile_cmd(Run& run) {
  const auto& cfg = run.cfg;
  const auto& sc = cfg.smile;
  if (sc.y.empty()) throw ConfigError("smile.y: must be a non-empty array");
  const SmileTable table = smile(cfg.model, sc.y, sc.regime, sc.solver);
  if (table.growth_warning) run.warnings.push_back("sigma violates linear growth; call asymptotes are formal");
  auto out = run.csv("smile.csv", "y,I,I_hat,binary,ivol_limit,flag");
  for (const auto& r : table.rows) {
    out.row(r.y, r.I, r.I_hat, r.binary, r.ivol_limit, r.flag);
    run.log << "y " << num(r.y) << " ivol_limit " << num(r.ivol_limit) << ' ' << r.flag << '\n';
  }
  if (sc.mc_scale > 0.0) {
    auto mc = run.csv("smile_mc.csv", "y,scale,strike,maturity,price,se,mc_ivol,ivol_limit");
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      const auto& r = table.rows[k];
      if (r.flag != "call" && r.flag != "put") continue;
      const McImpliedVol v = mc_implied_vol(cfg.model, r.y, sc.regime, sc.mc_scale, sc.mc_paths, cfg.seed + k,
                                            sc.n_steps, cfg.threads);
      mc.row(r.y, sc.mc_scale, v.strike, v.maturity, v.price, v.standard_error, v.implied_vol, r.ivol_limit);
    }
  }
  run.summary["regime"] = std::string(to_string(sc.regime));
}

void mc_verify(Run& run) {
  const auto& cfg = run.cfg;
  const auto& mc = cfg.mc_verify;
  if (mc.eps.empty()) throw ConfigError("mc_verify.eps: must be a non-empty array");
  double theory = std::numeric_limits<double>::quiet_NaN();
  if (mc.theory) theory = rate_function(cfg.model.make_kernel(), cfg.model.sigma, cfg.model.rho, mc.y, mc.solver).value;
  const LdpEstimate est = ldp_slope(cfg.model, mc.y, mc.eps, mc.paths, cfg.seed, mc.include_drift, mc.n_steps,
                                    cfg.threads, theory);
  auto out = run.csv("mc_verify.csv", "eps,prob,se,scaled_log,theory_I,slope");
  for (std::size_t k = 0; k < est.eps_grid.size(); ++k)
    out.row(est.eps_grid[k], est.probabilities[k], est.standard_errors[k], est.scaled_logs[k], theory,
            est.slope_estimate);
  for (std::size_t k = 0; k < est.eps_grid.size(); ++k)
    if (!est.usable[k]) run.warnings.push_back("eps " + num(est.eps_grid[k]) + " has fewer than 50 hits");
  run.summary["slope"] = est.slope_estimate;
  run.summary["theory"] = theory;
  run.summary["runs_pvalue"] = est.runs_pvalue;
  run.log << "slope " << num(est.slope_estimate) << " theory " << num(theory) << '\n';
  if (mc.doubling_check) {
    const LdpEstimate fine = ldp_slope(cfg.model, mc.y, mc.eps, mc.paths, cfg.seed, mc.include_drift,
                                       2 * mc.n_steps, cfg.threads, theory);
    run.summary["slope_at_2n"] = fine.slope_estimate;
    run.log << "slope on " << 2 * mc.n_steps << " steps " << num(fine.slope_estimate) << '\n';
  }
}

void smalltime_verify(Run& run) {
  const auto& cfg = run.cfg;
  const auto& st = cfg.smalltime_verify;
  const double defect = check_self_similarity_gate(cfg.model);
  if (st.t.empty()) throw ConfigError("smalltime_verify.t: must be a non-empty array");
  double theory = std::numeric_limits<double>::quiet_NaN();
  if (st.theory)
    theory = rate_function_hat(cfg.model.make_kernel(), cfg.model.sigma, cfg.model.rho, cfg.model.H, st.y, st.solver)
                 .value;
  const LdpEstimate est =
      smalltime_check(cfg.model, st.y, st.t, st.paths, cfg.seed, st.n_steps, cfg.threads, theory);
  auto out = run.csv("smalltime_verify.csv", "eps,prob,se,scaled_log,theory_I,slope");
  for (std::size_t k = 0; k < est.eps_grid.size(); ++k)
    out.row(est.eps_grid[k], est.probabilities[k], est.standard_errors[k], est.scaled_logs[k], theory,
            est.slope_estimate);
  for (std::size_t k = 0; k < est.eps_grid.size(); ++k)
    if (!est.usable[k]) run.warnings.push_back("t " + num(est.eps_grid[k]) + " has fewer than 50 hits");
  run.summary["slope"] = est.slope_estimate;
  run.summary["theory"] = theory;
  run.summary["runs_pvalue"] = est.runs_pvalue;
  run.summary["ks_statistic"] = est.ks_statistic;
  run.summary["ks_pvalue"] = est.ks_pvalue;
  run.summary["self_similarity_defect"] = defect;
  run.log << "slope " << num(est.slope_estimate) << " theory " << num(theory) << " ks p " << num(est.ks_pvalue)
          << '\n';
}

void simulate_cmd(Run& run) {
  const auto& cfg = run.cfg;
  const Kernel kernel = cfg.model.make_kernel();
  const PathGrid grid = PathGrid::uniform(cfg.model.T, cfg.simulate.n_steps);
  const JointPathBatch batch = sample_paths(kernel, grid, cfg.simulate.paths, cfg.seed, cfg.threads);
  auto out = run.csv("paths.csv", "path,t,W,B,Bhat");
  for (std::size_t p = 0; p < cfg.simulate.paths; ++p) {
    double w = 0.0, b = 0.0;
    out.row(p, 0.0, 0.0, 0.0, 0.0);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const auto r = static_cast<Eigen::Index>(p);
      const auto c = static_cast<Eigen::Index>(i);
      w += batch.w_increments(r, c);
      b += batch.b_increments(r, c);
      out.row(p, grid.times[i + 1], w, b, batch.bhat_values(r, c));
    }
  }
  run.log << "wrote " << cfg.simulate.paths << " paths on " << grid.n << " steps\n";
}

void eigen_cmd(Run& run) {
  const auto& cfg = run.cfg;
  const auto& ec = cfg.eigen;
  const Kernel kernel = cfg.model.make_kernel();
  const KLSpectrum spec = kl_spectrum(kernel, PathGrid::uniform(cfg.model.T, ec.n), ec.count, cfg.threads);
  auto out = run.csv("eigen.csv", "k,lambda");
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) out.row(k + 1, spec.eigenvalues[k]);
  const double threshold = moment_threshold(spec, ec.a);
  const double eps = ec.eps_fraction * threshold;
  const MomentBound bound = moment_bound(spec, ec.a, eps);
  double mc = std::numeric_limits<double>::quiet_NaN(), se = mc;
  if (ec.mc_paths > 0) {
    const MomentEstimate m =
        exponential_moment_mc(kernel, PathGrid::uniform(cfg.model.T, ec.mc_steps), ec.a, eps, ec.mc_paths, cfg.seed,
                              cfg.threads);
    mc = m.mean;
    se = m.standard_error;
  }
  auto mb = run.csv("moment_bound.csv", "a,eps,threshold,bound,sum_lambda,mc_estimate,mc_se");
  mb.row(ec.a, eps, threshold, bound.bound, spec.total, mc, se);
  run.summary["lambda_1"] = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
  run.summary["threshold"] = threshold;
  run.summary["bound"] = bound.bound;
  run.log << "lambda_1 " << num(run.summary["lambda_1"].get<double>()) << " threshold " << num(threshold)
          << " bound " << num(bound.bound) << '\n';
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

void run_command(std::string_view command, const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Run run(config, log);
  std::error_code ec;
  fs::create_directories(run.dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + config.out + "': " + ec.message());
  if (config.model.growth_warning())
    run.warnings.push_back("sigma violates the linear growth condition; prices lack the martingale guarantee");

  if (command == "kernel-check") kernel_check(run);
  else if (command == "rate-function") rate_function_cmd(run);
  else if (command == "smile") smile_cmd(run);
  else if (command == "mc-verify") mc_verify(run);
  else if (command == "smalltime-verify") smalltime_verify(run);
  else if (command == "simulate") simulate_cmd(run);
  else if (command == "eigen") eigen_cmd(run);
  else throw ConfigError("unknown command '" + std::string(command) + "'");

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest;
  manifest["command"] = std::string(command);
  manifest["version"] = std::string(kVersion);
  manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a(config.canonical));
  manifest["seed"] = config.seed;
  manifest["threads"] = resolve_threads(config.threads);
  manifest["simd"] = std::string(simd::active().name);
  manifest["wall_time_s"] = wall;
  manifest["outputs"] = run.outputs;
  manifest["warnings"] = run.warnings;
  manifest["summary"] = run.summary;
  std::ofstream out(run.dir / "run.manifest");
  out << manifest.dump(2) << '\n';
  for (const auto& w : run.warnings) log << "warning: " << w << '\n';
}

int main(int argc, char** argv) {
  CLI::App app{"Volterra stochastic volatility large deviations toolkit", "vldp"};
  app.require_subcommand(1);
  std::string config_path;
  int threads = -1;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = all cores)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", overrides, "override a scalar field, e.g. model.rho=0.5");
  app.set_version_flag("--version", std::string(kVersion));
  app.fallthrough();
  for (auto name : kCommands) app.add_subcommand(std::string(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[config]: " << e.what() << '\n';
    return exit_code(ErrorKind::config);
  }

  try {
    if (*seed_opt) overrides.push_back("seed=" + std::to_string(seed));
    if (*out_opt) overrides.push_back("out=" + json(out_dir).dump());
    RunConfig cfg = load_config(config_path, overrides);
    if (*threads_opt) {
      if (threads < 0) throw ConfigError("--threads must be non-negative");
      cfg.threads = threads;
      for (SolverConfig* s : {&cfg.rate_function.solver, &cfg.smile.solver, &cfg.mc_verify.solver,
                              &cfg.smalltime_verify.solver})
        s->threads = threads;
    }
    run_command(app.get_subcommands().front()->get_name(), cfg, std::cout);
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error[" << to_string(e.kind()) << "]: " << msg << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace volterra::cli
