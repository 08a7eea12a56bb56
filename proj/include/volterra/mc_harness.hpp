#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "volterra/gaussian_engine.hpp"
#include "volterra/kernels.hpp"
#include "volterra/sigma.hpp"

namespace volterra {

/// Full model: dS = sqrt(eps) S sigma(eps^H Bhat) d(rho_bar W + rho B).
struct ModelSpec {
  KernelSpec kernel;
  SigmaSpec sigma;
  double rho = 0.0;
  double H = 0.5;  ///< scaling exponent
  double T = 1.0;  ///< horizon; the kernel is built on [0, T]
  double s0 = 1.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  /// sigma fails the linear growth condition; call prices lack the martingale guarantee.
  bool growth_warning() const noexcept { return !sigma.linear_growth(); }
  Kernel make_kernel() const;
};

/// Per-path terms of the left-point Euler scheme for the log-price.
struct LogPriceSamples {
  std::vector<double> driftless;  ///< X-hat - x0
  std::vector<double> drift;      ///< (1/2) eps sum sigma^2 dt, so X - x0 = driftless - drift
};

/// Simulator for one model on one grid; the Cholesky factor is built once.
class LogPriceSimulator {
 public:
  LogPriceSimulator(const ModelSpec& model, const Kernel& kernel, PathGrid grid, int threads = 1);

  const PathGrid& grid() const noexcept { return sampler_.grid(); }
  const ModelSpec& model() const noexcept { return model_; }

  /// Euler terms for each eps in `eps` from one shared block of paths.
  void evaluate(const PathBlock& block, const std::vector<double>& eps, std::vector<LogPriceSamples>& out) const;
  void sample(std::uint64_t seed, std::uint64_t first_path, std::size_t count, PathBlock& block) const {
    sampler_.sample(seed, first_path, count, block);
  }

 private:
  ModelSpec model_;
  PathSampler sampler_;
};

/// Samples of X_T^{eps,H}, x0 = log s0 included.
std::vector<double> simulate_scaled_logprice(const ModelSpec& model, double eps, const PathGrid& grid,
                                             std::size_t paths, std::uint64_t seed, bool include_drift,
                                             int threads = 1);

/// Both schemes on shared noise, for the pathwise drift identity.
LogPriceSamples simulate_logprice_terms(const ModelSpec& model, double eps, const PathGrid& grid,
                                        std::size_t paths, std::uint64_t seed, int threads = 1);

struct LdpEstimate {
  std::vector<double> eps_grid;
  std::vector<std::uint64_t> hits;
  std::vector<double> probabilities;
  std::vector<double> standard_errors;
  std::vector<double> scaled_logs;  ///< eps^{2H} log P (NaN without hits)
  std::vector<bool> usable;         ///< at least kMinHits hits
  double slope_estimate = 0.0;      ///< OLS slope of log P on -eps^{-2H}
  double intercept = 0.0;
  double runs_pvalue = 1.0;         ///< residual sign runs test
  std::optional<double> theory;
  std::size_t paths = 0;
  bool include_drift = true;
  // Filled by smalltime_check only.
  double ks_statistic = 0.0;
  double ks_pvalue = 1.0;
  double self_similarity_defect = 0.0;
};

inline constexpr std::uint64_t kMinHits = 50;

/// Frequency estimate of P(eps^{H-1/2}(X_T^{eps,H} - x0) in A) with A the ray beyond y,
/// common random numbers across eps, and the slope regression.
LdpEstimate ldp_slope(const ModelSpec& model, double y, const std::vector<double>& eps_grid, std::size_t paths,
                      std::uint64_t seed, bool include_drift, std::size_t n_steps, int threads = 1,
                      std::optional<double> theory = std::nullopt);

/// Unscaled model at maturities t: regression of log P(t^{H-1/2}(X_t - x0) in A) on -t^{-2H},
/// plus a two-sample KS test of X_T^{eps,H} against X_{eps T}. Throws GateError
/// when the kernel is not self-similar at index H.
LdpEstimate smalltime_check(const ModelSpec& model, double y, const std::vector<double>& t_grid,
                            std::size_t paths, std::uint64_t seed, std::size_t n_steps, int threads = 1,
                            std::optional<double> theory = std::nullopt);

/// Enforces the small-time preconditions; returns the measured defect.
double check_self_similarity_gate(const ModelSpec& model);

struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo E exp(a eps int_0^T Bhat^2 dt), trapezoid rule on the grid.
MomentEstimate exponential_moment_mc(const Kernel& kernel, const PathGrid& grid, double a, double eps,
                                     std::size_t paths, std::uint64_t seed, int threads = 1);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};
Regression ols(const std::vector<double>& x, const std::vector<double>& y);
/// Two-sided Wald-Wolfowitz runs test on residual signs (normal approximation).
double runs_test_pvalue(const std::vector<double>& residuals);
/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace volterra
