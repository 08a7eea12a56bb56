#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "volterra/asymptotics.hpp"
#include "volterra/mc_harness.hpp"
#include "volterra/rate_solver.hpp"

namespace volterra {

inline constexpr std::string_view kVersion = "0.1.0";

struct KernelCheckConfig {
  std::size_t grid = 20;  ///< covariance check on a grid x grid lattice
  std::vector<double> h_grid;
  int t_samples = 11;
};

struct RateFunctionConfig {
  std::vector<double> x;
  SolverConfig solver;
};

struct SmileConfig {
  std::vector<double> y;
  Regime regime = Regime::small_noise;
  SolverConfig solver;
  double mc_scale = 0.0;  ///< > 0 adds Monte Carlo implied vols at this eps (or t / T)
  std::size_t mc_paths = 200000;
  std::size_t n_steps = 64;
};

struct McVerifyConfig {
  double y = 0.1;
  std::vector<double> eps;
  std::size_t paths = 100000;
  std::size_t n_steps = 256;
  bool doubling_check = true;  ///< rerun on 2 n_steps and report both slopes
  bool include_drift = true;
  bool theory = true;
  SolverConfig solver;
};

struct SmalltimeConfig {
  double y = 0.1;
  std::vector<double> t;
  std::size_t paths = 100000;
  std::size_t n_steps = 256;
  bool theory = true;
  SolverConfig solver;
};

struct SimulateConfig {
  std::size_t paths = 4;
  std::size_t n_steps = 64;
};

struct EigenConfig {
  std::size_t n = 512;
  std::size_t count = 10;
  double a = 1.0;
  double eps_fraction = 0.5;  ///< eps = eps_fraction * threshold for the moment bound
  std::size_t mc_paths = 0;   ///< > 0 adds a Monte Carlo estimate of the exponential moment
  std::size_t mc_steps = 128;
};

struct RunConfig {
  ModelSpec model;
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 means all cores
  std::string out = "out";
  KernelCheckConfig kernel_check;
  RateFunctionConfig rate_function;
  SmileConfig smile;
  McVerifyConfig mc_verify;
  SmalltimeConfig smalltime_verify;
  SimulateConfig simulate;
  EigenConfig eigen;
  std::string canonical;  ///< normalized JSON text of the merged input
};

/// Parses JSON text. `overrides` are "dotted.path=value" strings applied before
/// validation; values parse as JSON and fall back to plain strings. Errors are
/// ConfigError with the offending field path.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

}  // namespace volterra
