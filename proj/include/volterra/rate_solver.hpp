#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "volterra/gaussian_engine.hpp"
#include "volterra/kernels.hpp"
#include "volterra/lbfgs.hpp"
#include "volterra/sigma.hpp"

namespace volterra {

/// Piecewise-constant fdot on the cells of a uniform grid.
struct ControlPath {
  PathGrid grid;
  std::vector<double> fdot;
};

struct SolverConfig {
  std::size_t n = 64;
  std::size_t perturbations = 8;  ///< random starts in addition to the deterministic one
  std::uint64_t seed = 1;
  bool refine = false;            ///< also solve on 2n and record both values
  LbfgsOptions lbfgs{};
  int threads = 1;
};

struct RateResult {
  double value = 0.0;
  ControlPath optimizer_path;
  std::vector<double> fhat;  ///< lifted control at t_1..t_n
  std::size_t starts_tried = 0;
  bool converged = false;
  std::vector<std::pair<std::size_t, double>> grid_refinement;
  double energy = 0.0;
  int iterations = 0;  ///< of the winning start
};

/// Discretized variational problem for one (kernel, sigma, rho, n). The lift
/// matrices are built once and shared read-only by every solve.
class RateProblem {
 public:
  RateProblem(const Kernel& kernel, SigmaSpec sigma, double rho, std::size_t n, int threads = 1);

  std::size_t size() const noexcept { return n_; }
  const PathGrid& grid() const noexcept { return grid_; }
  const SigmaSpec& sigma() const noexcept { return sigma_; }
  double rho() const noexcept { return rho_; }

  /// fhat at t_1..t_n.
  std::vector<double> lift(const std::vector<double>& fdot) const;
  /// fhat at cell midpoints.
  std::vector<double> lift_midpoints(const std::vector<double>& fdot) const;

  double objective(double x, const std::vector<double>& fdot) const;
  /// Requires a smooth sigma.
  double objective_gradient(double x, const std::vector<double>& fdot, std::vector<double>& grad) const;
  /// Central differences with step 1e-6 (1 + |fdot_j|), O(n^2) through column updates.
  double objective_fd_gradient(double x, const std::vector<double>& fdot, std::vector<double>& grad) const;

  RateResult solve(double x, const SolverConfig& config) const;

 private:
  struct Terms {
    double cross;   // integral of sigma(fhat) fdot
    double quad;    // integral of sigma(fhat)^2
    double energy;  // half integral of fdot^2
  };
  double combine(double x, const Terms& t) const;

  std::size_t n_;
  PathGrid grid_;
  SigmaSpec sigma_;
  double rho_;
  double rho_bar2_;
  std::vector<double> a_mid_;    // row-major n x n: cells against K(m_j, .)
  std::vector<double> a_mid_t_;  // its transpose
  std::vector<double> a_grid_;   // row-major n x n: cells against K(t_{i+1}, .)
};

std::vector<double> lift_control(const Kernel& kernel, const ControlPath& path);
double objective(const Kernel& kernel, const SigmaSpec& sigma, double rho, double x, const ControlPath& path);
RateResult rate_function(const Kernel& kernel, const SigmaSpec& sigma, double rho, double x,
                         const SolverConfig& config);

enum class HatRoute { direct, scaling };

/// Small-time rate on the horizon T of `kernel`: either directly from the
/// rescaled kernel on [0,1], or as T^{2H} I_T(T^{1/2-H} y).
RateResult rate_function_hat(const Kernel& kernel, const SigmaSpec& sigma, double rho, double H, double y,
                             const SolverConfig& config, HatRoute route = HatRoute::direct);

void validate_rho(double rho);

}  // namespace volterra
