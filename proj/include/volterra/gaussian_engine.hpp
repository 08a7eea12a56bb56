#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "volterra/kernels.hpp"

namespace volterra {

/// Uniform grid t_i = i T / n, i = 0..n.
struct PathGrid {
  std::size_t n = 0;
  double horizon = 1.0;
  double dt = 1.0;
  std::vector<double> times;  ///< n + 1 entries, times[0] = 0

  static PathGrid uniform(double horizon, std::size_t n);
};

/// Covariance of (B_{t_1..t_n}, Bhat_{t_1..t_n}) as a 2n x 2n matrix.
Eigen::MatrixXd build_joint_covariance(const Kernel& kernel, const PathGrid& grid, int threads = 1);

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  ///< multiple of the identity added before success
};

/// LLT with the jitter ladder delta = 1e-12 max(diag), doubled up to 20 times.
/// Throws NumericalError naming the minimum eigenvalue when every rung fails.
CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& cov);

/// A block of joint paths in time-major layout: entry (i, p) sits at i * paths + p.
struct PathBlock {
  std::size_t n = 0;
  std::size_t paths = 0;
  std::vector<double> dW;    ///< W increments over cell i
  std::vector<double> dB;    ///< B increments over cell i
  std::vector<double> bhat;  ///< Bhat at t_{i+1}
};

/// Exact sampler for (W, B, Bhat) on a grid. Path p always consumes the same
/// Philox streams, so blocks can be produced in any order or thread.
class PathSampler {
 public:
  PathSampler(const Kernel& kernel, PathGrid grid, int threads = 1);

  const PathGrid& grid() const noexcept { return grid_; }
  double jitter() const noexcept { return jitter_; }

  void sample(std::uint64_t seed, std::uint64_t first_path, std::size_t count, PathBlock& out) const;

 private:
  PathGrid grid_;
  std::vector<double> lower_;  // row-major 2n x 2n
  double jitter_ = 0.0;
};

struct JointPathBatch {
  Eigen::MatrixXd w_increments;  ///< paths x n
  Eigen::MatrixXd b_increments;  ///< paths x n
  Eigen::MatrixXd bhat_values;   ///< paths x n, Bhat at t_1..t_n
  std::uint64_t seed = 0;
};

JointPathBatch sample_paths(const Kernel& kernel, const PathGrid& grid, std::size_t paths, std::uint64_t seed,
                            int threads = 1);

/// Paths per work item in every Monte Carlo loop. Fixed so that reductions over
/// blocks are independent of the worker count.
inline constexpr std::size_t kPathBlock = 2048;

struct KLSpectrum {
  std::vector<double> eigenvalues;  ///< largest `count`, decreasing, all > 0
  std::size_t count = 0;
  double total = 0.0;       ///< sum of all positive eigenvalues
  double trace = 0.0;       ///< midpoint rule for the integral of C(t,t)
  double truncation = 0.0;  ///< trace - sum of the retained eigenvalues
};

/// Nystrom eigenvalues of the covariance operator on cell midpoints.
KLSpectrum kl_spectrum(const Kernel& kernel, const PathGrid& grid, std::size_t count, int threads = 1);

struct MomentBound {
  double threshold = 0.0;  ///< (4 a lambda_1)^{-1}
  double bound = 0.0;      ///< exp(2 a sum lambda_k)
};

double moment_threshold(const KLSpectrum& spectrum, double a);

/// Exponential moment bound for E exp(a eps int Bhat^2). Throws DomainError
/// when eps is not below the threshold.
MomentBound moment_bound(const KLSpectrum& spectrum, double a, double eps);

}  // namespace volterra
