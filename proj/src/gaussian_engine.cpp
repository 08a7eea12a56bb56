#include "volterra/gaussian_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "volterra/error.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rng.hpp"
#include "volterra/simd.hpp"

namespace volterra {

PathGrid PathGrid::uniform(double horizon, std::size_t n) {
  if (n == 0) throw ConfigError("grid.n must be at least 1");
  if (!(horizon > 0.0 && std::isfinite(horizon))) throw ConfigError("grid horizon must be positive");
  PathGrid g;
  g.n = n;
  g.horizon = horizon;
  g.dt = horizon / static_cast<double>(n);
  g.times.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g.times[i] = horizon * static_cast<double>(i) / static_cast<double>(n);
  g.times[n] = horizon;
  return g;
}

namespace {

void check_grid(const Kernel& kernel, const PathGrid& grid) {
  if (grid.n == 0 || grid.times.size() != grid.n + 1) throw ConfigError("path grid is not initialised");
  if (grid.horizon > kernel.horizon() * (1.0 + 1e-12))
    throw DomainError("path grid extends beyond the kernel horizon");
}

}  // namespace

Eigen::MatrixXd build_joint_covariance(const Kernel& kernel, const PathGrid& grid, int threads) {
  check_grid(kernel, grid);
  const std::size_t n = grid.n;
  const auto& t = grid.times;
  Eigen::MatrixXd cov(2 * n, 2 * n);
  // Column j: cumulative cell integrals of K(t_j, .) over [0, t_k], k <= j.
  std::vector<std::vector<double>> cum(n);
  parallel_for(n, threads, [&](std::size_t j) {
    std::vector<double>& c = cum[j];
    c.assign(j + 2, 0.0);
    for (std::size_t k = 0; k <= j; ++k) c[k + 1] = c[k] + kernel.cell_integral(t[j + 1], t[k], t[k + 1]);
  });
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = kernel.covariance(t[i + 1], t[j + 1]);
      cov(n + i, n + j) = c;
      cov(n + j, n + i) = c;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cov(i, j) = std::min(t[i + 1], t[j + 1]);
      const double cross = cum[j][std::min(i, j) + 1];  // E[B_{t_i} Bhat_{t_j}]
      cov(i, n + j) = cross;
      cov(n + j, i) = cross;
    }
  }
  return cov;
}

CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& cov) {
  const double scale = cov.diagonal().cwiseAbs().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};
  double delta = 1e-12 * (scale > 0.0 ? scale : 1.0);
  const Eigen::Index dim = cov.rows();
  for (int attempt = 0; attempt <= 20; ++attempt, delta *= 2.0) {
    llt.compute(cov + delta * Eigen::MatrixXd::Identity(dim, dim));
    if (llt.info() == Eigen::Success) return {llt.matrixL(), delta};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  std::ostringstream msg;
  msg << "covariance factorization failed after maximum jitter; minimum eigenvalue "
      << eig.eigenvalues().minCoeff();
  throw NumericalError(msg.str());
}

PathSampler::PathSampler(const Kernel& kernel, PathGrid grid, int threads) : grid_(std::move(grid)) {
  const CholeskyFactor f = cholesky_with_jitter(build_joint_covariance(kernel, grid_, threads));
  jitter_ = f.jitter;
  const auto dim = static_cast<Eigen::Index>(2 * grid_.n);
  lower_.assign(static_cast<std::size_t>(dim * dim), 0.0);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) lower_[static_cast<std::size_t>(i * dim + j)] = f.lower(i, j);
}

void PathSampler::sample(std::uint64_t seed, std::uint64_t first_path, std::size_t count, PathBlock& out) const {
  const std::size_t n = grid_.n;
  const std::size_t dim = 2 * n;
  out.n = n;
  out.paths = count;
  out.dW.resize(n * count);
  out.dB.resize(n * count);
  out.bhat.resize(n * count);
  std::vector<double> z(dim * count);
  std::vector<double> y(dim * count);
  std::vector<double> draw(dim);
  const double sqrt_dt = std::sqrt(grid_.dt);
  for (std::size_t p = 0; p < count; ++p) {
    NormalStream joint(seed, first_path + p, stream_tag::joint);
    joint.fill(draw.data(), dim);
    for (std::size_t j = 0; j < dim; ++j) z[j * count + p] = draw[j];
    NormalStream w(seed, first_path + p, stream_tag::brownian);
    w.fill(draw.data(), n);
    for (std::size_t i = 0; i < n; ++i) out.dW[i * count + p] = sqrt_dt * draw[i];
  }
  simd::active().tri_apply(lower_.data(), dim, z.data(), y.data(), count, count);
  for (std::size_t p = 0; p < count; ++p) out.dB[p] = y[p];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t p = 0; p < count; ++p) out.dB[i * count + p] = y[i * count + p] - y[(i - 1) * count + p];
  std::copy(y.begin() + static_cast<std::ptrdiff_t>(n * count), y.end(), out.bhat.begin());
}

JointPathBatch sample_paths(const Kernel& kernel, const PathGrid& grid, std::size_t paths, std::uint64_t seed,
                            int threads) {
  if (paths == 0) throw ConfigError("paths must be at least 1");
  const PathSampler sampler(kernel, grid, threads);
  const std::size_t n = grid.n;
  JointPathBatch batch;
  batch.seed = seed;
  const auto rows = static_cast<Eigen::Index>(paths);
  const auto cols = static_cast<Eigen::Index>(n);
  batch.w_increments.resize(rows, cols);
  batch.b_increments.resize(rows, cols);
  batch.bhat_values.resize(rows, cols);
  const std::size_t blocks = (paths + kPathBlock - 1) / kPathBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t first = b * kPathBlock;
    const std::size_t count = std::min(kPathBlock, paths - first);
    PathBlock block;
    sampler.sample(seed, first, count, block);
    for (std::size_t p = 0; p < count; ++p) {
      const auto r = static_cast<Eigen::Index>(first + p);
      for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        batch.w_increments(r, c) = block.dW[i * count + p];
        batch.b_increments(r, c) = block.dB[i * count + p];
        batch.bhat_values(r, c) = block.bhat[i * count + p];
      }
    }
  });
  return batch;
}

}  // namespace volterra
