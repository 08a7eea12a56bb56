#include <algorithm>
#include <cmath>
#include <functional>

#include "volterra/error.hpp"
#include "volterra/gaussian_engine.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

KLSpectrum kl_spectrum(const Kernel& kernel, const PathGrid& grid, std::size_t count, int threads) {
  if (grid.n == 0) throw ConfigError("path grid is not initialised");
  if (count == 0 || count > grid.n) throw ConfigError("eigen.count must lie in [1, n]");
  const std::size_t n = grid.n;
  const double dt = grid.dt;
  // Cell midpoints: the right-endpoint rule carries an O(dt) bias in lambda_k.
  std::vector<double> node(n);
  for (std::size_t i = 0; i < n; ++i) node[i] = (static_cast<double>(i) + 0.5) * dt;
  Eigen::MatrixXd m(n, n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = kernel.covariance(node[i], node[j]) * dt;
      m(i, j) = c;
      m(j, i) = c;
    }
  });
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("Nystrom eigenvalue solve failed");
  std::vector<double> values(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  std::sort(values.begin(), values.end(), std::greater<>());

  KLSpectrum out;
  out.trace = m.trace();
  for (double v : values) {
    if (v <= 0.0) break;
    out.total += v;
    if (out.eigenvalues.size() < count) out.eigenvalues.push_back(v);
  }
  out.count = out.eigenvalues.size();
  double kept = 0.0;
  for (double v : out.eigenvalues) kept += v;
  out.truncation = out.trace - kept;
  return out;
}

double moment_threshold(const KLSpectrum& spectrum, double a) {
  if (!(a > 0.0)) throw DomainError("moment bound needs a > 0");
  if (spectrum.eigenvalues.empty()) throw DomainError("moment bound needs a non-empty spectrum");
  return 1.0 / (4.0 * a * spectrum.eigenvalues.front());
}

MomentBound moment_bound(const KLSpectrum& spectrum, double a, double eps) {
  MomentBound out;
  out.threshold = moment_threshold(spectrum, a);
  if (!(eps > 0.0)) throw DomainError("moment bound needs eps > 0");
  if (eps >= out.threshold)
    throw DomainError("eps = " + std::to_string(eps) + " is not below the moment threshold " +
                      std::to_string(out.threshold));
  out.bound = std::exp(2.0 * a * spectrum.total);
  return out;
}

}  // namespace volterra
