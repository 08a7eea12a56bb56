#include <algorithm>
#include <cmath>

#include "volterra/error.hpp"
#include "volterra/kernels.hpp"

namespace volterra {

CovarianceGrid covariance_grid(const Kernel& kernel, std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(times.size());
  CovarianceGrid out{std::vector<double>(times.begin(), times.end()), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = kernel.covariance(times[i], times[j]);
      out.matrix(i, j) = c;
      out.matrix(j, i) = c;
    }
  }
  return out;
}

namespace {

// Integral over [0,T] of (K(t2,u) - K(t1,u))^2 for t1 < t2.
double increment_energy(const Kernel& kernel, double t1, double t2) {
  const double diag = std::min(0.0, 2.0 * kernel.diagonal_exponent());
  const double origin = 2.0 * kernel.origin_exponent();
  const auto& tol = kernel.tolerance();
  double total = 0.0;
  if (t1 > 0.0) {
    auto left = [&](double v) {
      const double d = kernel.eval_gap(t2, v, t2 - v) - kernel.eval_gap(t1, v, t1 - v);
      return d * d;
    };
    auto right = [&](double v) {
      const double u = t1 - v;
      const double d = kernel.eval_gap(t2, u, (t2 - t1) + v) - kernel.eval_gap(t1, u, v);
      return d * d;
    };
    total += quad::integrate_two_ended(left, right, 0.0, t1, origin, diag, tol).value;
  }
  auto left = [&](double v) {
    const double k = kernel.eval_gap(t2, t1 + v, (t2 - t1) - v);
    return k * k;
  };
  auto right = [&](double v) {
    const double k = kernel.eval_gap(t2, t2 - v, v);
    return k * k;
  };
  total += quad::integrate_two_ended(left, right, t1, t2, t1 == 0.0 ? origin : 0.0, diag, tol).value;
  return total;
}

}  // namespace

double modulus_l2(const Kernel& kernel, double h, int t_samples) {
  const double T = kernel.horizon();
  if (!(h > 0.0 && h <= T)) throw DomainError("modulus_l2 needs 0 < h <= T");
  if (t_samples < 1) throw DomainError("modulus_l2 needs at least one t sample");
  double best = 0.0;
  for (int k = 0; k < t_samples; ++k) {
    const double t1 = t_samples == 1 ? 0.0 : (T - h) * k / (t_samples - 1);
    const double t2 = std::min(T, t1 + h);
    best = std::max(best, increment_energy(kernel, t1, t2));
  }
  return best;
}

double holder_slope(const Kernel& kernel, std::span<const double> h_grid, int t_samples) {
  if (h_grid.size() < 2) throw DomainError("holder_slope needs at least two h values");
  const auto [lo, hi] = std::minmax_element(h_grid.begin(), h_grid.end());
  if (*hi / *lo < 100.0 * (1.0 - 1e-9)) throw DomainError("holder_slope h grid must span two decades");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(h_grid.size());
  for (double h : h_grid) {
    const double x = std::log(h);
    const double y = std::log(modulus_l2(kernel, h, t_samples));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double self_similarity_defect(const Kernel& kernel, double eps, int samples) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("self_similarity_defect needs eps in (0,1]");
  if (samples < 1) throw DomainError("self_similarity_defect needs at least one sample");
  const double T = kernel.horizon();
  const double H = kernel.spec().self_similarity_index();
  const double factor = std::pow(eps, 0.5 - H);
  double worst = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = T * i / samples;
    for (int j = 0; j < samples; ++j) {
      const double s = t * (j + 0.5) / samples;
      const double gap = t - s;
      const double k = kernel.eval_gap(t, s, gap);
      const double scaled = factor * kernel.eval_gap(eps * t, eps * s, eps * gap);
      worst = std::max(worst, std::abs(k - scaled) / (1.0 + std::abs(k)));
    }
  }
  return worst;
}

}  // namespace volterra
