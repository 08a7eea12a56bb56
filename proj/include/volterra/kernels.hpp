#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "volterra/quadrature.hpp"

namespace volterra {

enum class KernelFamily { brownian, ornstein_uhlenbeck, fbm, riemann_liouville, fractional_ou };

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view name);

/// Declarative description of a Volterra kernel K(t,s) on [0,T]^2.
struct KernelSpec {
  KernelFamily family = KernelFamily::brownian;
  double hurst = 0.5;           ///< H in (0,1); ignored by brownian / ornstein_uhlenbeck
  double mean_reversion = 1.0;  ///< a > 0; ornstein_uhlenbeck and fractional_ou only
  double horizon = 1.0;         ///< T > 0

  bool uses_hurst() const noexcept;
  bool uses_mean_reversion() const noexcept;
  /// Exponent H with K(t,s) = e^{1/2-H} K(e t, e s) for the self-similar families;
  /// 1/2 for brownian and ornstein_uhlenbeck.
  double self_similarity_index() const noexcept;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Evaluator for one kernel. Immutable after construction and safe to share
/// across threads.
///
/// Values on the diagonal follow the limit from below where it is finite and
/// are 0 where the kernel diverges; integrals never sample the diagonal. The
/// fBm kernel (Molchan-Golosov form) and the fractional OU kernel are computed
/// through one singular integral each; the fractional OU convolution is folded
/// into the inner integral by exchanging the order of integration.
class Kernel {
 public:
  explicit Kernel(const KernelSpec& spec, quad::Tolerance tol = {});

  const KernelSpec& spec() const noexcept { return spec_; }
  /// Domain length of this evaluator (1 for a rescaled kernel on the unit square).
  double horizon() const noexcept { return horizon_; }
  const quad::Tolerance& tolerance() const noexcept { return tol_; }

  /// K(t,s); zero for s >= t (diagonal convention above) and for t = 0.
  double eval(double t, double s) const;
  /// As eval, with the lag t - s supplied exactly by the caller.
  double eval_gap(double t, double s, double gap) const;
  /// Integral of K(t,u) over u in [lo, min(hi,t)]; zero when lo >= t.
  double cell_integral(double t, double lo, double hi) const;
  /// C(t,s) = integral over [0, min(t,s)] of K(t,u) K(s,u).
  double covariance(double t, double s) const;
  /// E[B_s Bhat_t] = integral over [0, min(s,t)] of K(t,u).
  double cross_covariance(double s_brownian, double t_volterra) const;

  /// K~(r,u) = T^{1/2-H} K(T r, T u) on [0, horizon/T]^2.
  Kernel rescaled(double T, double H) const;

  /// Power of (t-s) governing K(t,s) as s -> t (negative means divergent).
  double diagonal_exponent() const noexcept;
  /// Power of s governing K(t,s) as s -> 0 (negative means divergent).
  double origin_exponent() const noexcept;

 private:
  void check_time(double x, const char* name) const;
  // Evaluation in base (unscaled) coordinates; gap = t - s supplied exactly.
  double base_eval(double t, double s, double gap) const;
  double base_cell_integral(double t, double lo, double hi) const;
  double base_covariance(double t, double s) const;
  double fbm_eval(double t, double s, double gap) const;
  double fou_eval(double t, double s, double gap) const;
  // Integral over z in [s/t, 1] of z^za (1-z)^qb w(z), w = exp(-a(t - s/z)) when weighted.
  double z_integral(double t, double s, double gap, double za, double qb, bool weighted) const;

  KernelSpec spec_;
  quad::Tolerance tol_;
  quad::Tolerance inner_tol_;
  quad::JacobiRule near_rule_;  // weight q^(power of (1-z) in the inner integral)
  double horizon_;
  double time_scale_ = 1.0;
  double amplitude_ = 1.0;
  double c_hurst_ = 1.0;       // Molchan-Golosov normalizer
  double inv_gamma_rl_ = 1.0;  // 1 / Gamma(H + 1/2)
};

// Free-function forms of the kernel operations.
double kernel_eval(const KernelSpec& spec, double t, double s);
double kernel_cell_integral(const KernelSpec& spec, double t, double u_lo, double u_hi);
double covariance(const KernelSpec& spec, double t, double s);
double cross_covariance(const KernelSpec& spec, double s_brownian, double t_volterra);

/// Covariance matrix C(t_i, t_j) over a time grid.
struct CovarianceGrid {
  std::vector<double> grid;
  Eigen::MatrixXd matrix;
};

CovarianceGrid covariance_grid(const Kernel& kernel, std::span<const double> times);

/// sup over sampled t1 in [0, T-h] of the L2 distance between K(t1+h, .) and K(t1, .).
double modulus_l2(const Kernel& kernel, double h, int t_samples);

/// Least-squares slope of log modulus_l2(h) against log h. h_grid must span at
/// least two decades inside (0, T].
double holder_slope(const Kernel& kernel, std::span<const double> h_grid, int t_samples);

/// max over sampled s < t of |K(t,s) - e^{1/2-H} K(e t, e s)| / (1 + |K(t,s)|).
double self_similarity_defect(const Kernel& kernel, double eps, int samples);

/// Gate used by small-time computations.
inline constexpr double kSelfSimilarityGate = 1e-6;

}  // namespace volterra
