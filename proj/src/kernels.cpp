#include "volterra/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "volterra/error.hpp"

namespace volterra {
namespace {

// The inner integrand near z = 1 is q^beta g(q) with g analytic on |q| < 1 and
// q <= 1/2, so a fixed Gauss-Jacobi rule converges geometrically (ratio ~ 1/34
// per node pair); 20 nodes sit well below double rounding.
constexpr int kNearNodes = 20;

}  // namespace

std::string_view to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::brownian: return "brownian";
    case KernelFamily::ornstein_uhlenbeck: return "ornstein_uhlenbeck";
    case KernelFamily::fbm: return "fbm";
    case KernelFamily::riemann_liouville: return "riemann_liouville";
    case KernelFamily::fractional_ou: return "fractional_ou";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  for (auto f : {KernelFamily::brownian, KernelFamily::ornstein_uhlenbeck, KernelFamily::fbm,
                 KernelFamily::riemann_liouville, KernelFamily::fractional_ou}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

bool KernelSpec::uses_hurst() const noexcept {
  return family == KernelFamily::fbm || family == KernelFamily::riemann_liouville ||
         family == KernelFamily::fractional_ou;
}

bool KernelSpec::uses_mean_reversion() const noexcept {
  return family == KernelFamily::ornstein_uhlenbeck || family == KernelFamily::fractional_ou;
}

double KernelSpec::self_similarity_index() const noexcept { return uses_hurst() ? hurst : 0.5; }

void KernelSpec::validate() const {
  if (uses_hurst() && !(hurst > 0.0 && hurst < 1.0))
    throw ConfigError("kernel.H must lie in (0,1) for family " + std::string(to_string(family)));
  if (uses_mean_reversion() && !(mean_reversion > 0.0 && std::isfinite(mean_reversion)))
    throw ConfigError("kernel.a must be positive for family " + std::string(to_string(family)));
  if (!(horizon > 0.0 && std::isfinite(horizon))) throw ConfigError("kernel.T must be positive");
}

Kernel::Kernel(const KernelSpec& spec, quad::Tolerance tol)
    : spec_(spec), tol_(tol), horizon_(spec.horizon) {
  spec_.validate();
  inner_tol_ = tol_;
  inner_tol_.abs = tol_.abs * 1e-3;
  inner_tol_.rel = std::max(tol_.rel * 1e-2, 1e-13);
  const double H = spec_.uses_hurst() ? spec_.hurst : 0.5;
  c_hurst_ = std::sqrt(2.0 * H * std::tgamma(1.5 - H) / (std::tgamma(H + 0.5) * std::tgamma(2.0 - 2.0 * H)));
  inv_gamma_rl_ = 1.0 / std::tgamma(H + 0.5);
  if (spec_.uses_hurst() && spec_.family != KernelFamily::riemann_liouville && H != 0.5)
    near_rule_ = quad::gauss_jacobi_unit(H < 0.5 ? H - 0.5 : H - 1.5, kNearNodes);
}

Kernel Kernel::rescaled(double T, double H) const {
  if (!(T > 0.0)) throw DomainError("rescaled kernel needs T > 0");
  Kernel out = *this;
  out.time_scale_ = time_scale_ * T;
  out.amplitude_ = amplitude_ * std::pow(T, 0.5 - H);
  out.horizon_ = horizon_ / T;
  return out;
}

double Kernel::diagonal_exponent() const noexcept {
  switch (spec_.family) {
    case KernelFamily::brownian:
    case KernelFamily::ornstein_uhlenbeck: return 0.0;
    default: return spec_.hurst - 0.5;
  }
}

double Kernel::origin_exponent() const noexcept {
  if (spec_.family == KernelFamily::fbm || spec_.family == KernelFamily::fractional_ou)
    return -std::abs(spec_.hurst - 0.5);
  return 0.0;
}

void Kernel::check_time(double x, const char* name) const {
  if (!(x >= 0.0 && x <= horizon_ * (1.0 + 1e-12))) {
    std::ostringstream msg;
    msg << "kernel argument " << name << " = " << x << " outside [0, " << horizon_ << "]";
    throw DomainError(msg.str());
  }
}

double Kernel::z_integral(double t, double s, double gap, double za, double qb, bool weighted) const {
  const double a = spec_.mean_reversion;
  const double x = s / t;
  double total = 0.0;
  // z = 1 - q over q in [0, len], scaled onto the unit Jacobi rule.
  auto near_part = [&](double len) {
    return std::pow(len, qb + 1.0) * near_rule_.apply([&](double r) {
      const double q = len * r;
      double v = std::pow(1.0 - q, za);
      if (weighted) v *= std::exp(-a * (gap - t * q) / (1.0 - q));
      return v;
    });
  };
  if (x < 0.5) {
    auto log_part = [&](double y) {
      double v = std::exp((za + 1.0) * y) * std::pow(-std::expm1(y), qb);
      if (weighted) v *= std::exp(-a * (t - s * std::exp(-y)));
      return v;
    };
    total += quad::integrate(log_part, std::log(x), -std::log(2.0), inner_tol_).value;
    total += near_part(0.5);
  } else {
    total += near_part(gap / t);
  }
  return total;
}

double Kernel::fbm_eval(double t, double s, double gap) const {
  const double H = spec_.hurst;
  if (s <= 0.0) return 0.0;  // integrable singularity at s = 0; never sampled
  if (H < 0.5) {
    const double h = H - 0.5;
    const double first = std::pow(t / s, h) * std::pow(gap, h);
    return c_hurst_ * (first + (0.5 - H) * std::pow(s, h) * z_integral(t, s, gap, -2.0 * H, h, false));
  }
  return c_hurst_ * (H - 0.5) * std::pow(s, H - 0.5) * z_integral(t, s, gap, -2.0 * H, H - 1.5, false);
}

double Kernel::fou_eval(double t, double s, double gap) const {
  const double H = spec_.hurst;
  const double a = spec_.mean_reversion;
  if (s <= 0.0) return 0.0;
  if (H < 0.5) {
    const double h = H - 0.5;
    const double first = std::pow(t / s, h) * std::pow(gap, h);
    const double conv = a * std::pow(s, 0.5 + H) * z_integral(t, s, gap, -1.0 - 2.0 * H, h, true);
    const double tail = (0.5 - H) * std::pow(s, h) * z_integral(t, s, gap, -2.0 * H, h, true);
    return c_hurst_ * (first - conv + tail);
  }
  return c_hurst_ * (H - 0.5) * std::pow(s, H - 0.5) * z_integral(t, s, gap, -2.0 * H, H - 1.5, true);
}

double Kernel::base_eval(double t, double s, double gap) const {
  if (t <= 0.0 || gap < 0.0) return 0.0;
  const bool half = spec_.uses_hurst() && spec_.hurst == 0.5;
  if (gap == 0.0) {
    switch (spec_.family) {
      case KernelFamily::brownian:
      case KernelFamily::ornstein_uhlenbeck: return 1.0;
      default: return half ? 1.0 : 0.0;
    }
  }
  switch (spec_.family) {
    case KernelFamily::brownian: return 1.0;
    case KernelFamily::ornstein_uhlenbeck: return std::exp(-spec_.mean_reversion * gap);
    case KernelFamily::riemann_liouville: return std::pow(gap, spec_.hurst - 0.5) * inv_gamma_rl_;
    case KernelFamily::fbm: return half ? 1.0 : fbm_eval(t, s, gap);
    case KernelFamily::fractional_ou:
      return half ? std::exp(-spec_.mean_reversion * gap) : fou_eval(t, s, gap);
  }
  return 0.0;
}

double Kernel::base_cell_integral(double t, double lo, double hi) const {
  const double top = std::min(hi, t);
  if (lo >= top) return 0.0;
  const double a = spec_.mean_reversion;
  const bool half = spec_.uses_hurst() && spec_.hurst == 0.5;
  switch (spec_.family) {
    case KernelFamily::brownian: return top - lo;
    case KernelFamily::ornstein_uhlenbeck: return std::exp(-a * (t - top)) * -std::expm1(-a * (top - lo)) / a;
    case KernelFamily::riemann_liouville: {
      const double g = spec_.hurst + 0.5;
      return (std::pow(t - lo, g) - std::pow(t - top, g)) * inv_gamma_rl_ / g;
    }
    case KernelFamily::fbm:
      if (half) return top - lo;
      break;
    case KernelFamily::fractional_ou:
      if (half) return std::exp(-a * (t - top)) * -std::expm1(-a * (top - lo)) / a;
      break;
  }
  const double gamma_lo = lo == 0.0 ? origin_exponent() : 0.0;
  const double gamma_hi = top == t ? diagonal_exponent() : 0.0;
  auto left = [&](double v) { return base_eval(t, lo + v, (t - lo) - v); };
  auto right = [&](double v) { return base_eval(t, top - v, (t - top) + v); };
  return quad::integrate_two_ended(left, right, lo, top, gamma_lo, gamma_hi, tol_).value;
}

double Kernel::base_covariance(double t, double s) const {
  if (s > t) std::swap(s, t);
  if (s <= 0.0) return 0.0;
  if (spec_.family == KernelFamily::brownian || (spec_.family == KernelFamily::fbm && spec_.hurst == 0.5))
    return s;
  const double gamma_lo = 2.0 * origin_exponent();
  const double diag = diagonal_exponent();
  const double gamma_hi = t == s ? 2.0 * diag : diag;
  const double lag = t - s;
  auto left = [&](double v) { return base_eval(t, v, t - v) * base_eval(s, v, s - v); };
  auto right = [&](double v) { return base_eval(t, s - v, lag + v) * base_eval(s, s - v, v); };
  return quad::integrate_two_ended(left, right, 0.0, s, gamma_lo, gamma_hi, tol_).value;
}

double Kernel::eval(double t, double s) const {
  check_time(t, "t");
  check_time(s, "s");
  return amplitude_ * base_eval(time_scale_ * t, time_scale_ * s, time_scale_ * (t - s));
}

double Kernel::eval_gap(double t, double s, double gap) const {
  check_time(t, "t");
  check_time(s, "s");
  return amplitude_ * base_eval(time_scale_ * t, time_scale_ * s, time_scale_ * gap);
}

double Kernel::cell_integral(double t, double lo, double hi) const {
  check_time(t, "t");
  check_time(lo, "u_lo");
  check_time(hi, "u_hi");
  if (lo > hi) throw DomainError("cell integral needs u_lo <= u_hi");
  return amplitude_ / time_scale_ * base_cell_integral(time_scale_ * t, time_scale_ * lo, time_scale_ * hi);
}

double Kernel::covariance(double t, double s) const {
  check_time(t, "t");
  check_time(s, "s");
  return amplitude_ * amplitude_ / time_scale_ * base_covariance(time_scale_ * t, time_scale_ * s);
}

double Kernel::cross_covariance(double s_brownian, double t_volterra) const {
  return cell_integral(t_volterra, 0.0, s_brownian);
}

double kernel_eval(const KernelSpec& spec, double t, double s) { return Kernel(spec).eval(t, s); }

double kernel_cell_integral(const KernelSpec& spec, double t, double u_lo, double u_hi) {
  return Kernel(spec).cell_integral(t, u_lo, u_hi);
}

double covariance(const KernelSpec& spec, double t, double s) { return Kernel(spec).covariance(t, s); }

double cross_covariance(const KernelSpec& spec, double s_brownian, double t_volterra) {
  return Kernel(spec).cross_covariance(s_brownian, t_volterra);
}

}  // namespace volterra
