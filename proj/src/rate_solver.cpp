#include "volterra/rate_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "volterra/error.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rng.hpp"
#include "volterra/simd.hpp"

namespace volterra {

void validate_rho(double rho) {
  if (!(std::abs(rho) < 1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "rho = " << rho << " must satisfy |rho| < 1 - 1e-9";
    throw ConfigError(msg.str());
  }
}

RateProblem::RateProblem(const Kernel& kernel, SigmaSpec sigma, double rho, std::size_t n, int threads)
    : n_(n), grid_(PathGrid::uniform(kernel.horizon(), n)), sigma_(sigma), rho_(rho), rho_bar2_(1.0 - rho * rho) {
  validate_rho(rho);
  sigma_.validate();
  const auto& t = grid_.times;
  const double dt = grid_.dt;
  a_mid_.assign(n * n, 0.0);
  a_grid_.assign(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t j) {
    const double mid = (static_cast<double>(j) + 0.5) * dt;
    for (std::size_t k = 0; k <= j; ++k) {
      a_mid_[j * n + k] = kernel.cell_integral(mid, t[k], std::min(t[k + 1], mid));
      a_grid_[j * n + k] = kernel.cell_integral(t[j + 1], t[k], t[k + 1]);
    }
  });
  a_mid_t_.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k <= j; ++k) a_mid_t_[k * n + j] = a_mid_[j * n + k];
}

std::vector<double> RateProblem::lift(const std::vector<double>& fdot) const {
  std::vector<double> out(n_);
  simd::active().gemv(a_grid_.data(), n_, n_, fdot.data(), out.data());
  return out;
}

std::vector<double> RateProblem::lift_midpoints(const std::vector<double>& fdot) const {
  std::vector<double> out(n_);
  simd::active().gemv(a_mid_.data(), n_, n_, fdot.data(), out.data());
  return out;
}

double RateProblem::combine(double x, const Terms& t) const {
  const double r = x - rho_ * t.cross;
  return r * r / (2.0 * rho_bar2_ * t.quad) + t.energy;
}

double RateProblem::objective(double x, const std::vector<double>& fdot) const {
  if (fdot.size() != n_) throw DomainError("control length does not match the grid");
  const auto fhat = lift_midpoints(fdot);
  const double dt = grid_.dt;
  Terms t{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n_; ++j) {
    const double s = sigma_(fhat[j]);
    t.cross += s * fdot[j];
    t.quad += s * s;
    t.energy += fdot[j] * fdot[j];
  }
  t.cross *= dt;
  t.quad *= dt;
  t.energy *= 0.5 * dt;
  return combine(x, t);
}

double RateProblem::objective_gradient(double x, const std::vector<double>& fdot, std::vector<double>& grad) const {
  if (!sigma_.smooth()) throw DomainError("analytic gradient needs a smooth sigma");
  const auto fhat = lift_midpoints(fdot);
  const double dt = grid_.dt;
  std::vector<double> s(n_), ds(n_);
  Terms t{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n_; ++j) {
    s[j] = sigma_(fhat[j]);
    ds[j] = sigma_.derivative(fhat[j]);
    t.cross += s[j] * fdot[j];
    t.quad += s[j] * s[j];
    t.energy += fdot[j] * fdot[j];
  }
  t.cross *= dt;
  t.quad *= dt;
  t.energy *= 0.5 * dt;
  const double r = x - rho_ * t.cross;
  const double c1 = -rho_ * r / (rho_bar2_ * t.quad);
  const double c2 = -r * r / (rho_bar2_ * t.quad * t.quad);
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = dt * (c1 * ds[j] * fdot[j] + c2 * s[j] * ds[j]);
  grad.resize(n_);
  simd::active().gemv_t(a_mid_.data(), n_, n_, v.data(), grad.data());
  for (std::size_t k = 0; k < n_; ++k) grad[k] += dt * (c1 * s[k] + fdot[k]);
  return combine(x, t);
}

double RateProblem::objective_fd_gradient(double x, const std::vector<double>& fdot,
                                          std::vector<double>& grad) const {
  const auto fhat = lift_midpoints(fdot);
  const double dt = grid_.dt;
  std::vector<double> s(n_);
  // Suffix sums over rows j >= k let each column perturbation touch only its rows.
  std::vector<double> cross_tail(n_ + 1, 0.0), quad_tail(n_ + 1, 0.0);
  double energy = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    s[j] = sigma_(fhat[j]);
    energy += fdot[j] * fdot[j];
  }
  for (std::size_t j = n_; j-- > 0;) {
    cross_tail[j] = cross_tail[j + 1] + s[j] * fdot[j];
    quad_tail[j] = quad_tail[j + 1] + s[j] * s[j];
  }
  const double base = combine(x, {cross_tail[0] * dt, quad_tail[0] * dt, 0.5 * dt * energy});
  grad.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(fdot[k]));
    const double* col = a_mid_t_.data() + k * n_;
    double value[2];
    for (int side = 0; side < 2; ++side) {
      const double step = side == 0 ? h : -h;
      const double fk = fdot[k] + step;
      double cross = cross_tail[0] - cross_tail[k];
      double quad = quad_tail[0] - quad_tail[k];
      for (std::size_t j = k; j < n_; ++j) {
        const double sj = sigma_(fhat[j] + step * col[j]);
        cross += sj * (j == k ? fk : fdot[j]);
        quad += sj * sj;
      }
      const double e = energy - fdot[k] * fdot[k] + fk * fk;
      value[side] = combine(x, {cross * dt, quad * dt, 0.5 * dt * e});
    }
    grad[k] = (value[0] - value[1]) / (2.0 * h);
  }
  return base;
}

namespace {

double energy_of(const std::vector<double>& fdot, double dt) {
  double e = 0.0;
  for (double v : fdot) e += v * v;
  return 0.5 * dt * e;
}

// Smooth random perturbation: a few cosine modes with Gaussian coefficients.
std::vector<double> perturbation(std::size_t n, std::uint64_t seed, std::size_t start) {
  constexpr std::size_t modes = 6;
  double coef[modes];
  NormalStream(seed, start, stream_tag::start).fill(coef, modes);
  std::vector<double> p(n, 0.0);
  const double pi = std::acos(-1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    for (std::size_t m = 0; m < modes; ++m) p[j] += coef[m] * std::cos(pi * static_cast<double>(m) * u) / (1.0 + m);
  }
  return p;
}

}  // namespace

RateResult RateProblem::solve(double x, const SolverConfig& config) const {
  if (!std::isfinite(x)) throw DomainError("rate function argument must be finite");
  const double dt = grid_.dt;
  const double T = grid_.horizon;
  const double sqrt_dt = std::sqrt(dt);
  const double sigma_at_zero = sigma_(0.0);
  const double base = rho_ * x / (sigma_at_zero * T);
  const double scale = std::abs(x) / (sigma_at_zero * T);
  const std::size_t starts = 1 + config.perturbations;

  struct Outcome {
    std::vector<double> fdot;
    double value;
    double energy;
    bool converged;
    int iterations;
  };
  std::vector<Outcome> outcomes(starts);

  // Optimise in z = fdot sqrt(dt), where the energy term is |z|^2 / 2.
  const bool smooth = sigma_.smooth();
  Objective f = [&](const Eigen::VectorXd& z, Eigen::VectorXd& gz) {
    std::vector<double> fdot(n_), g;
    for (std::size_t j = 0; j < n_; ++j) fdot[j] = z[static_cast<Eigen::Index>(j)] / sqrt_dt;
    const double v = smooth ? objective_gradient(x, fdot, g) : objective_fd_gradient(x, fdot, g);
    gz.resize(static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) gz[static_cast<Eigen::Index>(j)] = g[j] / sqrt_dt;
    return v;
  };

  parallel_for(starts, config.threads, [&](std::size_t k) {
    Eigen::VectorXd z0(static_cast<Eigen::Index>(n_));
    std::vector<double> p = k == 0 ? std::vector<double>(n_, 0.0) : perturbation(n_, config.seed, k);
    for (std::size_t j = 0; j < n_; ++j) z0[static_cast<Eigen::Index>(j)] = (base + scale * p[j]) * sqrt_dt;
    const LbfgsResult r = minimize_lbfgs(f, z0, config.lbfgs);
    Outcome& o = outcomes[k];
    o.fdot.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) o.fdot[j] = r.x[static_cast<Eigen::Index>(j)] / sqrt_dt;
    o.value = objective(x, o.fdot);
    o.energy = energy_of(o.fdot, dt);
    o.converged = r.converged;
    o.iterations = r.iterations;
  });

  std::size_t best = 0;
  bool any_converged = false;
  for (std::size_t k = 0; k < starts; ++k) {
    any_converged = any_converged || outcomes[k].converged;
    const Outcome& o = outcomes[k];
    const Outcome& b = outcomes[best];
    if (o.value < b.value || (o.value == b.value && o.energy < b.energy)) best = k;
  }
  const Outcome& win = outcomes[best];
  RateResult out;
  out.value = std::max(0.0, win.value);
  out.optimizer_path = {grid_, win.fdot};
  out.fhat = lift(win.fdot);
  out.starts_tried = starts;
  out.converged = any_converged;
  out.energy = win.energy;
  out.iterations = win.iterations;
  out.grid_refinement.emplace_back(n_, out.value);
  return out;
}

std::vector<double> lift_control(const Kernel& kernel, const ControlPath& path) {
  const std::size_t n = path.grid.n;
  if (path.fdot.size() != n) throw DomainError("control length does not match the grid");
  const auto& t = path.grid.times;
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < i; ++k) acc += path.fdot[k] * kernel.cell_integral(t[i], t[k], t[k + 1]);
    out[i] = acc;
  }
  return out;
}

double objective(const Kernel& kernel, const SigmaSpec& sigma, double rho, double x, const ControlPath& path) {
  return RateProblem(kernel, sigma, rho, path.grid.n).objective(x, path.fdot);
}

RateResult rate_function(const Kernel& kernel, const SigmaSpec& sigma, double rho, double x,
                         const SolverConfig& config) {
  const RateProblem problem(kernel, sigma, rho, config.n, config.threads);
  RateResult out = problem.solve(x, config);
  if (config.refine) {
    const RateProblem fine(kernel, sigma, rho, 2 * config.n, config.threads);
    out.grid_refinement.emplace_back(2 * config.n, fine.solve(x, config).value);
  }
  return out;
}

RateResult rate_function_hat(const Kernel& kernel, const SigmaSpec& sigma, double rho, double H, double y,
                             const SolverConfig& config, HatRoute route) {
  if (!(H > 0.0)) throw ConfigError("model.H must be positive");
  const double T = kernel.horizon();
  if (route == HatRoute::direct) return rate_function(kernel.rescaled(T, H), sigma, rho, y, config);
  const double scale = std::pow(T, 2.0 * H);
  RateResult out = rate_function(kernel, sigma, rho, std::pow(T, 0.5 - H) * y, config);
  out.value *= scale;
  for (auto& [n, v] : out.grid_refinement) v *= scale;
  return out;
}

}  // namespace volterra
