#include "volterra/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace volterra {

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& opt) {
  LbfgsResult out;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  double fx = f(x, g);
  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;
  int small_steps = 0;
  Eigen::VectorXd x_new(x.size());
  Eigen::VectorXd g_new(x.size());
  std::vector<double> alpha(static_cast<std::size_t>(opt.history));

  auto finish = [&](bool converged, const char* reason, int it) {
    out.x = x;
    out.value = fx;
    out.gradient_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    out.iterations = it;
    out.converged = converged;
    out.reason = reason;
    return out;
  };

  for (int it = 0; it < opt.max_iterations; ++it) {
    if (!std::isfinite(fx)) return finish(false, "non-finite objective", it);
    if (g.size() == 0 || g.cwiseAbs().maxCoeff() <= opt.gradient_tol) return finish(true, "gradient", it);

    // Two-loop recursion.
    Eigen::VectorXd d = -g;
    const std::size_t m = s_hist.size();
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(d);
      d.noalias() -= alpha[k] * y_hist[k];
    }
    if (m > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(d);
      d.noalias() += (alpha[k] - beta) * s_hist[k];
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    // First step of a fresh history is scaled to unit length.
    double step = m == 0 ? std::min(1.0, 1.0 / std::sqrt(d.squaredNorm())) : 1.0;
    double f_new = fx;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      x_new = x + step * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + opt.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return finish(g.cwiseAbs().maxCoeff() <= 1e3 * opt.gradient_tol, "line search", it);

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
      if (static_cast<int>(s_hist.size()) == opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    const double change = std::abs(fx - f_new) / std::max({std::abs(fx), std::abs(f_new), 1e-300});
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    small_steps = change <= opt.relative_tol ? small_steps + 1 : 0;
    if (small_steps >= opt.relative_window) return finish(true, "objective change", it + 1);
  }
  return finish(false, "iteration cap", opt.max_iterations);
}

}  // namespace volterra
