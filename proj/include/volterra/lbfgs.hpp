#pragma once

#include <functional>

#include <Eigen/Dense>

namespace volterra {

struct LbfgsOptions {
  int history = 10;
  int max_iterations = 2000;
  double gradient_tol = 1e-8;  ///< on the sup norm of the gradient
  double relative_tol = 1e-12; ///< relative objective change ...
  int relative_window = 5;     ///< ... sustained over this many iterations
  double armijo = 1e-4;
  int max_backtracks = 60;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;  ///< sup norm at x
  int iterations = 0;
  bool converged = false;
  const char* reason = "";
};

/// value(x, grad) returns f(x) and writes the gradient into grad.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with Armijo backtracking.
LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options = {});

}  // namespace volterra
