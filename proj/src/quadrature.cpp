#include "volterra/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "volterra/error.hpp"

namespace volterra::quad {
namespace {

// Kronrod abscissae on [0,1) (mirrored), Kronrod weights, and the 7-point Gauss
// weights that belong to the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEndpointSmoothness = 4.0;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const FunctionRef& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double pair = fv1[j] + fv2[j];
    res_k += kWgk[j] * pair;
    if (j % 2 == 1) res_g += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  double res_abs = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    res_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    res_abs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
  }
  const double scale = std::abs(half);
  res_asc *= scale;
  res_abs *= scale;
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * res_abs, err);
  return {a, b, res_k * half, err};
}

}  // namespace

JacobiRule gauss_jacobi_unit(double beta, int n) {
  if (!(beta > -1.0)) throw DomainError("Gauss-Jacobi rule needs beta > -1");
  if (n < 1) throw DomainError("Gauss-Jacobi rule needs at least one node");
  // Jacobi matrix for weight (1+x)^beta on [-1,1].
  const double b = beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + b;
    diag(k) = (k == 0) ? b / (b + 2.0) : (b * b) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + b;
    off(k - 1) = std::sqrt(4.0 * k * k * (k + b) * (k + b) / (s * s * (s + 1.0) * (s - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("Gauss-Jacobi eigenvalue solve failed");
  JacobiRule rule;
  rule.beta = beta;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (1.0 + solver.eigenvalues()(i));
    rule.weights[i] = v0 * v0 / (b + 1.0);
  }
  return rule;
}

Result integrate(FunctionRef f, double a, double b, const Tolerance& tol) {
  if (a == b) return {};
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("quadrature: non-finite integration limits");

  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;  // intervals too narrow to split further
  Segment first = kronrod15(f, a, b);
  double total = first.value;
  double total_err = first.error;
  int evaluations = 15;
  heap.push(first);
  int intervals = 1;

  auto target = [&] { return std::max(tol.abs, tol.rel * std::abs(total)); };
  while (!heap.empty() && total_err > target()) {
    if (intervals >= tol.max_intervals) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << a << ", " << b << "]: estimate " << total
          << ", error " << total_err;
      throw QuadratureError(msg.str(), total, total_err);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    evaluations += 30;
    ++intervals;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the incremental updates.
  double value = 0.0;
  double error = 0.0;
  for (const auto& s : frozen) {
    value += s.value;
    error += s.error;
  }
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  if (error > std::max(tol.abs, tol.rel * std::abs(value)) && !frozen.empty()) {
    std::ostringstream msg;
    msg << "quadrature stalled at machine resolution on [" << a << ", " << b << "]: estimate " << value
        << ", error " << error;
    throw QuadratureError(msg.str(), value, error);
  }
  return {value, error, evaluations};
}

Result integrate_endpoint_power(FunctionRef f, double length, double gamma, const Tolerance& tol) {
  if (length <= 0.0) return {};
  if (gamma <= -1.0) throw DomainError("quadrature: endpoint exponent must exceed -1");
  if (gamma == std::floor(gamma)) return integrate(f, 0.0, length, tol);
  // v = length * w^m with integer m keeps the smooth factor analytic in w and
  // leaves w^(m(1+gamma)-1), at least kEndpointSmoothness times differentiable.
  const int m = std::max(1, static_cast<int>(std::ceil((kEndpointSmoothness + 1.0) / (1.0 + gamma))));
  auto transformed = [&](double w) {
    double wm1 = 1.0;
    for (int i = 1; i < m; ++i) wm1 *= w;
    const double v = length * wm1 * w;
    if (v < std::numeric_limits<double>::min()) return 0.0;
    return f(v) * (m * length) * wm1;
  };
  return integrate(transformed, 0.0, 1.0, tol);
}

Result integrate_two_ended(FunctionRef left, FunctionRef right, double a, double b, double gamma_lo,
                           double gamma_hi, const Tolerance& tol) {
  if (b <= a) return {};
  const double half = 0.5 * (b - a);
  Tolerance part = tol;
  part.abs = 0.5 * tol.abs;
  const Result lo = integrate_endpoint_power(left, half, gamma_lo, part);
  const Result hi = integrate_endpoint_power(right, half, gamma_hi, part);
  return {lo.value + hi.value, lo.error + hi.error, lo.evaluations + hi.evaluations};
}

}  // namespace volterra::quad
