#pragma once

#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

namespace volterra::quad {

/// Non-owning callable reference `double(double)`; cheap to pass by value.
class FunctionRef {
 public:
  template <class F, class = std::enable_if_t<!std::is_same_v<std::decay_t<F>, FunctionRef>>>
  FunctionRef(F&& f) noexcept  // NOLINT(google-explicit-constructor)
      : object_(const_cast<void*>(static_cast<const void*>(&f))),
        call_([](void* obj, double x) -> double {
          return (*static_cast<std::add_pointer_t<std::remove_reference_t<F>>>(obj))(x);
        }) {}

  double operator()(double x) const { return call_(object_, x); }

 private:
  void* object_;
  double (*call_)(void*, double);
};

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Fixed rule for integral over [0,1] of r^beta g(r), beta > -1, with g smooth.
struct JacobiRule {
  double beta = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double apply(F&& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * g(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Jacobi rule by the Golub-Welsch eigenvalue method.
JacobiRule gauss_jacobi_unit(double beta, int n);

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws QuadratureError when the
/// interval budget is exhausted before max(abs, rel*|value|) is met.
Result integrate(FunctionRef f, double a, double b, const Tolerance& tol = {});

/// Integral over [0, length] of f(v), where f(v) ~ v^gamma as v -> 0 with
/// gamma > -1. For non-integer gamma the substitution v = length w^m, with an
/// integer m large enough to leave a few continuous derivatives, runs before the
/// adaptive rule. f is called with the offset v itself so callers can keep it
/// free of cancellation.
Result integrate_endpoint_power(FunctionRef f, double length, double gamma,
                                const Tolerance& tol = {});

/// Integral over [a, b] with power behaviour (u-a)^gamma_lo at the left end and
/// (b-u)^gamma_hi at the right end. `left(v)` evaluates the integrand at
/// u = a + v, `right(v)` at u = b - v; the interval is split at its midpoint.
Result integrate_two_ended(FunctionRef left, FunctionRef right, double a, double b,
                           double gamma_lo, double gamma_hi, const Tolerance& tol = {});

}  // namespace volterra::quad
