#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include "volterra/error.hpp"
#include "volterra/kernels.hpp"

using namespace volterra;

namespace {

KernelSpec spec(KernelFamily f, double H = 0.5, double a = 1.0, double T = 1.0) {
  KernelSpec k;
  k.family = f;
  k.hurst = H;
  k.mean_reversion = a;
  k.horizon = T;
  return k;
}

double fbm_covariance(double H, double t, double s) {
  return 0.5 * (std::pow(t, 2 * H) + std::pow(s, 2 * H) - std::pow(std::abs(t - s), 2 * H));
}

double mg_constant(double H) {
  return std::sqrt(2 * H * std::tgamma(1.5 - H) / (std::tgamma(H + 0.5) * std::tgamma(2 - 2 * H)));
}

// Molchan-Golosov kernel as an integral in u, by tanh-sinh. The second functor
// argument is the signed distance to the nearer endpoint, so u - s is exact.
double fbm_reference(double H, double t, double s) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double c = mg_constant(H);
  const double mid = 0.5 * (s + t);
  auto lag = [&](double u, double uc) { return u < mid ? -uc : u - s; };
  if (H > 0.5) {
    auto g = [&](double u, double uc) { return std::pow(u, H - 0.5) * std::pow(lag(u, uc), H - 1.5); };
    return c * (H - 0.5) * std::pow(s, 0.5 - H) * ts.integrate(g, s, t);
  }
  auto g = [&](double u, double uc) { return std::pow(u, H - 1.5) * std::pow(lag(u, uc), H - 0.5); };
  return c * (std::pow(t / s, H - 0.5) * std::pow(t - s, H - 0.5) - (H - 0.5) * std::pow(s, 0.5 - H) * ts.integrate(g, s, t));
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("fbm kernel against an independent quadrature") {
    for (double H : {0.1, 0.3, 0.7, 0.9}) {
      const Kernel k(spec(KernelFamily::fbm, H));
      for (auto [t, s] : {std::pair{1.0, 0.5}, {0.7, 0.1}, {0.3, 0.29}, {0.9, 0.02}}) {
        CAPTURE(H);
        CAPTURE(t);
        CAPTURE(s);
        CHECK(k.eval(t, s) == doctest::Approx(fbm_reference(H, t, s)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("frozen high-precision kernel values") {
    CHECK(Kernel(spec(KernelFamily::fbm, 0.3)).eval(1.0, 0.5) == doctest::Approx(0.873014114338668).epsilon(1e-12));
    CHECK(Kernel(spec(KernelFamily::fbm, 0.7)).eval(1.0, 0.5) == doctest::Approx(0.977140497393617).epsilon(1e-12));
    CHECK(Kernel(spec(KernelFamily::fbm, 0.3)).cross_covariance(1.0, 1.0) ==
          doctest::Approx(0.975803446836865).epsilon(1e-10));
    CHECK(Kernel(spec(KernelFamily::fractional_ou, 0.3)).eval(1.0, 0.5) ==
          doctest::Approx(0.462951044512614).epsilon(1e-10));
    CHECK(Kernel(spec(KernelFamily::fractional_ou, 0.7)).eval(1.0, 0.5) ==
          doctest::Approx(0.653124482721237).epsilon(1e-10));
  }

  TEST_CASE("fbm covariance matches the closed form") {
    for (double H : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const Kernel k(spec(KernelFamily::fbm, H));
      for (double t : {0.05, 0.4, 1.0})
        for (double s : {0.05, 0.35, 1.0}) CHECK(k.covariance(t, s) == doctest::Approx(fbm_covariance(H, t, s)).epsilon(1e-10));
    }
  }

  TEST_CASE("closed forms for brownian, OU and Riemann-Liouville") {
    const Kernel b(spec(KernelFamily::brownian));
    CHECK(b.eval(0.6, 0.2) == 1.0);
    CHECK(b.covariance(0.3, 0.8) == doctest::Approx(0.3));
    const Kernel ou(spec(KernelFamily::ornstein_uhlenbeck, 0.5, 2.0));
    CHECK(ou.eval(0.9, 0.4) == doctest::Approx(std::exp(-1.0)));
    CHECK(ou.covariance(0.9, 0.4) == doctest::Approx(std::exp(-2.0 * 1.3) * std::expm1(1.6) / 4.0).epsilon(1e-10));
    const double H = 0.3;
    const Kernel rl(spec(KernelFamily::riemann_liouville, H));
    CHECK(rl.eval(1.0, 0.5) == doctest::Approx(std::pow(0.5, H - 0.5) / std::tgamma(H + 0.5)));
    // C(t,t) = t^{2H} / (2H Gamma(H+1/2)^2)
    CHECK(rl.covariance(0.8, 0.8) ==
          doctest::Approx(std::pow(0.8, 2 * H) / (2 * H * std::pow(std::tgamma(H + 0.5), 2))).epsilon(1e-9));
    CHECK(rl.cell_integral(1.0, 0.2, 0.6) ==
          doctest::Approx((std::pow(0.8, H + 0.5) - std::pow(0.4, H + 0.5)) / std::tgamma(H + 1.5)).epsilon(1e-12));
  }

  TEST_CASE("cell integrals add up and respect the support") {
    const Kernel k(spec(KernelFamily::fractional_ou, 0.3, 1.5));
    const double whole = k.cell_integral(0.8, 0.0, 0.8);
    const double parts = k.cell_integral(0.8, 0.0, 0.3) + k.cell_integral(0.8, 0.3, 0.8);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-9));
    CHECK(k.cell_integral(0.5, 0.6, 0.9) == 0.0);
    CHECK(k.cell_integral(0.5, 0.2, 0.9) == doctest::Approx(k.cell_integral(0.5, 0.2, 0.5)));
    CHECK(k.eval(0.4, 0.6) == 0.0);
  }

  TEST_CASE("diagonal and origin conventions") {
    CHECK(Kernel(spec(KernelFamily::fbm, 0.3)).eval(0.5, 0.5) == 0.0);
    CHECK(Kernel(spec(KernelFamily::brownian)).eval(0.5, 0.5) == 1.0);
    CHECK(Kernel(spec(KernelFamily::fbm, 0.3)).diagonal_exponent() == doctest::Approx(-0.2));
    CHECK(Kernel(spec(KernelFamily::fbm, 0.7)).origin_exponent() == doctest::Approx(-0.2));
    CHECK(Kernel(spec(KernelFamily::riemann_liouville, 0.7)).origin_exponent() == 0.0);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(Kernel(spec(KernelFamily::fbm, 1.0)), ConfigError);
    CHECK_THROWS_AS(Kernel(spec(KernelFamily::fractional_ou, 0.3, -1.0)), ConfigError);
    CHECK_THROWS_AS(Kernel(spec(KernelFamily::brownian, 0.5, 1.0, 0.0)), ConfigError);
    CHECK_THROWS_AS(parse_kernel_family("fbn"), ConfigError);
    CHECK(parse_kernel_family("riemann_liouville") == KernelFamily::riemann_liouville);
    const Kernel k(spec(KernelFamily::fbm, 0.3));
    CHECK_THROWS_AS(k.eval(1.5, 0.2), DomainError);
    CHECK_THROWS_AS(k.cell_integral(0.5, 0.4, 0.2), DomainError);
  }

  TEST_CASE("rescaled kernel") {
    const double H = 0.3, T = 0.25;
    const Kernel k(spec(KernelFamily::riemann_liouville, H, 1.0, T));
    const Kernel r = k.rescaled(T, H);
    CHECK(r.horizon() == doctest::Approx(1.0));
    CHECK(r.eval(0.8, 0.3) == doctest::Approx(std::pow(T, 0.5 - H) * k.eval(0.8 * T, 0.3 * T)));
    CHECK(r.covariance(0.8, 0.5) == doctest::Approx(std::pow(T, -2 * H) * k.covariance(0.8 * T, 0.5 * T)).epsilon(1e-10));
    // RL is self-similar, so the rescaled kernel equals the unit-horizon one.
    const Kernel unit(spec(KernelFamily::riemann_liouville, H));
    CHECK(r.eval(0.8, 0.3) == doctest::Approx(unit.eval(0.8, 0.3)).epsilon(1e-13));
  }

  TEST_CASE("self-similarity defect separates the families") {
    CHECK(self_similarity_defect(Kernel(spec(KernelFamily::fbm, 0.3)), 0.5, 8) < 1e-10);
    CHECK(self_similarity_defect(Kernel(spec(KernelFamily::riemann_liouville, 0.7)), 0.5, 8) < 1e-12);
    CHECK(self_similarity_defect(Kernel(spec(KernelFamily::brownian)), 0.5, 8) == 0.0);
    CHECK(self_similarity_defect(Kernel(spec(KernelFamily::fractional_ou, 0.3)), 0.5, 8) > 0.01);
    CHECK(self_similarity_defect(Kernel(spec(KernelFamily::ornstein_uhlenbeck)), 0.5, 8) > 0.01);
  }

  TEST_CASE("modulus and Holder slope") {
    const double H = 0.3;
    const Kernel k(spec(KernelFamily::fbm, H));
    for (double h : {1e-3, 0.05, 0.3}) CHECK(modulus_l2(k, h, 5) == doctest::Approx(std::pow(h, 2 * H)).epsilon(1e-6));
    std::vector<double> hs;
    for (int i = 0; i < 7; ++i) hs.push_back(std::pow(10.0, -4.0 + i / 3.0));
    CHECK(holder_slope(Kernel(spec(KernelFamily::riemann_liouville, H)), hs, 11) == doctest::Approx(2 * H).epsilon(0.01));
    CHECK_THROWS_AS(holder_slope(k, std::vector<double>{1e-3, 2e-3}, 5), DomainError);
    CHECK_THROWS_AS(modulus_l2(k, 2.0, 5), DomainError);
  }

  TEST_CASE("covariance grid is symmetric") {
    const Kernel k(spec(KernelFamily::fractional_ou, 0.7));
    const std::vector<double> t{0.1, 0.4, 0.9};
    const auto g = covariance_grid(k, t);
    CHECK(g.matrix.isApprox(g.matrix.transpose(), 1e-15));
    CHECK(g.matrix(0, 2) == doctest::Approx(k.covariance(0.9, 0.1)));
  }
}
