#include <cmath>
#include <random>

#include <doctest.h>

#include "volterra/error.hpp"
#include "volterra/rate_solver.hpp"

using namespace volterra;

namespace {

Kernel make(KernelFamily f, double H = 0.5, double T = 1.0) {
  KernelSpec k;
  k.family = f;
  k.hurst = H;
  k.horizon = T;
  return Kernel(k);
}

SolverConfig config(std::size_t n = 32, std::size_t perturbations = 2) {
  SolverConfig c;
  c.n = n;
  c.perturbations = perturbations;
  return c;
}

}  // namespace

TEST_SUITE("rate_solver") {
  TEST_CASE("constant sigma reduces to the Gaussian rate") {
    const auto sigma = SigmaSpec::constant(0.2);
    for (auto f : {KernelFamily::brownian, KernelFamily::fbm, KernelFamily::riemann_liouville}) {
      for (double rho : {-0.7, 0.0, 0.7}) {
        for (double T : {1.0, 0.5}) {
          const Kernel k = make(f, 0.3, T);
          const double x = 0.1;
          CAPTURE(rho);
          CAPTURE(T);
          const auto r = rate_function(k, sigma, rho, x, config());
          CHECK(r.converged);
          CHECK(r.value == doctest::Approx(x * x / (2 * 0.04 * T)).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("rate at zero, evenness and monotonicity") {
    const Kernel k = make(KernelFamily::fbm, 0.3);
    const auto sigma = SigmaSpec::shifted_abs(0.2);
    const auto c = config(24, 2);
    CHECK(rate_function(k, sigma, 0.0, 0.0, c).value <= 1e-10);
    double prev = 0.0;
    for (double x : {0.05, 0.1, 0.2}) {
      const double up = rate_function(k, sigma, 0.0, x, c).value;
      const double down = rate_function(k, sigma, 0.0, -x, c).value;
      CHECK(up == doctest::Approx(down).epsilon(1e-8));
      CHECK(up >= prev - 1e-6);
      prev = up;
    }
  }

  TEST_CASE("correlation breaks the symmetry") {
    const Kernel k = make(KernelFamily::riemann_liouville, 0.3);
    const auto sigma = SigmaSpec::exponential(0.2, 1.0);
    const double up = rate_function(k, sigma, -0.7, 0.15, config()).value;
    const double down = rate_function(k, sigma, -0.7, -0.15, config()).value;
    CHECK(std::abs(up - down) > 1e-3 * up);
  }

  TEST_CASE("analytic gradient matches central differences") {
    const Kernel k = make(KernelFamily::fbm, 0.3);
    std::mt19937_64 gen(11);
    std::normal_distribution<double> d(0.0, 0.3);
    for (auto sigma : {SigmaSpec::exponential(0.2, 1.5), SigmaSpec::sqrt_linear(0.04, 0.5),
                       SigmaSpec::constant(0.25)}) {
      const RateProblem p(k, sigma, 0.4, 16);
      std::vector<double> fdot(16), ga, gf;
      for (auto& v : fdot) v = d(gen);
      const double va = p.objective_gradient(0.12, fdot, ga);
      const double vf = p.objective_fd_gradient(0.12, fdot, gf);
      CHECK(va == doctest::Approx(p.objective(0.12, fdot)));
      CHECK(vf == doctest::Approx(va));
      double scale = 0.0;
      for (double g : ga) scale = std::max(scale, std::abs(g));
      for (std::size_t j = 0; j < fdot.size(); ++j) CHECK(std::abs(ga[j] - gf[j]) <= 1e-6 * scale);
    }
    const RateProblem shifted(k, SigmaSpec::shifted_abs(0.2), 0.0, 8);
    std::vector<double> g;
    CHECK_THROWS_AS(shifted.objective_gradient(0.1, std::vector<double>(8, 0.1), g), DomainError);
  }

  TEST_CASE("lift agrees with the free function") {
    const Kernel k = make(KernelFamily::fbm, 0.7);
    const RateProblem p(k, SigmaSpec::constant(0.2), 0.0, 8);
    std::vector<double> fdot{0.3, -0.1, 0.2, 0.5, 0.0, -0.4, 0.1, 0.2};
    const auto a = p.lift(fdot);
    const auto b = lift_control(k, {p.grid(), fdot});
    REQUIRE(b.size() == 9);
    CHECK(b[0] == 0.0);
    for (std::size_t i = 0; i < 8; ++i) CHECK(a[i] == doctest::Approx(b[i + 1]).epsilon(1e-13));
    CHECK(objective(k, SigmaSpec::constant(0.2), 0.0, 0.1, {p.grid(), fdot}) ==
          doctest::Approx(p.objective(0.1, fdot)));
  }

  TEST_CASE("lift and objective closed forms") {
    const auto grid = PathGrid::uniform(1.0, 16);
    const auto b = lift_control(make(KernelFamily::brownian), {grid, std::vector<double>(16, 1.0)});
    for (std::size_t i = 0; i <= 16; ++i) CHECK(b[i] == doctest::Approx(grid.times[i]));
    const auto rl = lift_control(make(KernelFamily::riemann_liouville, 0.3), {grid, std::vector<double>(16, 1.0)});
    CHECK(rl.back() == doctest::Approx(1.0 / (0.8 * std::tgamma(0.8))).epsilon(1e-12));
    const auto zero = lift_control(make(KernelFamily::fbm, 0.3), {grid, std::vector<double>(16, 0.0)});
    for (double v : zero) CHECK(v == 0.0);

    const auto sigma = SigmaSpec::constant(0.2);
    CHECK(objective(make(KernelFamily::fbm, 0.7), sigma, 0.0, 0.1, {grid, std::vector<double>(16, 0.0)}) ==
          doctest::Approx(0.125));
    const double rho = -0.6, x = 0.1;
    const std::vector<double> linear(16, rho * x / 0.2);
    CHECK(objective(make(KernelFamily::brownian), sigma, rho, x, {grid, linear}) == doctest::Approx(0.125));
    CHECK(objective(make(KernelFamily::fbm, 0.3), SigmaSpec::exponential(0.2, 2.0), 0.4, 0.0,
                    {grid, std::vector<double>(16, 0.0)}) == 0.0);
  }

  TEST_CASE("grid refinement differences shrink") {
    const Kernel k = make(KernelFamily::fbm, 0.3);
    const auto sigma = SigmaSpec::exponential(0.2, 1.0);
    std::vector<double> values;
    for (std::size_t n : {32u, 64u, 128u, 256u}) values.push_back(rate_function(k, sigma, 0.0, 0.1, config(n, 0)).value);
    const double d1 = std::abs(values[0] - values[1]);
    const double d2 = std::abs(values[1] - values[2]);
    const double d3 = std::abs(values[2] - values[3]);
    CAPTURE(d1);
    CAPTURE(d2);
    CAPTURE(d3);
    CHECK(d2 < d1);
    CHECK(d3 < d2);
  }

  TEST_CASE("small-time rate by both routes") {
    const double H = 0.3, T = 0.5;
    const Kernel k = make(KernelFamily::fbm, H, T);
    const auto sigma = SigmaSpec::shifted_abs(0.2);
    const auto c = config(24, 2);
    const double direct = rate_function_hat(k, sigma, 0.0, H, 0.15, c, HatRoute::direct).value;
    const double scaled = rate_function_hat(k, sigma, 0.0, H, 0.15, c, HatRoute::scaling).value;
    CHECK(direct == doctest::Approx(scaled).epsilon(1e-3));
    // Independent of the horizon for a self-similar kernel.
    const double unit = rate_function_hat(make(KernelFamily::fbm, H, 1.0), sigma, 0.0, H, 0.15, c).value;
    CHECK(direct == doctest::Approx(unit).epsilon(1e-3));
    const double flat = rate_function_hat(k, SigmaSpec::constant(0.2), 0.0, H, 0.15, c).value;
    CHECK(flat == doctest::Approx(0.15 * 0.15 / (2 * 0.04)).epsilon(1e-6));
  }

  TEST_CASE("refinement records both grids; deterministic across threads") {
    const Kernel k = make(KernelFamily::fbm, 0.3);
    auto c = config(16, 3);
    c.refine = true;
    const auto r1 = rate_function(k, SigmaSpec::sqrt_linear(0.04, 1.0), 0.3, 0.1, c);
    c.threads = 4;
    const auto r4 = rate_function(k, SigmaSpec::sqrt_linear(0.04, 1.0), 0.3, 0.1, c);
    REQUIRE(r1.grid_refinement.size() == 2);
    CHECK(r1.grid_refinement[1].first == 32);
    CHECK(r1.value == r4.value);
    CHECK(r1.starts_tried == 4);
    CHECK(r1.fhat.size() == 16);
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(validate_rho(1.0), ConfigError);
    CHECK_THROWS_AS(RateProblem(make(KernelFamily::brownian), SigmaSpec::constant(-1.0), 0.0, 8), ConfigError);
    const RateProblem p(make(KernelFamily::brownian), SigmaSpec::constant(0.2), 0.0, 8);
    CHECK_THROWS_AS(p.objective(0.1, std::vector<double>(3)), DomainError);
  }
}
