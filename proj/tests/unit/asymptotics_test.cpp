#include <cmath>

#include <doctest.h>

#include "volterra/asymptotics.hpp"
#include "volterra/black_scholes.hpp"
#include "volterra/error.hpp"

using namespace volterra;

namespace {

ModelSpec model(KernelFamily f, double H, SigmaSpec sigma, double T = 1.0) {
  ModelSpec m;
  m.kernel.family = f;
  m.kernel.hurst = H;
  m.sigma = sigma;
  m.H = f == KernelFamily::brownian ? 0.5 : H;
  m.T = T;
  return m;
}

SolverConfig small() {
  SolverConfig c;
  c.n = 24;
  c.perturbations = 2;
  return c;
}

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("Black-Scholes inversion") {
    const double price = bs_call(1.0, 1.0, 1.0, 0.2);
    CHECK(bs_implied_vol(price, 1.0, 1.0, 1.0) == doctest::Approx(0.2).epsilon(1e-9));
    // At the money: C = S (2 Phi(sigma sqrt(T) / 2) - 1).
    for (double s : {0.05, 0.2, 0.8}) {
      const double atm = 2.0 * normal_cdf(s * std::sqrt(0.5) / 2.0) - 1.0;
      CHECK(std::abs(bs_implied_vol(atm, 1.0, 1.0, 0.5) - s) < 1e-9);
    }
    for (double strike : {0.92, 1.08}) {
      const double p = bs_call(1.0, strike, 0.02, 0.35);
      CHECK(std::abs(bs_implied_vol(p, 1.0, strike, 0.02) - 0.35) < 1e-9);
    }
    CHECK_THROWS_AS(bs_implied_vol(0.25, 1.25, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(bs_implied_vol(1.0, 1.0, 1.0, 1.0), DomainError);
  }

  TEST_CASE("constant sigma asymptotes") {
    const auto m = model(KernelFamily::brownian, 0.5, SigmaSpec::constant(0.2));
    CHECK(binary_asymptote(m, 0.1, Regime::small_noise, small()) == doctest::Approx(-0.125).epsilon(1e-6));
    CHECK(binary_asymptote(m, -0.1, Regime::small_noise, small()) == doctest::Approx(-0.125).epsilon(1e-6));
    CHECK(binary_asymptote(m, 0.3, Regime::small_time, small()) == doctest::Approx(-0.09 / 0.08).epsilon(1e-6));
    const auto call = call_put_asymptote(m, 0.1, Regime::small_noise, OptionKind::call, small());
    CHECK(call.kind == OptionKind::call);
    CHECK(call.value == doctest::Approx(-0.125).epsilon(1e-6));
    CHECK(call_put_asymptote(m, -0.1, Regime::small_noise, OptionKind::put, small()).kind == OptionKind::put);
    CHECK_THROWS_AS(call_put_asymptote(m, 0.1, Regime::small_noise, OptionKind::put, small()), ConfigError);
    CHECK_THROWS_AS(binary_asymptote(m, 0.0, Regime::small_noise, small()), ConfigError);
    for (double y : {-0.2, 0.05, 0.3}) {
      CHECK(std::abs(implied_vol_limit(m, y, Regime::small_time, small()) - 0.2) < 1e-6);
      CHECK(std::abs(implied_vol_limit(m, y, Regime::small_noise, small()) - 0.2) < 1e-6);
    }
    const auto longer = model(KernelFamily::fbm, 0.3, SigmaSpec::constant(0.2), 2.0);
    CHECK(implied_vol_limit(longer, 0.1, Regime::small_noise, small()) ==
          doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("growth warning for the exponential family") {
    const auto m = model(KernelFamily::fbm, 0.3, SigmaSpec::exponential(0.2, 1.0));
    const auto a = call_put_asymptote(m, 0.1, Regime::small_noise, OptionKind::call, small());
    CHECK(a.growth_warning);
    CHECK(a.value == doctest::Approx(binary_asymptote(m, 0.1, Regime::small_noise, small())));
  }

  TEST_CASE("smile table") {
    const auto m = model(KernelFamily::fbm, 0.3, SigmaSpec::shifted_abs(0.2));
    const auto t = smile(m, {-0.15, 0.0, 0.15}, Regime::small_time, small());
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[1].flag == "y_zero");
    CHECK(std::isnan(t.rows[1].ivol_limit));
    CHECK(t.rows[0].flag == "put");
    CHECK(t.rows[2].flag == "call");
    CHECK(std::abs(t.rows[0].ivol_limit - t.rows[2].ivol_limit) < 1e-6);
    CHECK(t.rows[2].binary == doctest::Approx(-t.rows[2].I_hat));

    const auto flat = smile(model(KernelFamily::riemann_liouville, 0.3, SigmaSpec::constant(0.2)), {-0.1, 0.2},
                            Regime::small_time, small());
    for (const auto& r : flat.rows) CHECK(std::abs(r.ivol_limit - 0.2) < 1e-6);

    const auto fou = model(KernelFamily::fractional_ou, 0.3, SigmaSpec::constant(0.2));
    CHECK_THROWS_AS(smile(fou, {0.1}, Regime::small_time, small()), GateError);
    const auto noise = smile(fou, {0.1}, Regime::small_noise, small());
    CHECK(std::isnan(noise.rows[0].I_hat));
    CHECK(noise.rows[0].flag == "call");
  }

  TEST_CASE("Monte Carlo implied vol for constant sigma") {
    const auto m = model(KernelFamily::brownian, 0.5, SigmaSpec::constant(0.2));
    const auto v = mc_implied_vol(m, 0.1, Regime::small_noise, 0.1, 100000, 3, 4, 4);
    CHECK(v.maturity == doctest::Approx(0.1));
    CHECK(v.implied_vol == doctest::Approx(0.2).epsilon(0.03));
    const auto rl = model(KernelFamily::riemann_liouville, 0.3, SigmaSpec::constant(0.2));
    const auto st = mc_implied_vol(rl, -0.1, Regime::small_time, 0.05, 100000, 4, 8, 4);
    CHECK(st.strike == doctest::Approx(std::exp(-0.1 * std::pow(0.05, 0.2))));
    CHECK(st.implied_vol == doctest::Approx(0.2).epsilon(0.03));
  }
}
