#include "volterra/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "volterra/error.hpp"

namespace volterra {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_call(double spot, double strike, double maturity, double vol) {
  if (!(spot > 0.0 && strike > 0.0 && maturity > 0.0 && vol >= 0.0))
    throw DomainError("Black-Scholes needs spot, strike, maturity > 0 and vol >= 0");
  const double sd = vol * std::sqrt(maturity);
  if (sd == 0.0) return std::max(spot - strike, 0.0);
  const double d1 = (std::log(spot / strike) + 0.5 * sd * sd) / sd;
  return spot * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

double bs_implied_vol(double price, double spot, double strike, double maturity) {
  if (!(spot > 0.0 && strike > 0.0 && maturity > 0.0)) throw DomainError("implied vol needs positive inputs");
  const double intrinsic = std::max(spot - strike, 0.0);
  if (!(price > intrinsic && price < spot)) {
    std::ostringstream msg;
    msg << "call price " << price << " outside the no-arbitrage band (" << intrinsic << ", " << spot << ")";
    throw DomainError(msg.str());
  }
  const double root_t = std::sqrt(maturity);
  double lo = 0.0;
  double hi = 1.0;
  while (bs_call(spot, strike, maturity, hi) < price) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) throw NumericalError("implied vol exceeds 1e4");
  }
  double vol = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double diff = bs_call(spot, strike, maturity, vol) - price;
    if (diff > 0.0) hi = vol; else lo = vol;
    const double sd = vol * root_t;
    const double d1 = (std::log(spot / strike) + 0.5 * sd * sd) / sd;
    const double vega = spot * root_t * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi);
    double next = vega > 0.0 ? vol - diff / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - vol);
    vol = next;
    if (step < 1e-12 || hi - lo < 1e-12) return vol;
  }
  if (hi - lo < 1e-10) return 0.5 * (lo + hi);
  throw NumericalError("implied vol iteration did not converge");
}

}  // namespace volterra
