#pragma once

namespace volterra {

double normal_cdf(double x) noexcept;

/// Undiscounted, zero-rate Black-Scholes call price.
double bs_call(double spot, double strike, double maturity, double vol);

/// Volatility reproducing a call price; safeguarded Newton on a bisection
/// bracket to 1e-10 in vol. Throws DomainError outside (spot - strike)^+ < price < spot.
double bs_implied_vol(double price, double spot, double strike, double maturity);

}  // namespace volterra
