#include "volterra/sigma.hpp"

#include <string>

#include "volterra/error.hpp"

namespace volterra {

std::string_view to_string(SigmaFamily family) noexcept {
  switch (family) {
    case SigmaFamily::constant: return "constant";
    case SigmaFamily::exponential: return "exponential";
    case SigmaFamily::shifted_abs: return "shifted_abs";
    case SigmaFamily::sqrt_linear: return "sqrt_linear";
  }
  return "unknown";
}

SigmaFamily parse_sigma_family(std::string_view name) {
  for (auto f : {SigmaFamily::constant, SigmaFamily::exponential, SigmaFamily::shifted_abs,
                 SigmaFamily::sqrt_linear}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("unknown sigma family '" + std::string(name) + "'");
}

void SigmaSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  switch (family) {
    case SigmaFamily::constant:
      if (!(sigma0 > 0.0 && finite(sigma0))) throw ConfigError("sigma.sigma0 must be positive");
      break;
    case SigmaFamily::exponential:
      if (!(sigma0 > 0.0 && finite(sigma0))) throw ConfigError("sigma.sigma0 must be positive");
      if (!finite(beta)) throw ConfigError("sigma.beta must be finite");
      break;
    case SigmaFamily::shifted_abs:
      if (!(delta > 0.0 && finite(delta))) throw ConfigError("sigma.delta must be positive");
      break;
    case SigmaFamily::sqrt_linear:
      if (!(c1 > 0.0 && finite(c1))) throw ConfigError("sigma.c1 must be positive");
      if (!(c2 >= 0.0 && finite(c2))) throw ConfigError("sigma.c2 must be non-negative");
      break;
  }
}

}  // namespace volterra
