#include "volterra/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "volterra/error.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rate_solver.hpp"

namespace volterra {

void ModelSpec::validate() const {
  kernel.validate();
  sigma.validate();
  validate_rho(rho);
  if (!(H > 0.0 && std::isfinite(H))) throw ConfigError("model.H must be positive");
  if (!(T > 0.0 && std::isfinite(T))) throw ConfigError("model.T must be positive");
  if (!(s0 > 0.0 && std::isfinite(s0))) throw ConfigError("model.s0 must be positive");
}

Kernel ModelSpec::make_kernel() const {
  validate();
  KernelSpec k = kernel;
  k.horizon = T;
  return Kernel(k);
}

LogPriceSimulator::LogPriceSimulator(const ModelSpec& model, const Kernel& kernel, PathGrid grid, int threads)
    : model_(model), sampler_(kernel, std::move(grid), threads) {}

void LogPriceSimulator::evaluate(const PathBlock& block, const std::vector<double>& eps,
                                 std::vector<LogPriceSamples>& out) const {
  const std::size_t n = block.n;
  const std::size_t count = block.paths;
  const double dt = grid().dt;
  const double rho = model_.rho;
  const double rho_bar = std::sqrt(1.0 - rho * rho);
  const SigmaSpec& sigma = model_.sigma;
  out.resize(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double scale = std::pow(eps[e], model_.H);
    const double root = std::sqrt(eps[e]);
    const double half_eps_dt = 0.5 * eps[e] * dt;
    auto& diff = out[e].driftless;
    auto& drift = out[e].drift;
    diff.assign(count, 0.0);
    drift.assign(count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* dw = block.dW.data() + i * count;
      const double* db = block.dB.data() + i * count;
      const double* left = i == 0 ? nullptr : block.bhat.data() + (i - 1) * count;
      for (std::size_t p = 0; p < count; ++p) {
        const double s = sigma(left == nullptr ? 0.0 : scale * left[p]);
        diff[p] += root * s * (rho_bar * dw[p] + rho * db[p]);
        drift[p] += half_eps_dt * s * s;
      }
    }
  }
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps values must lie in (0, 1]");
}

template <class Visit>
void for_each_block(const LogPriceSimulator& sim, std::size_t paths, std::uint64_t seed, int threads,
                    const std::vector<double>& eps, Visit&& visit) {
  const std::size_t blocks = (paths + kPathBlock - 1) / kPathBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t first = b * kPathBlock;
    const std::size_t count = std::min(kPathBlock, paths - first);
    PathBlock block;
    sim.sample(seed, first, count, block);
    std::vector<LogPriceSamples> terms;
    sim.evaluate(block, eps, terms);
    visit(b, first, terms);
  });
}

}  // namespace

LogPriceSamples simulate_logprice_terms(const ModelSpec& model, double eps, const PathGrid& grid,
                                        std::size_t paths, std::uint64_t seed, int threads) {
  check_eps(eps);
  if (paths == 0) throw ConfigError("paths must be at least 1");
  const Kernel kernel = model.make_kernel();
  const LogPriceSimulator sim(model, kernel, grid, threads);
  LogPriceSamples out;
  out.driftless.resize(paths);
  out.drift.resize(paths);
  for_each_block(sim, paths, seed, threads, {eps}, [&](std::size_t, std::size_t first, auto& terms) {
    std::copy(terms[0].driftless.begin(), terms[0].driftless.end(), out.driftless.begin() + first);
    std::copy(terms[0].drift.begin(), terms[0].drift.end(), out.drift.begin() + first);
  });
  return out;
}

std::vector<double> simulate_scaled_logprice(const ModelSpec& model, double eps, const PathGrid& grid,
                                             std::size_t paths, std::uint64_t seed, bool include_drift,
                                             int threads) {
  const LogPriceSamples terms = simulate_logprice_terms(model, eps, grid, paths, seed, threads);
  const double x0 = std::log(model.s0);
  std::vector<double> out(paths);
  for (std::size_t p = 0; p < paths; ++p)
    out[p] = x0 + (include_drift ? terms.driftless[p] - terms.drift[p] : terms.driftless[p]);
  return out;
}

MomentEstimate exponential_moment_mc(const Kernel& kernel, const PathGrid& grid, double a, double eps,
                                     std::size_t paths, std::uint64_t seed, int threads) {
  if (paths < 2) throw ConfigError("paths must be at least 2");
  const PathSampler sampler(kernel, grid, threads);
  const std::size_t blocks = (paths + kPathBlock - 1) / kPathBlock;
  std::vector<std::pair<double, double>> sums(blocks);
  const double scale = a * eps * grid.dt;
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t first = b * kPathBlock;
    const std::size_t count = std::min(kPathBlock, paths - first);
    PathBlock block;
    sampler.sample(seed, first, count, block);
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
      double energy = 0.0;
      for (std::size_t i = 0; i < block.n; ++i) {
        const double v = block.bhat[i * count + p];
        energy += (i + 1 == block.n ? 0.5 : 1.0) * v * v;
      }
      const double value = std::exp(scale * energy);
      s += value;
      s2 += value * value;
    }
    sums[b] = {s, s2};
  });
  double s = 0.0, s2 = 0.0;
  for (const auto& [v, v2] : sums) {
    s += v;
    s2 += v2;
  }
  const double n = static_cast<double>(paths);
  MomentEstimate out;
  out.mean = s / n;
  out.standard_error = std::sqrt(std::max(s2 / n - out.mean * out.mean, 0.0) / (n - 1.0));
  return out;
}

Regression ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw NumericalError("regression needs at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("regression abscissae are all equal");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.residuals.resize(m);
  for (std::size_t i = 0; i < m; ++i) r.residuals[i] = y[i] - (r.intercept + r.slope * x[i]);
  return r;
}

double runs_test_pvalue(const std::vector<double>& residuals) {
  std::vector<int> sign;
  for (double r : residuals)
    if (r != 0.0) sign.push_back(r > 0.0 ? 1 : -1);
  const double n1 = static_cast<double>(std::count(sign.begin(), sign.end(), 1));
  const double n2 = static_cast<double>(sign.size()) - n1;
  if (n1 == 0.0 || n2 == 0.0) return 1.0;
  double runs = 1.0;
  for (std::size_t i = 1; i < sign.size(); ++i)
    if (sign[i] != sign[i - 1]) runs += 1.0;
  const double total = n1 + n2;
  const double mean = 2.0 * n1 * n2 / total + 1.0;
  const double var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - total) / (total * total * (total - 1.0));
  if (!(var > 0.0)) return 1.0;
  return std::erfc(std::abs(runs - mean) / std::sqrt(2.0 * var));
}

std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw NumericalError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double p = 0.0;
  if (lambda < 0.2) {
    p = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      p += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-16) break;
    }
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

namespace {

void finish_estimate(LdpEstimate& est, double H) {
  const std::size_t m = est.eps_grid.size();
  std::vector<double> xs, ys;
  est.probabilities.resize(m);
  est.standard_errors.resize(m);
  est.scaled_logs.resize(m);
  est.usable.resize(m);
  const double paths = static_cast<double>(est.paths);
  for (std::size_t k = 0; k < m; ++k) {
    const double p = static_cast<double>(est.hits[k]) / paths;
    est.probabilities[k] = p;
    est.standard_errors[k] = std::sqrt(p * (1.0 - p) / paths);
    const double eps_2h = std::pow(est.eps_grid[k], 2.0 * H);
    est.scaled_logs[k] = est.hits[k] > 0 ? eps_2h * std::log(p) : std::nan("");
    est.usable[k] = est.hits[k] >= kMinHits;
    if (est.usable[k]) {
      xs.push_back(-1.0 / eps_2h);
      ys.push_back(std::log(p));
    }
  }
  if (xs.size() < 3) {
    std::ostringstream msg;
    msg << "only " << xs.size() << " eps values reached " << kMinHits << " hits; need at least 3";
    throw NumericalError(msg.str());
  }
  const Regression r = ols(xs, ys);
  est.slope_estimate = r.slope;
  est.intercept = r.intercept;
  est.runs_pvalue = runs_test_pvalue(r.residuals);
}

bool in_ray(double v, double y) { return y > 0.0 ? v > y : v < y; }

}  // namespace

LdpEstimate ldp_slope(const ModelSpec& model, double y, const std::vector<double>& eps_grid, std::size_t paths,
                      std::uint64_t seed, bool include_drift, std::size_t n_steps, int threads,
                      std::optional<double> theory) {
  if (y == 0.0 || !std::isfinite(y)) throw ConfigError("y must be finite and non-zero");
  if (eps_grid.empty()) throw ConfigError("eps grid is empty");
  for (double e : eps_grid) check_eps(e);
  if (paths == 0) throw ConfigError("paths must be at least 1");
  const Kernel kernel = model.make_kernel();
  const LogPriceSimulator sim(model, kernel, PathGrid::uniform(model.T, n_steps), threads);
  const std::size_t m = eps_grid.size();
  const std::size_t blocks = (paths + kPathBlock - 1) / kPathBlock;
  std::vector<std::vector<std::uint64_t>> block_hits(blocks, std::vector<std::uint64_t>(m, 0));
  std::vector<double> factor(m);
  for (std::size_t k = 0; k < m; ++k) factor[k] = std::pow(eps_grid[k], model.H - 0.5);
  for_each_block(sim, paths, seed, threads, eps_grid, [&](std::size_t b, std::size_t, auto& terms) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto& t = terms[k];
      std::uint64_t h = 0;
      for (std::size_t p = 0; p < t.driftless.size(); ++p) {
        const double x = include_drift ? t.driftless[p] - t.drift[p] : t.driftless[p];
        h += in_ray(factor[k] * x, y) ? 1 : 0;
      }
      block_hits[b][k] = h;
    }
  });
  LdpEstimate est;
  est.eps_grid = eps_grid;
  est.paths = paths;
  est.include_drift = include_drift;
  est.theory = theory;
  est.hits.assign(m, 0);
  for (const auto& bh : block_hits)
    for (std::size_t k = 0; k < m; ++k) est.hits[k] += bh[k];
  finish_estimate(est, model.H);
  return est;
}

double check_self_similarity_gate(const ModelSpec& model) {
  const Kernel kernel = model.make_kernel();
  const double defect = self_similarity_defect(kernel, 0.5, 8);
  if (!(defect <= kSelfSimilarityGate)) {
    std::ostringstream msg;
    msg << "kernel " << to_string(model.kernel.family) << " is not self-similar: defect " << defect
        << " exceeds gate " << kSelfSimilarityGate;
    throw GateError(msg.str(), defect);
  }
  if (!(model.H > 0.0 && model.H < 1.0)) throw ConfigError("small-time analysis needs model.H in (0,1)");
  const double index = model.kernel.self_similarity_index();
  if (std::abs(index - model.H) > 1e-12) {
    std::ostringstream msg;
    msg << "model.H = " << model.H << " differs from the kernel self-similarity index " << index;
    throw ConfigError(msg.str());
  }
  return defect;
}

LdpEstimate smalltime_check(const ModelSpec& model, double y, const std::vector<double>& t_grid,
                            std::size_t paths, std::uint64_t seed, std::size_t n_steps, int threads,
                            std::optional<double> theory) {
  const double defect = check_self_similarity_gate(model);
  if (y == 0.0 || !std::isfinite(y)) throw ConfigError("y must be finite and non-zero");
  if (t_grid.empty()) throw ConfigError("t grid is empty");
  for (double t : t_grid)
    if (!(t > 0.0 && t <= model.T)) throw ConfigError("maturities must lie in (0, T]");
  if (paths == 0) throw ConfigError("paths must be at least 1");
  const Kernel kernel = model.make_kernel();
  const std::size_t m = t_grid.size();
  const std::size_t blocks = (paths + kPathBlock - 1) / kPathBlock;

  LdpEstimate est;
  est.eps_grid = t_grid;
  est.paths = paths;
  est.theory = theory;
  est.self_similarity_defect = defect;
  est.hits.assign(m, 0);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = t_grid[k];
    const LogPriceSimulator sim(model, kernel, PathGrid::uniform(t, n_steps), threads);
    const double factor = std::pow(t, model.H - 0.5);
    std::vector<std::uint64_t> block_hits(blocks, 0);
    for_each_block(sim, paths, seed, threads, {1.0}, [&](std::size_t b, std::size_t, auto& terms) {
      std::uint64_t h = 0;
      for (std::size_t p = 0; p < terms[0].driftless.size(); ++p)
        h += in_ray(factor * (terms[0].driftless[p] - terms[0].drift[p]), y) ? 1 : 0;
      block_hits[b] = h;
    });
    for (auto h : block_hits) est.hits[k] += h;
  }
  finish_estimate(est, model.H);

  // X_T^{eps,H} against X_{eps T} on independent noise.
  const double eps = t_grid.back() / model.T;
  const std::size_t samples = std::min<std::size_t>(paths, 100000);
  const auto scaled =
      simulate_scaled_logprice(model, eps, PathGrid::uniform(model.T, n_steps), samples, seed + 1, true, threads);
  const auto direct = simulate_scaled_logprice(model, 1.0, PathGrid::uniform(eps * model.T, n_steps), samples,
                                               seed + 2, true, threads);
  std::tie(est.ks_statistic, est.ks_pvalue) = ks_two_sample(scaled, direct);
  return est;
}

}  // namespace volterra
