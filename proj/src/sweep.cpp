#include "bhf/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "bhf/kernels.hpp"

namespace bhf {

namespace {
constexpr double kPi = std::numbers::pi;
}

double lower_bound_constant() { return 4.0 * std::sqrt(kPi / 3.0); }
double paper_upper_constant() { return 4.0 * std::sqrt(3.0 * kPi); }
double derived_upper_constant() { return 8.0 * std::sqrt(kPi); }

double bound_threshold_lambda(double g) {
  return 3.0 / (8.0 * kPi * g * g);
}

SweepRecord run_record(const GridConfig& config, const SolveConfig& solve) {
  const auto t0 = std::chrono::steady_clock::now();
  MomentumGrid grid = build_grid(config);

  SweepRecord rec;
  rec.lambda = config.lambda;
  rec.g = config.g;
  rec.sigma = config.sigma;
  rec.n_radial = config.n_radial;
  rec.n_polar = config.n_polar;
  rec.n_azimuth = config.n_azimuth;
  rec.n = grid.dim;

  rec.e_trial = reduced_energy(grid, Eigen::VectorXd::Zero(grid.dim),
                               Normalization::body);
  MinimizeResult result = minimize(grid, solve, Normalization::body);
  rec.e_min = result.energy.total;
  rec.iterations = result.iterations;
  rec.converged = result.converged;

  const double scale = config.g * std::pow(config.lambda, 1.5);
  rec.lower_bound = lower_bound_constant() * scale;
  rec.paper_upper = paper_upper_constant() * scale;
  rec.derived_upper = derived_upper_constant() * scale;

  const auto t1 = std::chrono::steady_clock::now();
  rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

std::vector<SweepRecord> run_sweep(std::vector<double> lambdas, GridConfig base,
                                   const SolveConfig& solve, int jobs,
                                   bool deterministic) {
  if (lambdas.size() < 2)
    throw ConfigError("sweep needs at least two lambda values");
  std::sort(lambdas.begin(), lambdas.end());

  const bool was_parallel = kernels::parallel_enabled();
  if (deterministic) kernels::set_parallel(false);

  std::vector<SweepRecord> records(lambdas.size());
  const auto count = static_cast<std::int64_t>(lambdas.size());
  if (deterministic || jobs <= 1) {
    for (std::int64_t i = 0; i < count; ++i) {
      GridConfig c = base;
      c.lambda = lambdas[i];
      records[i] = run_record(c, solve);
    }
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::int64_t i = 0; i < count; ++i) {
      GridConfig c = base;
      c.lambda = lambdas[i];
      records[i] = run_record(c, solve);
    }
  }

  kernels::set_parallel(was_parallel);
  return records;
}

namespace {

FitResult fit_over(const std::vector<SweepRecord>& window) {
  FitResult fit;
  fit.points_used = static_cast<int>(window.size());
  if (window.empty()) return fit;
  fit.lambda_min_used = window.front().lambda;
  fit.lambda_max_used = window.back().lambda;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(window.size());
  for (const auto& r : window) {
    const double x = std::log(r.lambda);
    const double y = std::log(r.e_min);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.prefactor = std::exp((sy - fit.exponent * sx) / n);
  const double ss_res = syy - sy * sy / n -
                        fit.exponent * fit.exponent * (sxx - sx * sx / n);
  const double ss_tot = syy - sy * sy / n;
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<SweepRecord> sorted_by_lambda(std::vector<SweepRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const SweepRecord& a, const SweepRecord& b) {
              return a.lambda < b.lambda;
            });
  return records;
}

}  // namespace

FitResult fit_exponent_top_half(const std::vector<SweepRecord>& records) {
  auto sorted = sorted_by_lambda(records);
  if (sorted.size() < 2) throw ConfigError("fit needs at least two records");
  const double mid =
      std::sqrt(sorted.front().lambda * sorted.back().lambda) * (1.0 - 1e-12);
  std::vector<SweepRecord> window;
  for (const auto& r : sorted)
    if (r.lambda >= mid) window.push_back(r);
  return fit_over(window);
}

FitResult fit_exponent(const std::vector<SweepRecord>& records) {
  auto sorted = sorted_by_lambda(records);
  if (sorted.size() < 4)
    throw ConfigError("fit needs at least four sweep records");
  const double mid =
      std::sqrt(sorted.front().lambda * sorted.back().lambda) * (1.0 - 1e-12);
  std::size_t first = sorted.size();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].lambda >= mid) {
      first = i;
      break;
    }
  }
  // widen the top-half window to at least four points
  first = std::min(first, sorted.size() - 4);
  return fit_over({sorted.begin() + first, sorted.end()});
}

}  // namespace bhf
