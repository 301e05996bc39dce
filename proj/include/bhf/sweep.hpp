#pragma once

#include <vector>

#include "bhf/grid.hpp"
#include "bhf/solver.hpp"

namespace bhf {

// One (g, lambda, resolution) experiment outcome. Energies are body-normalized.
struct SweepRecord {
  double lambda = 0.0;
  double g = 0.0;
  double sigma = 0.0;
  int n_radial = 0, n_polar = 0, n_azimuth = 0;
  int n = 0;               // grid dimension
  double e_min = 0.0;      // minimized energy
  double e_trial = 0.0;    // reduced_energy(0), the trial-state energy
  double lower_bound = 0.0;    // 4 sqrt(pi/3) g L^{3/2}
  double paper_upper = 0.0;    // 4 sqrt(3 pi) g L^{3/2}
  double derived_upper = 0.0;  // 8 sqrt(pi) g L^{3/2}
  int iterations = 0;
  double wall_ms = 0.0;
  bool converged = false;
};

struct FitResult {
  double exponent = 0.0;   // slope of log e_min vs log lambda
  double prefactor = 0.0;  // exp(intercept)
  double r_squared = 0.0;
  double lambda_min_used = 0.0;
  double lambda_max_used = 0.0;
  int points_used = 0;
};

double lower_bound_constant();    // 4 sqrt(pi/3)
double paper_upper_constant();    // 4 sqrt(3 pi)
double derived_upper_constant();  // 8 sqrt(pi)

// The bound theorem's precondition lambda > 3/(8 pi g^2).
double bound_threshold_lambda(double g);

SweepRecord run_record(const GridConfig& config, const SolveConfig& solve);

// Records for each lambda, optionally in parallel; deterministic forces
// sequential execution and serial kernels. Output is ordered by lambda.
std::vector<SweepRecord> run_sweep(std::vector<double> lambdas, GridConfig base,
                                   const SolveConfig& solve, int jobs,
                                   bool deterministic);

// Least-squares slope of log e_min vs log lambda over the fit window: the
// records in the top half of the log-lambda range, widened to at least four
// points when the sweep has that many.
FitResult fit_exponent(const std::vector<SweepRecord>& records);

// Same regression over exactly the records with lambda >= geometric midpoint.
FitResult fit_exponent_top_half(const std::vector<SweepRecord>& records);

}  // namespace bhf
