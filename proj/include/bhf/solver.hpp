#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "bhf/energy.hpp"
#include "bhf/grid.hpp"
#include "bhf/operators.hpp"

namespace bhf {

struct SolveConfig {
  double tol_energy_rel = 1e-10;   // relative energy-decrease stopping threshold
  double tol_stationarity = 1e-8;  // reported, not gated on
  int max_iters = 200;
  enum class Order { eta_first, z_first };
  Order order = Order::eta_first;

  void validate() const;
};

struct MinimizeResult {
  SymOperator z;
  Eigen::VectorXd eta;
  EnergyBreakdown energy;
  int iterations = 0;
  std::vector<double> energy_trajectory;  // after every block update; non-increasing
  double stationarity_z = 0.0;
  double stationarity_eta = 0.0;
  double j_invariance_defect = 0.0;
  bool converged = false;
};

// Closed-form partial minimizer in z for fixed eta,
//   z_* = |k|^{-1/2} (|k|^{1/2} (L P_eta + |k|) |k|^{1/2})^{1/2} |k|^{-1/2} - 1.
// The minimizer is invariant under the overall factor between the two
// normalizations; the flag is accepted for interface symmetry.
SymOperator z_star(const MomentumGrid& grid, const Eigen::VectorXd& eta,
                   Normalization norm = Normalization::body);

// Closed-form partial minimizer in eta for fixed z: solves T eta = -psi with
// T >= 4 sigma symmetric positive definite.
Eigen::VectorXd eta_star(const MomentumGrid& grid, const SymOperator& z,
                         Normalization norm = Normalization::body);

// 2 L Tr[(L |k|^{1/2} P_eta |k|^{1/2} + |k|^2)^{1/2} - |k|] + 4 L <eta,|k| eta>
// in body normalization (a quarter of it in intro). Equals
// g_energy(z_star(eta), eta).total.
double reduced_energy(const MomentumGrid& grid, const Eigen::VectorXd& eta,
                      Normalization norm);

// Exact block coordinate descent from (0, 0). Never throws on reaching
// max_iters; the result carries converged = false instead.
MinimizeResult minimize(const MomentumGrid& grid, const SolveConfig& config,
                        Normalization norm);

// Same, from a caller-supplied feasible starting point (uniqueness probes).
MinimizeResult minimize_from(const MomentumGrid& grid, const SolveConfig& config,
                             Normalization norm, const SymOperator& z0,
                             const Eigen::VectorXd& eta0);

// Scaled residuals of the two stationarity equations:
//   first:  ||(1+z)|k|(1+z) - L P_eta - |k||| / ||L P_eta + |k|||   (HS norms)
//   second: ||T eta + psi|| / (||psi|| + ||T||_HS ||eta||)
std::pair<double, double> stationarity_residual(const MomentumGrid& grid,
                                                const SymOperator& z,
                                                const Eigen::VectorXd& eta,
                                                Normalization norm);

}  // namespace bhf
