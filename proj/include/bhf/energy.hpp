#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "bhf/grid.hpp"
#include "bhf/operators.hpp"

namespace bhf {

// Per-term values of one functional evaluation. total is the plain sum of the
// four terms; nonconvex is zero for the reduced functional.
struct EnergyBreakdown {
  double interaction = 0.0;     // (G_nu + k_nu eta)-quadratic form
  double field_trace = 0.0;     // Tr[|k| z^2 (1+z)^{-1}] term
  double weyl_quadratic = 0.0;  // <eta, |k| eta> term
  double nonconvex = 0.0;       // commutator trace term
  double total = 0.0;
  Normalization normalization = Normalization::body;
};

// Reduced functional. body coefficients (2 L^2, L, 4 L) are exactly 4x the
// intro coefficients (L^2/2, L/4, L).
EnergyBreakdown g_energy(const MomentumGrid& grid, const SymOperator& z,
                         const Eigen::VectorXd& eta, Normalization norm);

// Full functional: g_energy plus the non-convex commutator trace.
EnergyBreakdown e_full(const MomentumGrid& grid, const SymOperator& z,
                       const Eigen::VectorXd& eta, Normalization norm);

// Gradient with respect to the real HS inner product, on HS_0:
// body:  L|k| - (1+z)^{-1} L|k| (1+z)^{-1} - (1+z)^{-1} L^2 P_eta (1+z)^{-1}
SymOperator grad_z(const MomentumGrid& grid, const SymOperator& z,
                   const Eigen::VectorXd& eta, Normalization norm);

// 2 (T eta + psi) with T = 4L|k| + 2L^2 sum_nu k_nu (1+z)^{-1} k_nu and
// psi = 2L^2 sum_nu k_nu (1+z)^{-1} G_nu (body; intro is the quarter).
Eigen::VectorXd grad_eta(const MomentumGrid& grid, const SymOperator& z,
                         const Eigen::VectorXd& eta, Normalization norm);

// Unscaled functional on the shell S(sigma, lambda): coefficients
// (1/2, 1/4, 1) with the shell's own |k|, k_nu, G_nu. The scaling identity
// states it equals the intro-normalized rescaled functional on matched nodes.
EnergyBreakdown g_energy_unscaled(const MomentumGrid& shell, const SymOperator& z,
                                  const Eigen::VectorXd& eta);

// Full functional with the same Lambda-free coefficients (1/8, 1/2, 1/4, 1);
// along the rank-two counterexample family its increment is a quarter of the
// weight-free combination eprime below.
EnergyBreakdown e_full_unscaled(const MomentumGrid& grid, const SymOperator& z,
                                const Eigen::VectorXd& eta);

// Complex-mode evaluation (Hermitian z, complex eta) used by the J-invariance
// experiments; the functional value is real.
double g_energy_complex(const MomentumGrid& grid, const Eigen::MatrixXcd& z,
                        const Eigen::VectorXcd& eta, Normalization norm);

// The rank-two analysis evaluates the Lambda-weight-free combination
//   Tr[|k| z^2 R] + 1/2 (Tr[|k|^2 z^2 R] - sum_nu Tr[k_nu z k_nu z R]),
// with R = (1+z)^{-1}, on the rescaled grid.
double eprime(const MomentumGrid& grid, const SymOperator& z);

struct ScalingCheckReport {
  double max_rel_deviation = 0.0;  // worst |Gtilde - G| / max(|G|, 1) over trials
  double unitarity_defect = 0.0;   // worst |<phi f, phi h> - <f, h>| deviation
  int trials = 0;
  std::uint64_t seed = 0;
};

// Builds the unscaled grid on S(sigma, lambda) and the rescaled grid on
// S(sigma/lambda, 1), maps random (z, eta) through the dilation (which is the
// identity on orthonormal coordinates), and compares both functionals.
ScalingCheckReport scaling_identity_check(const GridConfig& config, int trials,
                                          std::uint64_t seed);

}  // namespace bhf
