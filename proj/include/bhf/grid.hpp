#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "bhf/errors.hpp"
#include "bhf/operators.hpp"

namespace bhf {

// The two coefficient conventions for the reduced functional. They differ by
// an exact factor of 4; `body` is canonical (the bound constants live there),
// `intro` is kept for the scaling identity.
enum class Normalization { body, intro };

struct GridConfig {
  double lambda = 8.0;  // cutoff ratio, >= 1
  double sigma = 0.1;   // infrared cutoff, in (0, 1)
  double g = 1.0;       // coupling constant, >= 0
  int n_radial = 6;
  int n_polar = 6;    // Gauss nodes in cos(theta); must be even so no node hits k3 = 0
  int n_azimuth = 6;  // uniform, must be even so the grid closes under phi -> phi + pi
  Normalization normalization = Normalization::body;

  void validate() const;  // throws ConfigError
};

// Antipodally symmetric quadrature discretization of the doubled momentum
// shell {r_min <= |k| <= r_max} x {+,-} in orthonormal coordinates: vectors
// carry sqrt(weight) factors, multiplication operators are diagonal arrays.
struct MomentumGrid {
  GridConfig config;
  double r_min = 0.0;
  double r_max = 1.0;
  int dim = 0;  // 2 * n_radial * n_polar * n_azimuth

  Eigen::Matrix3Xd k;        // node momenta, 3 x dim
  Eigen::VectorXd weights;   // positive quadrature weights
  Eigen::VectorXd abs_k;     // |k_i|
  std::array<Eigen::VectorXd, 3> k_comp;  // (k_i)_nu
  std::array<Eigen::VectorXd, 3> eps;     // polarization components eps_nu(k_i, tau_i)
  std::vector<int> tau;       // polarization sign, +1 / -1
  std::vector<int> antipode;  // fixed-point-free involution pairing (k, tau) with (-k, tau)

  // coupling vectors at the config's g, entries g |k|^{-1/2} eps_nu sqrt(w)
  std::array<Eigen::VectorXd, 3> coupling;

  // analytic volume of the doubled shell, 2 (4pi/3) (r_max^3 - r_min^3)
  double shell_volume() const;
};

// Rescaled grid on S(sigma/lambda, 1) x {+,-}.
MomentumGrid build_grid(const GridConfig& config);

// Same layout on an arbitrary shell [r_min, r_max]; used by the scaling
// identity, which pairs S(sigma, lambda) with S(sigma/lambda, 1).
MomentumGrid build_shell_grid(const GridConfig& config, double r_min, double r_max);

// (G_nu)_i = g |k_i|^{-1/2} eps_nu(k_i, tau_i) sqrt(w_i)
std::array<Eigen::VectorXd, 3> coupling_vectors(const MomentumGrid& grid, double g);

// J f (k, tau) = conj(f(-k, tau)); on real vectors this is the antipodal
// permutation.
Eigen::VectorXd apply_J(const MomentumGrid& grid, const Eigen::VectorXd& f);
Eigen::VectorXcd apply_J(const MomentumGrid& grid, const Eigen::VectorXcd& f);

// J z J, entrywise (i, j) -> conj(z[antipode(i), antipode(j)]).
SymOperator conjugate_by_J(const MomentumGrid& grid, const SymOperator& z);
Eigen::MatrixXcd conjugate_by_J(const MomentumGrid& grid, const Eigen::MatrixXcd& z);

// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending and exactly
// symmetric about 0.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace bhf
