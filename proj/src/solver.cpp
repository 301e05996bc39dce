#include "bhf/solver.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bhf/kernels.hpp"

namespace bhf {

namespace {

// T = c_w |k| + c_i sum_nu k_nu R k_nu and psi = c_i sum_nu k_nu R G_nu with
// the body coefficients; the partial minimizer -T^{-1} psi is invariant under
// the overall factor between the normalizations.
void eta_system(const MomentumGrid& grid, const Eigen::MatrixXd& R,
                Eigen::MatrixXd& T, Eigen::VectorXd& psi) {
  const double L = grid.config.lambda;
  kernels::coupling_metric(4.0 * L, grid.abs_k, 2.0 * L * L, grid.k, R, T);
  psi = Eigen::VectorXd::Zero(grid.dim);
  for (int nu = 0; nu < 3; ++nu)
    psi += (2.0 * L * L) * grid.k_comp[nu].cwiseProduct(R * grid.coupling[nu]);
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& T, const Eigen::VectorXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(T);
  if (llt.info() != Eigen::Success)
    throw LinearSolveError("eta_star: metric not positive definite");
  Eigen::VectorXd x = llt.solve(rhs);
  x += llt.solve(rhs - T * x);  // one refinement step
  return x;
}

}  // namespace

void SolveConfig::validate() const {
  if (!(tol_energy_rel > 0.0) || !(tol_stationarity > 0.0))
    throw ConfigError("solver tolerances must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
}

SymOperator z_star(const MomentumGrid& grid, const Eigen::VectorXd& eta,
                   Normalization /*norm*/) {
  if (eta.size() != grid.dim) throw DimensionError("z_star: eta size mismatch");
  const double L = grid.config.lambda;

  SymOperator P = projector_P(grid, eta, grid.config.g);
  Eigen::VectorXd root_k = grid.abs_k.cwiseSqrt();

  Eigen::MatrixXd M;
  kernels::diag_sandwich(root_k, (L * P.mat()).eval(), M);
  M += Eigen::MatrixXd((grid.abs_k.array().square()).matrix().asDiagonal());

  SymOperator S = psd_sqrt(SymOperator(std::move(M)));

  Eigen::VectorXd inv_root_k = root_k.cwiseInverse();
  Eigen::MatrixXd Z;
  kernels::diag_sandwich(inv_root_k, S.mat(), Z);
  Z -= Eigen::MatrixXd::Identity(grid.dim, grid.dim);
  return SymOperator(std::move(Z));
}

Eigen::VectorXd eta_star(const MomentumGrid& grid, const SymOperator& z,
                         Normalization /*norm*/) {
  if (z.dim() != grid.dim) throw DimensionError("eta_star: dimension mismatch");
  Eigen::MatrixXd R = resolvent(z).mat();
  Eigen::MatrixXd T;
  Eigen::VectorXd psi;
  eta_system(grid, R, T, psi);
  return solve_spd(T, (-psi).eval());
}

double reduced_energy(const MomentumGrid& grid, const Eigen::VectorXd& eta,
                      Normalization norm) {
  if (eta.size() != grid.dim)
    throw DimensionError("reduced_energy: eta size mismatch");
  const double L = grid.config.lambda;

  SymOperator P = projector_P(grid, eta, grid.config.g);
  Eigen::VectorXd root_k = grid.abs_k.cwiseSqrt();
  Eigen::MatrixXd M;
  kernels::diag_sandwich(root_k, (L * P.mat()).eval(), M);
  M += Eigen::MatrixXd((grid.abs_k.array().square()).matrix().asDiagonal());
  SymOperator S = psd_sqrt(SymOperator(std::move(M)));

  const double trace_part = S.mat().trace() - grid.abs_k.sum();
  const double weyl = (eta.array().square() * grid.abs_k.array()).sum();
  const double body = 2.0 * L * trace_part + 4.0 * L * weyl;
  return norm == Normalization::body ? body : 0.25 * body;
}

std::pair<double, double> stationarity_residual(const MomentumGrid& grid,
                                                const SymOperator& z,
                                                const Eigen::VectorXd& eta,
                                                Normalization /*norm*/) {
  if (z.dim() != grid.dim || eta.size() != grid.dim)
    throw DimensionError("stationarity_residual: dimension mismatch");
  const double L = grid.config.lambda;

  // (1+z)|k|(1+z) = L P_eta + |k|
  Eigen::MatrixXd one_plus = z.mat();
  one_plus += Eigen::MatrixXd::Identity(grid.dim, grid.dim);
  Eigen::MatrixXd lhs = one_plus * grid.abs_k.asDiagonal() * one_plus;
  Eigen::MatrixXd rhs = L * projector_P(grid, eta, grid.config.g).mat();
  rhs += Eigen::MatrixXd(grid.abs_k.asDiagonal());
  const double res_z = (lhs - rhs).norm() / rhs.norm();

  Eigen::MatrixXd R = resolvent(z).mat();
  Eigen::MatrixXd T;
  Eigen::VectorXd psi;
  eta_system(grid, R, T, psi);
  // The eta floor keeps the scale meaningful when psi and eta both vanish
  // (the minimizer has eta = 0 on isotropy-preserving grids).
  const double scale = psi.norm() + T.norm() * std::max(eta.norm(), 1.0);
  const double res_eta = (T * eta + psi).norm() / scale;
  return {res_z, res_eta};
}

namespace {

MinimizeResult run_descent(const MomentumGrid& grid, const SolveConfig& config,
                           Normalization norm, SymOperator z, Eigen::VectorXd eta) {
  MinimizeResult result;
  result.energy = g_energy(grid, z, eta, norm);
  result.energy_trajectory.push_back(result.energy.total);

  const bool eta_first = config.order == SolveConfig::Order::eta_first;
  double prev = result.energy.total;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    if (eta_first) {
      eta = eta_star(grid, z, norm);
      result.energy_trajectory.push_back(g_energy(grid, z, eta, norm).total);
      z = z_star(grid, eta, norm);
    } else {
      z = z_star(grid, eta, norm);
      result.energy_trajectory.push_back(g_energy(grid, z, eta, norm).total);
      eta = eta_star(grid, z, norm);
    }
    result.energy = g_energy(grid, z, eta, norm);
    result.energy_trajectory.push_back(result.energy.total);
    result.iterations = iter;

    const double decrease = prev - result.energy.total;
    const double scale = std::max(std::abs(result.energy.total), 1e-300);
    if (decrease <= config.tol_energy_rel * scale) {
      result.converged = true;
      break;
    }
    prev = result.energy.total;
  }

  result.z = z;
  result.eta = eta;

  auto [rz, re] = stationarity_residual(grid, z, eta, norm);
  result.stationarity_z = rz;
  result.stationarity_eta = re;

  const SymOperator zj = conjugate_by_J(grid, z);
  const Eigen::VectorXd etaj = apply_J(grid, eta);
  const double z_defect =
      (zj.mat() - z.mat()).norm() / std::max(hs_norm(z), 1e-300);
  const double eta_defect = (etaj - eta).norm() / std::max(eta.norm(), 1.0);
  result.j_invariance_defect = std::max(z_defect, eta_defect);
  return result;
}

}  // namespace

MinimizeResult minimize(const MomentumGrid& grid, const SolveConfig& config,
                        Normalization norm) {
  config.validate();
  if (grid.config.g == 0.0) {
    // Free field: (0, 0) is the exact minimizer.
    MinimizeResult result;
    result.z = SymOperator::zero(grid.dim);
    result.eta = Eigen::VectorXd::Zero(grid.dim);
    result.energy = g_energy(grid, result.z, result.eta, norm);
    result.energy_trajectory = {result.energy.total};
    result.iterations = 1;
    result.converged = true;
    return result;
  }
  return run_descent(grid, config, norm, SymOperator::zero(grid.dim),
                     Eigen::VectorXd::Zero(grid.dim));
}

MinimizeResult minimize_from(const MomentumGrid& grid, const SolveConfig& config,
                             Normalization norm, const SymOperator& z0,
                             const Eigen::VectorXd& eta0) {
  config.validate();
  if (z0.dim() != grid.dim || eta0.size() != grid.dim)
    throw DimensionError("minimize_from: start dimension mismatch");
  if (!z0.is_hs_eps(kDefaultHsEps))
    throw NotInDomainError("minimize_from: start outside HS_eps",
                           z0.min_eigenvalue());
  return run_descent(grid, config, norm, z0, eta0);
}

}  // namespace bhf
