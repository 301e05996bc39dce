#include "bhf/energy.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bhf/kernels.hpp"
#include "bhf/verify.hpp"

namespace bhf {

namespace {

struct Coefficients {
  double interaction;  // multiplies sum_nu <G+k eta, R (G+k eta)>
  double field;        // multiplies Tr[|k| z^2 R]
  double weyl;         // multiplies <eta, |k| eta>
  double nonconvex;    // multiplies Tr[|k|^2 z^2 R] - sum Tr[k z k z R]
};

Coefficients coefficients(double lambda, Normalization norm) {
  const double L2 = lambda * lambda;
  if (norm == Normalization::body)
    return {2.0 * L2, lambda, 4.0 * lambda, 0.5 * L2};
  return {0.5 * L2, 0.25 * lambda, lambda, 0.125 * L2};
}

// Spectral data of z shared by the evaluation paths. The field trace is
// summed per eigenvalue as lambda^2/(1+lambda), which avoids the cancellation
// in the algebraic identity z^2(1+z)^{-1} = z - 1 + (1+z)^{-1} for small z.
struct ZCache {
  SpectralFactorization f;

  ZCache(const SymOperator& z, double eps) : f(factorize(z)) {
    if (f.eigenvalues[0] < -eps)
      throw NotInDomainError(
          "energy: z leaves HS_eps, min eigenvalue " +
              std::to_string(f.eigenvalues[0]),
          f.eigenvalues[0]);
  }

  double field_trace(const Eigen::VectorXd& abs_k) const {
    const auto n = f.eigenvalues.size();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lam = f.eigenvalues[j];
      const double fj = lam * lam / (1.0 + lam);
      acc += fj * (f.eigenvectors.col(j).array().square() * abs_k.array()).sum();
    }
    return acc;
  }

  double quad_form_resolvent(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u = f.eigenvectors.transpose() * v;
    return (u.array().square() / (1.0 + f.eigenvalues.array())).sum();
  }

  Eigen::MatrixXd resolvent() const {
    return f.apply([](double x) { return 1.0 / (1.0 + x); });
  }

  Eigen::MatrixXd z_times_resolvent() const {
    return f.apply([](double x) { return x / (1.0 + x); });
  }
};

void check_dims(const MomentumGrid& grid, const SymOperator& z,
                const Eigen::VectorXd& eta, const char* where) {
  if (z.dim() != grid.dim || eta.size() != grid.dim)
    throw DimensionError(std::string(where) + ": grid dimension mismatch");
}

EnergyBreakdown evaluate(const MomentumGrid& grid, const SymOperator& z,
                         const Eigen::VectorXd& eta, const Coefficients& co,
                         Normalization norm, bool with_nonconvex) {
  const ZCache cache(z, kDefaultHsEps);

  EnergyBreakdown out;
  out.normalization = norm;

  double inter = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    Eigen::VectorXd v = grid.coupling[nu] + grid.k_comp[nu].cwiseProduct(eta);
    inter += cache.quad_form_resolvent(v);
  }
  out.interaction = co.interaction * inter;
  out.field_trace = co.field * cache.field_trace(grid.abs_k);
  out.weyl_quadratic = co.weyl * (eta.array().square() * grid.abs_k.array()).sum();

  if (with_nonconvex) {
    Eigen::MatrixXd W = cache.z_times_resolvent();
    out.nonconvex =
        co.nonconvex * kernels::commutator_trace(grid.abs_k, grid.k, z.mat(), W);
  }

  out.total = out.interaction + out.field_trace + out.weyl_quadratic + out.nonconvex;
  return out;
}

}  // namespace

EnergyBreakdown g_energy(const MomentumGrid& grid, const SymOperator& z,
                         const Eigen::VectorXd& eta, Normalization norm) {
  check_dims(grid, z, eta, "g_energy");
  return evaluate(grid, z, eta, coefficients(grid.config.lambda, norm), norm, false);
}

EnergyBreakdown e_full(const MomentumGrid& grid, const SymOperator& z,
                       const Eigen::VectorXd& eta, Normalization norm) {
  check_dims(grid, z, eta, "e_full");
  return evaluate(grid, z, eta, coefficients(grid.config.lambda, norm), norm, true);
}

EnergyBreakdown g_energy_unscaled(const MomentumGrid& shell, const SymOperator& z,
                                  const Eigen::VectorXd& eta) {
  check_dims(shell, z, eta, "g_energy_unscaled");
  return evaluate(shell, z, eta, {0.5, 0.25, 1.0, 0.125}, Normalization::intro,
                  false);
}

EnergyBreakdown e_full_unscaled(const MomentumGrid& grid, const SymOperator& z,
                                const Eigen::VectorXd& eta) {
  check_dims(grid, z, eta, "e_full_unscaled");
  return evaluate(grid, z, eta, {0.5, 0.25, 1.0, 0.125}, Normalization::intro,
                  true);
}

SymOperator grad_z(const MomentumGrid& grid, const SymOperator& z,
                   const Eigen::VectorXd& eta, Normalization norm) {
  check_dims(grid, z, eta, "grad_z");
  const auto co = coefficients(grid.config.lambda, norm);
  const ZCache cache(z, kDefaultHsEps);
  Eigen::MatrixXd R = cache.resolvent();

  // c_f (|k| - R |k| R) - (c_i / 2) R P_eta R
  Eigen::MatrixXd inner = (co.field * grid.abs_k).asDiagonal();
  std::array<Eigen::VectorXd, 3> v;
  for (int nu = 0; nu < 3; ++nu)
    v[nu] = grid.coupling[nu] + grid.k_comp[nu].cwiseProduct(eta);
  Eigen::MatrixXd P;
  kernels::rank3_projector(v, P);
  inner += (0.5 * co.interaction) * P;

  Eigen::MatrixXd g = -R * inner * R;
  g += Eigen::MatrixXd((co.field * grid.abs_k).asDiagonal());
  return SymOperator(std::move(g));
}

Eigen::VectorXd grad_eta(const MomentumGrid& grid, const SymOperator& z,
                         const Eigen::VectorXd& eta, Normalization norm) {
  check_dims(grid, z, eta, "grad_eta");
  const auto co = coefficients(grid.config.lambda, norm);
  const ZCache cache(z, kDefaultHsEps);
  Eigen::MatrixXd R = cache.resolvent();

  Eigen::MatrixXd T;
  kernels::coupling_metric(co.weyl, grid.abs_k, co.interaction, grid.k, R, T);

  Eigen::VectorXd psi = Eigen::VectorXd::Zero(grid.dim);
  for (int nu = 0; nu < 3; ++nu)
    psi += co.interaction * grid.k_comp[nu].cwiseProduct(R * grid.coupling[nu]);

  return 2.0 * (T * eta + psi);
}

double g_energy_complex(const MomentumGrid& grid, const Eigen::MatrixXcd& z,
                        const Eigen::VectorXcd& eta, Normalization norm) {
  if (z.rows() != grid.dim || z.cols() != grid.dim || eta.size() != grid.dim)
    throw DimensionError("g_energy_complex: grid dimension mismatch");
  const auto co = coefficients(grid.config.lambda, norm);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (z + z.adjoint()));
  if (es.info() != Eigen::Success)
    throw LinearSolveError("g_energy_complex: eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  if (lam[0] < -kDefaultHsEps)
    throw NotInDomainError("g_energy_complex: z leaves HS_eps", lam[0]);

  double inter = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    Eigen::VectorXcd v =
        grid.coupling[nu].cast<std::complex<double>>() +
        grid.k_comp[nu].cast<std::complex<double>>().cwiseProduct(eta);
    Eigen::VectorXcd u = es.eigenvectors().adjoint() * v;
    inter += (u.array().abs2() / (1.0 + lam.array())).sum();
  }

  double field = 0.0;
  for (int j = 0; j < grid.dim; ++j) {
    const double fj = lam[j] * lam[j] / (1.0 + lam[j]);
    field += fj *
             (es.eigenvectors().col(j).array().abs2() * grid.abs_k.array()).sum();
  }

  const double weyl = (eta.array().abs2() * grid.abs_k.array()).sum();
  return co.interaction * inter + co.field * field + co.weyl * weyl;
}

double eprime(const MomentumGrid& grid, const SymOperator& z) {
  if (z.dim() != grid.dim) throw DimensionError("eprime: dimension mismatch");
  const ZCache cache(z, kDefaultHsEps);
  const double field = cache.field_trace(grid.abs_k);
  Eigen::MatrixXd W = cache.z_times_resolvent();
  const double comm = kernels::commutator_trace(grid.abs_k, grid.k, z.mat(), W);
  return field + 0.5 * comm;
}

ScalingCheckReport scaling_identity_check(const GridConfig& config, int trials,
                                          std::uint64_t seed) {
  config.validate();
  MomentumGrid rescaled = build_grid(config);
  MomentumGrid shell = build_shell_grid(config, config.sigma, config.lambda);

  ScalingCheckReport report;
  report.trials = trials;
  report.seed = seed;

  const double L = config.lambda;
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = random_ops::substream(seed, trial);
    SymOperator z = (trial % 3 == 0)
                        ? SymOperator::from_diagonal(
                              random_ops::gaussian_vector(rescaled.dim, rng)
                                  .cwiseAbs())
                        : random_ops::random_hs_eps(rescaled.dim, rng, 0.2, 2.0);
    Eigen::VectorXd eta = random_ops::gaussian_vector(rescaled.dim, rng);

    // The dilation is the identity on orthonormal coordinates, so the same
    // (z, eta) arrays feed both functionals.
    const double lhs = g_energy_unscaled(shell, z, eta).total;
    const double rhs = g_energy(rescaled, z, eta, Normalization::intro).total;
    const double dev = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1.0);
    report.max_rel_deviation = std::max(report.max_rel_deviation, dev);

    // Weight bookkeeping of the dilation: node values f(K_i) embed as
    // f(K_i) sqrt(W_i) upstairs and Lambda^{3/2} f(Lambda k_i) sqrt(w_i)
    // downstairs; matching inner products means W_i = Lambda^3 w_i.
    Eigen::VectorXd fv = random_ops::gaussian_vector(rescaled.dim, rng);
    Eigen::VectorXd gv = random_ops::gaussian_vector(rescaled.dim, rng);
    const double up = (fv.array() * gv.array() * shell.weights.array()).sum();
    const double down = (fv.array() * gv.array() * L * L * L *
                         rescaled.weights.array())
                            .sum();
    const double defect = std::abs(up - down) / std::max(std::abs(up), 1.0);
    report.unitarity_defect = std::max(report.unitarity_defect, defect);
  }
  return report;
}

}  // namespace bhf
