#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "bhf/energy.hpp"
#include "bhf/solver.hpp"
#include "bhf/verify.hpp"

using namespace bhf;

namespace {

GridConfig config(double lambda, double sigma, double g, int nr, int nth, int nph) {
  GridConfig c;
  c.lambda = lambda;
  c.sigma = sigma;
  c.g = g;
  c.n_radial = nr;
  c.n_polar = nth;
  c.n_azimuth = nph;
  return c;
}

// oracle: projected gradient descent over z at fixed eta (Barzilai-Borwein
// steps with backtracking), independent of the closed-form route
double pgd_min_energy(const MomentumGrid& grid, const Eigen::VectorXd& eta,
                      int max_iters) {
  SymOperator z = SymOperator::zero(grid.dim);
  double energy = g_energy(grid, z, eta, Normalization::body).total;
  double step = 1.0;
  SymOperator prev_grad = z, prev_z = z;
  bool have_prev = false;
  for (int it = 0; it < max_iters; ++it) {
    SymOperator g = grad_z(grid, z, eta, Normalization::body);
    if (have_prev) {
      Eigen::MatrixXd dz = z.mat() - prev_z.mat();
      Eigen::MatrixXd dg = g.mat() - prev_grad.mat();
      const double den = (dz.array() * dg.array()).sum();
      if (den > 1e-300) step = (dz.array() * dz.array()).sum() / den;
    }
    prev_z = z;
    prev_grad = g;
    for (int bt = 0; bt < 60; ++bt) {
      auto f = factorize(SymOperator(z.mat() - step * g.mat()));
      SymOperator zc(f.apply([](double x) { return x > 0.0 ? x : 0.0; }));
      const double ec = g_energy(grid, zc, eta, Normalization::body).total;
      if (ec <= energy + 1e-14 * std::abs(energy)) {
        z = zc;
        energy = ec;
        have_prev = true;
        break;
      }
      step *= 0.5;
    }
  }
  return energy;
}

// oracle: conjugate gradients on the eta-quadratic, with the operator applied
// only through grad_eta differences
Eigen::VectorXd cg_min_eta(const MomentumGrid& grid, const SymOperator& z,
                           int max_iters) {
  const int n = grid.dim;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd g0 = grad_eta(grid, z, zero, Normalization::body);
  auto apply_T = [&](const Eigen::VectorXd& v) {
    return (0.5 * (grad_eta(grid, z, v, Normalization::body) - g0)).eval();
  };
  const Eigen::VectorXd rhs = -0.5 * g0;  // T eta = -psi

  Eigen::VectorXd eta = zero, r = rhs, p = rhs;
  double rs = r.squaredNorm();
  for (int it = 0; it < max_iters && rs > 1e-26 * rhs.squaredNorm(); ++it) {
    Eigen::VectorXd Tp = apply_T(p);
    const double alpha = rs / p.dot(Tp);
    eta += alpha * p;
    r -= alpha * Tp;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return eta;
}

}  // namespace

TEST_CASE("partial-minimizer algebra on a one-dimensional toy") {
  // |k| = 1, L P_eta = 3: z_* = sqrt(3 + 1) - 1 = 1 solves (1+z)|k|(1+z) = 4
  SymOperator m(3.0 * Eigen::MatrixXd::Identity(1, 1) +
                Eigen::MatrixXd::Identity(1, 1));
  SymOperator root = psd_sqrt(m);
  const double z = root.mat()(0, 0) - 1.0;
  CHECK(z == doctest::Approx(1.0));
  CHECK((1.0 + z) * 1.0 * (1.0 + z) == doctest::Approx(3.0 + 1.0));
}

TEST_CASE("z_star: free field, positivity, stationarity, spectrum") {
  // g = 0 makes P vanish and z_* = 0
  MomentumGrid free_grid = build_grid(config(8, 0.2, 0, 2, 2, 8));
  SymOperator zf = z_star(free_grid, Eigen::VectorXd::Zero(free_grid.dim));
  CHECK(hs_norm(zf) < 1e-12);

  MomentumGrid grid = build_grid(config(16, 0.1, 1, 4, 4, 6));
  const int n = grid.dim;
  const Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(n);
  SymOperator z0 = z_star(grid, eta0);

  CHECK(z0.min_eigenvalue() >= -1e-10);
  auto [rz, re] = stationarity_residual(grid, z0, eta0, Normalization::body);
  CHECK(rz <= 1e-8);

  // the normalization flag does not change the minimizer
  SymOperator z0i = z_star(grid, eta0, Normalization::intro);
  CHECK((z0.mat() - z0i.mat()).norm() == 0.0);

  // spectrum concentrates on three dominant eigenvalues; the square root of
  // a rank-three update is itself not rank three, so a genuine tail remains
  auto f = factorize(z0);
  CHECK(f.eigenvalues[n - 1] == doctest::Approx(f.eigenvalues[n - 3]).epsilon(1e-9));
  CHECK(f.eigenvalues[n - 4] < 0.02 * f.eigenvalues[n - 1]);
  CHECK(f.eigenvalues[n - 4] > 1e-10 * f.eigenvalues[n - 1]);

  // trace-class control from the root bound:
  // Tr[|k| z_*] <= Tr[(L |k|^{1/2} P_0 |k|^{1/2})^{1/2}]
  const double weighted_trace =
      (grid.abs_k.array() * z0.mat().diagonal().array()).sum();
  SymOperator P0 = projector_P(grid, eta0, grid.config.g);
  Eigen::VectorXd rk = grid.abs_k.cwiseSqrt();
  Eigen::MatrixXd K =
      rk.asDiagonal() * (grid.config.lambda * P0.mat()) * rk.asDiagonal();
  CHECK(weighted_trace <= trace(psd_sqrt(SymOperator(K))) + 1e-10);

  // random eta keeps the stationarity equation satisfied
  for (int t = 0; t < 5; ++t) {
    auto rng = random_ops::substream(61, t);
    Eigen::VectorXd eta = random_ops::gaussian_vector(n, rng);
    SymOperator zs = z_star(grid, eta);
    auto [rze, ree] = stationarity_residual(grid, zs, eta, Normalization::body);
    CHECK(rze <= 1e-8);
    CHECK(zs.min_eigenvalue() >= -1e-10 * op_norm(zs));
  }
}

TEST_CASE("eta_star: transversality zeros and solve residuals") {
  MomentumGrid grid = build_grid(config(8, 0.2, 1.2, 2, 4, 6));
  const int n = grid.dim;

  // psi vanishes at z = 0, so eta_*(0) = 0
  CHECK(eta_star(grid, SymOperator::zero(n)).norm() < 1e-12);

  // g = 0 makes psi proportional to G = 0
  MomentumGrid free_grid = build_grid(config(8, 0.2, 0, 2, 4, 6));
  auto rng0 = random_ops::substream(62, 0);
  SymOperator zr = random_ops::random_psd(free_grid.dim, rng0);
  CHECK(eta_star(free_grid, zr).norm() < 1e-14);

  for (int t = 0; t < 5; ++t) {
    auto rng = random_ops::substream(63, t);
    SymOperator z = random_ops::random_psd(n, rng, 1e-2, 2.0);
    Eigen::VectorXd eta = eta_star(grid, z);
    // gradient vanishes at the partial minimizer
    const Eigen::VectorXd g = grad_eta(grid, z, eta, Normalization::body);
    const double scale =
        grad_eta(grid, z, Eigen::VectorXd::Zero(n), Normalization::body).norm() +
        1.0;
    CHECK(g.norm() <= 1e-9 * scale);
    auto [rz, re] = stationarity_residual(grid, z, eta, Normalization::body);
    CHECK(re <= 1e-9);
    // the normalization flag does not change the minimizer
    CHECK((eta - eta_star(grid, z, Normalization::intro)).norm() == 0.0);
  }
}

TEST_CASE("reduced functional equals the energy at the partial minimizer") {
  MomentumGrid grid = build_grid(config(12, 0.15, 0.9, 4, 4, 6));
  const int n = grid.dim;
  for (int t = 0; t < 8; ++t) {
    auto rng = random_ops::substream(64, t);
    Eigen::VectorXd eta = random_ops::gaussian_vector(n, rng);
    if (t == 0) eta.setZero();
    for (auto norm : {Normalization::body, Normalization::intro}) {
      const double reduced = reduced_energy(grid, eta, norm);
      const double direct = g_energy(grid, z_star(grid, eta), eta, norm).total;
      CHECK(reduced == doctest::Approx(direct).epsilon(1e-8));
    }
  }

  // g = 0 collapses the trial energy to zero
  MomentumGrid free_grid = build_grid(config(8, 0.2, 0, 2, 2, 8));
  CHECK(reduced_energy(free_grid, Eigen::VectorXd::Zero(free_grid.dim),
                       Normalization::body) == doctest::Approx(0.0));
}

TEST_CASE("minimize: descent, convergence, trial state, J-invariance") {
  MomentumGrid grid = build_grid(config(8, 0.2, 1, 2, 4, 6));
  SolveConfig sc;
  auto result = minimize(grid, sc, Normalization::body);

  CHECK(result.converged);
  CHECK(result.iterations <= sc.max_iters);

  // non-increasing within 1e-12 relative jitter
  const auto& traj = result.energy_trajectory;
  REQUIRE(traj.size() >= 3);
  for (std::size_t i = 1; i < traj.size(); ++i)
    CHECK(traj[i] <= traj[i - 1] + 1e-12 * std::abs(traj[i - 1]));

  // the first block iterate is the trial state (z_*(0), 0)
  const double trial =
      reduced_energy(grid, Eigen::VectorXd::Zero(grid.dim), Normalization::body);
  CHECK(traj[1] == doctest::Approx(traj[0]).epsilon(1e-12));  // eta step is a no-op
  CHECK(traj[2] == doctest::Approx(trial).epsilon(1e-10));
  CHECK(result.energy.total <= trial * (1.0 + 1e-9));

  CHECK(result.stationarity_z <= 1e-8);
  CHECK(result.stationarity_eta <= 1e-9);
  CHECK(result.j_invariance_defect <= 1e-6);
  CHECK(result.z.min_eigenvalue() >= -1e-10 * std::max(op_norm(result.z), 1.0));

  // free field short-circuits to the exact minimizer
  MomentumGrid free_grid = build_grid(config(8, 0.2, 0, 2, 2, 8));
  auto free_result = minimize(free_grid, sc, Normalization::body);
  CHECK(free_result.energy.total == 0.0);
  CHECK(free_result.iterations <= 2);
  CHECK(free_result.converged);
}

TEST_CASE("minimize: distinct random starts land on the same minimizer") {
  MomentumGrid grid = build_grid(config(8, 0.2, 1, 2, 2, 8));
  const int n = grid.dim;
  SolveConfig sc;
  sc.tol_energy_rel = 1e-12;
  sc.max_iters = 400;

  MinimizeResult runs[2];
  for (int t = 0; t < 2; ++t) {
    auto rng = random_ops::substream(1234, t);
    SymOperator z0 = random_ops::random_psd(n, rng, 1e-2, 2.0);
    Eigen::VectorXd eta0 = random_ops::gaussian_vector(n, rng);
    runs[t] = minimize_from(grid, sc, Normalization::body, z0, eta0);
    CHECK(runs[t].converged);
  }
  const double scale = std::max(hs_norm(runs[0].z), 1.0);
  CHECK((runs[0].z.mat() - runs[1].z.mat()).norm() <= 1e-6 * scale);
  CHECK((runs[0].eta - runs[1].eta).norm() <= 1e-6 * scale);

  // z_first ordering reaches the same energy
  SolveConfig scz = sc;
  scz.order = SolveConfig::Order::z_first;
  auto zfirst = minimize(grid, scz, Normalization::body);
  auto efirst = minimize(grid, sc, Normalization::body);
  CHECK(zfirst.energy.total ==
        doctest::Approx(efirst.energy.total).epsilon(1e-10));
}

TEST_CASE("stationarity residual flags unminimized points") {
  MomentumGrid grid = build_grid(config(8, 0.2, 1, 2, 2, 8));
  const int n = grid.dim;
  auto [rz, re] = stationarity_residual(grid, SymOperator::zero(n),
                                        Eigen::VectorXd::Zero(n),
                                        Normalization::body);
  // at (0, 0) the z-equation misses by exactly L P_0
  SymOperator P0 = projector_P(grid, Eigen::VectorXd::Zero(n), grid.config.g);
  Eigen::MatrixXd rhs = grid.config.lambda * P0.mat();
  rhs += Eigen::MatrixXd(grid.abs_k.asDiagonal());
  const double expected = grid.config.lambda * P0.mat().norm() / rhs.norm();
  CHECK(rz == doctest::Approx(expected).epsilon(1e-12));
  CHECK(rz > 0.1);
  CHECK(re < 1e-12);  // transversality: eta = 0 solves the eta-equation at z = 0
}

TEST_CASE("projected-gradient oracle agrees with the closed-form z_star") {
  MomentumGrid grid = build_grid(config(4, 0.3, 1, 2, 2, 8));  // N = 64
  for (int t = 0; t < 4; ++t) {
    auto rng = random_ops::substream(77, t);
    Eigen::VectorXd eta = random_ops::gaussian_vector(grid.dim, rng);
    const double closed =
        g_energy(grid, z_star(grid, eta), eta, Normalization::body).total;
    const double pgd = pgd_min_energy(grid, eta, 200);
    CHECK(pgd == doctest::Approx(closed).epsilon(1e-6));
    CHECK(pgd >= closed - 1e-9 * std::abs(closed));  // closed form is the min
  }
}

TEST_CASE("conjugate-gradient oracle agrees with the closed-form eta_star") {
  MomentumGrid grid = build_grid(config(6, 0.25, 1.1, 2, 2, 8));
  for (int t = 0; t < 4; ++t) {
    auto rng = random_ops::substream(88, t);
    SymOperator z = random_ops::random_psd(grid.dim, rng, 1e-2, 2.0);
    Eigen::VectorXd eta_cg = cg_min_eta(grid, z, 400);
    const double e_cg = g_energy(grid, z, eta_cg, Normalization::body).total;
    const double e_closed =
        g_energy(grid, z, eta_star(grid, z), Normalization::body).total;
    CHECK(e_cg == doctest::Approx(e_closed).epsilon(1e-8));
  }
}

TEST_CASE("solver config validation") {
  SolveConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SolveConfig{};
  bad.tol_energy_rel = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  MomentumGrid grid = build_grid(config(8, 0.2, 1, 2, 2, 8));
  SolveConfig sc;
  Eigen::VectorXd floor_violating = Eigen::VectorXd::Zero(grid.dim);
  floor_violating[0] = -0.4;
  CHECK_THROWS_AS(minimize_from(grid, sc, Normalization::body,
                                SymOperator::from_diagonal(floor_violating),
                                Eigen::VectorXd::Zero(grid.dim)),
                  NotInDomainError);
}
