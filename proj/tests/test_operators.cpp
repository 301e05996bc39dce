#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bhf/grid.hpp"
#include "bhf/operators.hpp"
#include "bhf/verify.hpp"

using namespace bhf;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXd diag2(double a, double b) {
  Eigen::VectorXd d(2);
  d << a, b;
  return d;
}
}  // namespace

TEST_CASE("construction symmetrizes and basic norms work") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 0.0, 3.0;
  SymOperator s(m);
  CHECK(s.mat()(0, 1) == s.mat()(1, 0));
  CHECK(s.mat()(0, 1) == doctest::Approx(1.0));

  CHECK(hs_norm(SymOperator::identity(9)) == doctest::Approx(3.0));
  CHECK(trace(SymOperator::from_diagonal(Eigen::Vector3d(1, 2, 3))) ==
        doctest::Approx(6.0));
  CHECK(op_norm(SymOperator::from_diagonal(diag2(1, -3))) == doctest::Approx(3.0));

  CHECK_THROWS_AS(SymOperator(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
}

TEST_CASE("spectral factorization reconstructs and is orthonormal") {
  auto rng = random_ops::substream(3, 0);
  for (int n : {1, 5, 40}) {
    SymOperator m = random_ops::random_hs_eps(n, rng, 0.5, 4.0);
    auto f = factorize(m);
    Eigen::MatrixXd rec =
        f.eigenvectors * f.eigenvalues.asDiagonal() * f.eigenvectors.transpose();
    CHECK((rec - m.mat()).norm() <= 1e-10 * std::max(m.mat().norm(), 1e-30));
    CHECK((f.eigenvectors.transpose() * f.eigenvectors -
           Eigen::MatrixXd::Identity(n, n))
              .norm() <= 1e-10);
    for (int i = 0; i + 1 < n; ++i) CHECK(f.eigenvalues[i] <= f.eigenvalues[i + 1]);
  }
}

TEST_CASE("psd_sqrt on toy matrices") {
  CHECK((psd_sqrt(SymOperator::identity(4)).mat() -
         Eigen::MatrixXd::Identity(4, 4))
            .norm() < 1e-14);

  SymOperator d = SymOperator::from_diagonal(diag2(4, 9));
  CHECK((psd_sqrt(d).mat() - Eigen::MatrixXd(diag2(2, 3).asDiagonal())).norm() <
        1e-13);

  SymOperator two = SymOperator(2.0 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(trace(psd_sqrt(two)) == doctest::Approx(2.0 * std::sqrt(2.0)));

  CHECK_THROWS_AS(psd_sqrt(SymOperator::from_diagonal(diag2(1, -1))), NotPsdError);

  // tiny negative eigenvalues are clamped, not fatal
  SymOperator nearly(Eigen::MatrixXd(diag2(1.0, -1e-13).asDiagonal()));
  CHECK(psd_sqrt(nearly).min_eigenvalue() >= 0.0);
}

TEST_CASE("psd_sqrt inverts squaring on random PSD inputs") {
  for (int t = 0; t < 20; ++t) {
    auto rng = random_ops::substream(101, t);
    SymOperator s = random_ops::random_psd(24, rng);
    SymOperator back = psd_sqrt(SymOperator(s.mat() * s.mat()));
    CHECK((back.mat() - s.mat()).norm() <= 1e-8 * s.mat().norm());
  }
}

TEST_CASE("resolvent basics and domain enforcement") {
  CHECK((resolvent(SymOperator::zero(3)).mat() - Eigen::MatrixXd::Identity(3, 3))
            .norm() < 1e-14);
  CHECK(resolvent(SymOperator::identity(1)).mat()(0, 0) == doctest::Approx(0.5));

  auto rng = random_ops::substream(57, 0);
  SymOperator z = random_ops::random_psd(16, rng);
  auto f = factorize(resolvent(z));
  CHECK(f.eigenvalues[0] > 0.0);
  CHECK(f.eigenvalues[15] <= 1.0 + 1e-14);

  // residual ||(1+z) R - I||
  Eigen::MatrixXd R = resolvent(z).mat();
  Eigen::MatrixXd one_plus = z.mat() + Eigen::MatrixXd::Identity(16, 16);
  CHECK((one_plus * R - Eigen::MatrixXd::Identity(16, 16)).norm() < 1e-10);

  CHECK_THROWS_AS(resolvent(SymOperator::from_diagonal(diag2(1.0, -0.3))),
                  NotInDomainError);
}

TEST_CASE("projector_P: rank, trace, and the triple eigenvalue") {
  GridConfig c;
  c.lambda = 10;
  c.sigma = 0.1;
  c.g = 0.8;
  c.n_radial = 6;
  c.n_polar = 6;
  c.n_azimuth = 8;
  MomentumGrid grid = build_grid(c);
  const double ratio = c.sigma / c.lambda;

  SymOperator P0 = projector_P(grid, Eigen::VectorXd::Zero(grid.dim), c.g);
  auto f = factorize(P0);
  // rank <= 3 at the 1e-10 threshold
  for (int i = 0; i < grid.dim - 3; ++i)
    CHECK(std::abs(f.eigenvalues[i]) <= 1e-10 * f.eigenvalues[grid.dim - 1]);
  CHECK(f.eigenvalues[0] >= -1e-12);

  CHECK(trace(P0) == doctest::Approx(8.0 * kPi * c.g * c.g * (1.0 - ratio * ratio))
                         .epsilon(1e-12));

  // |k|^{1/2} P0 |k|^{1/2} has the nonzero eigenvalue (16 pi / 9) g^2 (1-r^3)
  // with multiplicity three (frame completeness makes the dyads orthogonal)
  Eigen::VectorXd root_k = grid.abs_k.cwiseSqrt();
  Eigen::MatrixXd K = root_k.asDiagonal() * P0.mat() * root_k.asDiagonal();
  auto fk = factorize(SymOperator(K));
  const double expected =
      (16.0 * kPi / 9.0) * c.g * c.g * (1.0 - std::pow(ratio, 3));
  for (int j = 0; j < 3; ++j)
    CHECK(fk.eigenvalues[grid.dim - 1 - j] ==
          doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(fk.eigenvalues[grid.dim - 4]) < 1e-12 * expected);

  // random eta keeps rank <= 3
  auto rng = random_ops::substream(5, 1);
  SymOperator Pe = projector_P(grid, random_ops::gaussian_vector(grid.dim, rng), c.g);
  auto fe = factorize(Pe);
  for (int i = 0; i < grid.dim - 3; ++i)
    CHECK(std::abs(fe.eigenvalues[i]) <= 1e-10 * fe.eigenvalues[grid.dim - 1]);
}

TEST_CASE("trace_root_gap on frozen diagonal examples") {
  SymOperator A = SymOperator::from_diagonal(diag2(1, 2));
  SymOperator zero = SymOperator::zero(2);
  CHECK(trace_root_gap(A, zero) == doctest::Approx(3.0));  // equality case B = 0

  SymOperator A34 = SymOperator::from_diagonal(diag2(3, 4));
  SymOperator B43 = SymOperator::from_diagonal(diag2(4, 3));
  CHECK(trace_root_gap(A34, B43) == doctest::Approx(3.0));  // (5-4) + (5-3)
  CHECK(trace_root_gap(A34, B43) <= trace(A34));

  SymOperator C55 = SymOperator::from_diagonal(diag2(5, 5));
  const double gap_c = trace_root_gap(A34, C55);
  CHECK(gap_c == doctest::Approx(std::sqrt(34.0) + std::sqrt(41.0) - 10.0));
  CHECK(gap_c <= trace_root_gap(A34, B43));  // C^2 >= B^2 lowers the gap

  CHECK_THROWS_AS(trace_root_gap(SymOperator::from_diagonal(diag2(1, -1)), zero),
                  NotPsdError);
}

TEST_CASE("operator monotonicity of the square root") {
  for (int t = 0; t < 40; ++t) {
    auto rng = random_ops::substream(211, t);
    SymOperator A = random_ops::random_psd(12, rng);
    SymOperator gap = random_ops::random_psd(12, rng);
    SymOperator B = SymOperator(A.mat() + gap.mat());  // A <= B
    Eigen::MatrixXd diff = psd_sqrt(B).mat() - psd_sqrt(A).mat();
    CHECK(factorize(SymOperator(diff)).eigenvalues[0] >= -1e-8 * op_norm(B));
  }
}

TEST_CASE("A B^{-1} A <= A for A <= B") {
  for (int t = 0; t < 40; ++t) {
    auto rng = random_ops::substream(307, t);
    SymOperator A = random_ops::random_psd(10, rng);
    SymOperator B = SymOperator(A.mat() + random_ops::random_psd(10, rng).mat());
    Eigen::MatrixXd Binv = factorize(B).apply([](double x) { return 1.0 / x; });
    Eigen::MatrixXd diff = A.mat() - A.mat() * Binv * A.mat();
    CHECK(factorize(SymOperator(diff)).eigenvalues[0] >= -1e-9 * op_norm(A));
  }
}

TEST_CASE("strict convexity of the inverse on matrices") {
  // scalar case: A = I, B = 2I, lambda = 1/2 gives 1/12 per eigenvalue
  SymOperator A = SymOperator::identity(2);
  SymOperator B = SymOperator(2.0 * Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd mix = 0.5 * A.mat() + 0.5 * B.mat();
  Eigen::MatrixXd diff = 0.5 * A.mat().inverse() + 0.5 * B.mat().inverse() -
                         mix.inverse();
  CHECK(op_norm(SymOperator(diff)) == doctest::Approx(1.0 / 12.0));

  for (int t = 0; t < 40; ++t) {
    auto rng = random_ops::substream(401, t);
    SymOperator X = random_ops::random_psd(8, rng, 1e-2, 1e1);
    SymOperator Y = random_ops::random_psd(8, rng, 1e-2, 1e1);
    std::uniform_real_distribution<double> uni(0.1, 0.9);
    const double lam = uni(rng);
    auto inv = [](const SymOperator& m) {
      return factorize(m).apply([](double x) { return 1.0 / x; });
    };
    Eigen::MatrixXd d = lam * inv(X) + (1 - lam) * inv(Y) -
                        inv(SymOperator(lam * X.mat() + (1 - lam) * Y.mat()));
    CHECK(factorize(SymOperator(d)).eigenvalues[0] >= -1e-9 / X.min_eigenvalue());
    CHECK(d.norm() > 1e-10);
  }
}

TEST_CASE("is_psd and is_hs_eps predicates") {
  CHECK(SymOperator::identity(3).is_psd());
  CHECK_FALSE(SymOperator::from_diagonal(diag2(1, -0.5)).is_psd());
  CHECK(SymOperator::from_diagonal(diag2(1, -0.2)).is_hs_eps(0.25));
  CHECK_FALSE(SymOperator::from_diagonal(diag2(1, -0.3)).is_hs_eps(0.25));
}
