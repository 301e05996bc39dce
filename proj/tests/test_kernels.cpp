#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "bhf/kernels.hpp"
#include "bhf/verify.hpp"

using namespace bhf;

namespace {

struct Fixture {
  int n;
  Eigen::MatrixXd R, Z, W;
  Eigen::VectorXd d;
  Eigen::Matrix3Xd k;
  std::array<Eigen::VectorXd, 3> v;

  explicit Fixture(int size, std::uint64_t seed) : n(size) {
    auto rng = random_ops::substream(seed, size);
    R = random_ops::random_psd(n, rng).mat();
    Z = random_ops::random_hs_eps(n, rng, 0.2, 2.0).mat();
    W = random_ops::random_psd(n, rng).mat();
    d = Eigen::VectorXd::LinSpaced(n, 0.1, 1.0);
    k = random_ops::gaussian(3, n, rng);
    for (auto& vi : v) vi = random_ops::gaussian_vector(n, rng);
  }
};

}  // namespace

TEST_CASE("serial kernels match dense-algebra references") {
  Fixture f(60, 5);

  Eigen::MatrixXd P;
  kernels::rank3_projector_serial(f.v, P);
  Eigen::MatrixXd Pref = Eigen::MatrixXd::Zero(f.n, f.n);
  for (int nu = 0; nu < 3; ++nu) Pref += 2.0 * f.v[nu] * f.v[nu].transpose();
  CHECK((P - Pref).norm() < 1e-13 * Pref.norm());

  Eigen::MatrixXd T;
  kernels::coupling_metric_serial(1.5, f.d, 0.7, f.k, f.R, T);
  Eigen::MatrixXd Tref = Eigen::MatrixXd(1.5 * f.d.asDiagonal());
  for (int nu = 0; nu < 3; ++nu) {
    Eigen::VectorXd knu = f.k.row(nu).transpose();
    Tref += 0.7 * knu.asDiagonal() * f.R * knu.asDiagonal();
  }
  CHECK((T - Tref).norm() < 1e-13 * Tref.norm());

  const double c = kernels::commutator_trace_serial(f.d, f.k, f.Z, f.W);
  Eigen::MatrixXd d2 = Eigen::MatrixXd(f.d.array().square().matrix().asDiagonal());
  double cref = (d2 * f.Z * f.W).trace();
  for (int nu = 0; nu < 3; ++nu) {
    Eigen::VectorXd knu = f.k.row(nu).transpose();
    cref -= (knu.asDiagonal() * f.Z * knu.asDiagonal() * f.W).trace();
  }
  CHECK(c == doctest::Approx(cref).epsilon(1e-12));

  Eigen::MatrixXd S;
  kernels::diag_sandwich_serial(f.d, f.R, S);
  Eigen::MatrixXd Sref = f.d.asDiagonal() * f.R * f.d.asDiagonal();
  CHECK((S - Sref).norm() == 0.0);

  CHECK(kernels::hs_dot_serial(f.R, f.W) ==
        doctest::Approx((f.R.array() * f.W.array()).sum()).epsilon(1e-13));
}

TEST_CASE("openmp kernels agree with the serial reference") {
  for (int n : {33, 128, 257}) {
    Fixture f(n, 17);

    Eigen::MatrixXd a, b;
    kernels::rank3_projector_serial(f.v, a);
    kernels::rank3_projector_omp(f.v, b);
    CHECK((a - b).norm() == 0.0);

    kernels::coupling_metric_serial(2.0, f.d, 0.3, f.k, f.R, a);
    kernels::coupling_metric_omp(2.0, f.d, 0.3, f.k, f.R, b);
    CHECK((a - b).norm() == 0.0);

    kernels::diag_sandwich_serial(f.d, f.R, a);
    kernels::diag_sandwich_omp(f.d, f.R, b);
    CHECK((a - b).norm() == 0.0);

    // reductions may reassociate; compare to tight relative tolerance
    const double cs = kernels::commutator_trace_serial(f.d, f.k, f.Z, f.W);
    const double cp = kernels::commutator_trace_omp(f.d, f.k, f.Z, f.W);
    CHECK(cp == doctest::Approx(cs).epsilon(1e-12));

    const double hs = kernels::hs_dot_serial(f.R, f.W);
    const double hp = kernels::hs_dot_omp(f.R, f.W);
    CHECK(hp == doctest::Approx(hs).epsilon(1e-12));
  }
}

TEST_CASE("dispatch honors the parallel flag") {
  CHECK(kernels::parallel_enabled());
  kernels::set_parallel(false);
  CHECK_FALSE(kernels::parallel_enabled());

  Fixture f(140, 23);
  Eigen::MatrixXd serial_out, dispatched;
  kernels::diag_sandwich_serial(f.d, f.R, serial_out);
  kernels::diag_sandwich(f.d, f.R, dispatched);
  CHECK((serial_out - dispatched).norm() == 0.0);

  kernels::set_parallel(true);
  CHECK(kernels::parallel_enabled());
}

TEST_CASE("commutator trace vanishes when Z is diagonal") {
  Fixture f(40, 31);
  Eigen::MatrixXd zdiag = f.d.asDiagonal();
  // |k_i|^2 - k_i . k_i = 0 on the diagonal once k rows are consistent
  Eigen::VectorXd abs_k(f.n);
  for (int i = 0; i < f.n; ++i) abs_k[i] = f.k.col(i).norm();
  const double c = kernels::commutator_trace_serial(abs_k, f.k, zdiag, zdiag);
  CHECK(std::abs(c) < 1e-12);
}
