#include "bhf/operators.hpp"

#include <cmath>
#include <utility>

#ifdef BHF_USE_LAPACKE
#include <lapacke.h>
#endif

#include "bhf/grid.hpp"
#include "bhf/kernels.hpp"

namespace bhf {

SymOperator::SymOperator(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw DimensionError("SymOperator: matrix not square");
  m_ = 0.5 * (m + m.transpose());
}

SymOperator SymOperator::zero(int n) { return SymOperator(Eigen::MatrixXd::Zero(n, n)); }

SymOperator SymOperator::identity(int n) {
  return SymOperator(Eigen::MatrixXd::Identity(n, n));
}

SymOperator SymOperator::from_diagonal(const Eigen::VectorXd& d) {
  return SymOperator(Eigen::MatrixXd(d.asDiagonal()));
}

double SymOperator::min_eigenvalue() const {
  return factorize(*this).eigenvalues[0];
}

bool SymOperator::is_psd(double tol) const {
  const auto f = factorize(*this);
  const double scale = std::max(std::abs(f.eigenvalues[0]),
                                std::abs(f.eigenvalues[dim() - 1]));
  return f.eigenvalues[0] >= -tol * std::max(scale, 1e-300);
}

bool SymOperator::is_hs_eps(double eps) const { return min_eigenvalue() >= -eps; }

SpectralFactorization factorize(const Eigen::MatrixXd& symmetric) {
  SpectralFactorization f;
  const int n = static_cast<int>(symmetric.rows());
#ifdef BHF_USE_LAPACKE
  f.eigenvectors = symmetric;
  f.eigenvalues.resize(n);
  if (n > 0) {
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                              f.eigenvectors.data(), n, f.eigenvalues.data());
    if (info != 0)
      throw LinearSolveError("symmetric eigendecomposition failed, info=" +
                             std::to_string(info));
  }
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  if (es.info() != Eigen::Success)
    throw LinearSolveError("symmetric eigendecomposition failed");
  f.eigenvalues = es.eigenvalues();
  f.eigenvectors = es.eigenvectors();
#endif
  return f;
}

SpectralFactorization factorize(const SymOperator& m) { return factorize(m.mat()); }

SymOperator psd_sqrt(const SymOperator& m) {
  const auto f = factorize(m);
  const int n = m.dim();
  const double scale =
      std::max({std::abs(f.eigenvalues[0]), std::abs(f.eigenvalues[n - 1]), 1e-300});
  const double tol = kPsdTol * scale;
  if (f.eigenvalues[0] < -tol)
    throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(f.eigenvalues[0]) +
                          " below -" + std::to_string(tol),
                      f.eigenvalues[0]);
  return SymOperator(f.apply([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }));
}

SymOperator resolvent(const SymOperator& z, double eps) {
  const auto f = factorize(z);
  if (f.eigenvalues[0] < -eps)
    throw NotInDomainError("resolvent: operator leaves HS_eps, min eigenvalue " +
                               std::to_string(f.eigenvalues[0]),
                           f.eigenvalues[0]);
  return SymOperator(f.apply([](double x) { return 1.0 / (1.0 + x); }));
}

SymOperator projector_P(const MomentumGrid& grid, const Eigen::VectorXd& eta,
                        double g) {
  if (eta.size() != grid.dim) throw DimensionError("projector_P: eta size mismatch");
  const auto G = coupling_vectors(grid, g);
  std::array<Eigen::VectorXd, 3> v;
  for (int nu = 0; nu < 3; ++nu)
    v[nu] = G[nu] + grid.k_comp[nu].cwiseProduct(eta);
  Eigen::MatrixXd P;
  kernels::rank3_projector(v, P);
  return SymOperator(std::move(P));
}

double trace_root_gap(const SymOperator& A, const SymOperator& B) {
  if (A.dim() != B.dim()) throw DimensionError("trace_root_gap: dimension mismatch");
  if (!A.is_psd()) throw NotPsdError("trace_root_gap: A not PSD", A.min_eigenvalue());
  if (!B.is_psd()) throw NotPsdError("trace_root_gap: B not PSD", B.min_eigenvalue());
  SymOperator root = psd_sqrt(SymOperator(A.mat() * A.mat() + B.mat() * B.mat()));
  return (root.mat() - B.mat()).trace();
}

double hs_norm(const SymOperator& z) { return z.mat().norm(); }

double trace(const SymOperator& z) { return z.mat().trace(); }

double op_norm(const SymOperator& z) {
  if (z.dim() == 0) return 0.0;
  const auto f = factorize(z);
  return std::max(std::abs(f.eigenvalues[0]), std::abs(f.eigenvalues[z.dim() - 1]));
}

double hs_inner(const SymOperator& a, const SymOperator& b) {
  return kernels::hs_dot(a.mat(), b.mat());
}

}  // namespace bhf
