#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include "bhf/errors.hpp"

namespace bhf {

struct MomentumGrid;

// Default floor of the HS_eps domain; the analysis requires eps in (0, 1/2).
inline constexpr double kDefaultHsEps = 0.25;

// Relative threshold below which analytically-PSD operators are allowed to
// dip negative before rooting (quadrature plus round-off noise).
inline constexpr double kPsdTol = 1e-10;

// Dense self-adjoint operator in the orthonormal grid coordinates.
// Construction symmetrizes, so every instance satisfies M == M^T exactly.
class SymOperator {
 public:
  SymOperator() = default;
  explicit SymOperator(Eigen::MatrixXd m);

  static SymOperator zero(int n);
  static SymOperator identity(int n);
  static SymOperator from_diagonal(const Eigen::VectorXd& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }

  double min_eigenvalue() const;
  bool is_psd(double tol = kPsdTol) const;
  bool is_hs_eps(double eps) const;

 private:
  Eigen::MatrixXd m_;
};

struct SpectralFactorization {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns

  // Q f(L) Q^T for a scalar function applied to the eigenvalues.
  template <class F>
  Eigen::MatrixXd apply(F&& f) const {
    Eigen::VectorXd fe = eigenvalues.unaryExpr(std::forward<F>(f));
    return eigenvectors * fe.asDiagonal() * eigenvectors.transpose();
  }
};

SpectralFactorization factorize(const Eigen::MatrixXd& symmetric);
SpectralFactorization factorize(const SymOperator& m);

// Positive square root via the spectral factorization. Eigenvalues in
// [-kPsdTol * op_norm, 0) are clamped to zero; anything lower throws NotPsdError.
SymOperator psd_sqrt(const SymOperator& m);

// (1 + z)^{-1} for z in HS_eps. Throws NotInDomainError if min eig < -eps.
SymOperator resolvent(const SymOperator& z, double eps = kDefaultHsEps);

// P_eta = 2 sum_nu |G_nu + k_nu eta><G_nu + k_nu eta|  (rank <= 3, PSD)
SymOperator projector_P(const MomentumGrid& grid, const Eigen::VectorXd& eta, double g);

// Tr[(A^2 + B^2)^{1/2} - B] for PSD A, B.
double trace_root_gap(const SymOperator& A, const SymOperator& B);

double hs_norm(const SymOperator& z);
double trace(const SymOperator& z);
double op_norm(const SymOperator& z);
double hs_inner(const SymOperator& a, const SymOperator& b);

}  // namespace bhf
