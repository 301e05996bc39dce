#pragma once

#include <Eigen/Core>
#include <array>

// Dense inner-loop kernels behind the energy and gradient evaluations.
// Every kernel comes in a serial reference version and an OpenMP version;
// the unsuffixed entry point dispatches on the module-level parallel flag.
// The serial versions are the ground truth the parallel ones are tested
// against, and the benchmark target compares their throughput.

namespace bhf::kernels {

bool parallel_enabled();
void set_parallel(bool on);

// out = 2 * sum_nu v[nu] v[nu]^T
void rank3_projector(const std::array<Eigen::VectorXd, 3>& v, Eigen::MatrixXd& out);
void rank3_projector_serial(const std::array<Eigen::VectorXd, 3>& v, Eigen::MatrixXd& out);
void rank3_projector_omp(const std::array<Eigen::VectorXd, 3>& v, Eigen::MatrixXd& out);

// out_ij = a * d_i * delta_ij + b * (k_i . k_j) * R_ij
// with k the 3 x N node momenta. This assembles the eta-block metric
// a|k| + b sum_nu k_nu R k_nu without forming the three sandwiches.
void coupling_metric(double a, const Eigen::VectorXd& d, double b,
                     const Eigen::Matrix3Xd& k, const Eigen::MatrixXd& R,
                     Eigen::MatrixXd& out);
void coupling_metric_serial(double a, const Eigen::VectorXd& d, double b,
                            const Eigen::Matrix3Xd& k, const Eigen::MatrixXd& R,
                            Eigen::MatrixXd& out);
void coupling_metric_omp(double a, const Eigen::VectorXd& d, double b,
                         const Eigen::Matrix3Xd& k, const Eigen::MatrixXd& R,
                         Eigen::MatrixXd& out);

// sum_ij (|k_i|^2 - k_i . k_j) * Z_ij * W_ij
// Equals Tr[|k|^2 Z W] - sum_nu Tr[k_nu Z k_nu W] for symmetric Z, W; this is
// the commutator trace behind the non-convex term (with W = z(1+z)^{-1}).
double commutator_trace(const Eigen::VectorXd& abs_k, const Eigen::Matrix3Xd& k,
                        const Eigen::MatrixXd& Z, const Eigen::MatrixXd& W);
double commutator_trace_serial(const Eigen::VectorXd& abs_k, const Eigen::Matrix3Xd& k,
                               const Eigen::MatrixXd& Z, const Eigen::MatrixXd& W);
double commutator_trace_omp(const Eigen::VectorXd& abs_k, const Eigen::Matrix3Xd& k,
                            const Eigen::MatrixXd& Z, const Eigen::MatrixXd& W);

// out = diag(d) * M * diag(d)
void diag_sandwich(const Eigen::VectorXd& d, const Eigen::MatrixXd& M, Eigen::MatrixXd& out);
void diag_sandwich_serial(const Eigen::VectorXd& d, const Eigen::MatrixXd& M, Eigen::MatrixXd& out);
void diag_sandwich_omp(const Eigen::VectorXd& d, const Eigen::MatrixXd& M, Eigen::MatrixXd& out);

// sum_ij A_ij B_ij  (Hilbert-Schmidt inner product of real symmetric matrices)
double hs_dot(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
double hs_dot_serial(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
double hs_dot_omp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace bhf::kernels
