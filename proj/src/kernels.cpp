#include "bhf/kernels.hpp"

#include <atomic>

namespace bhf::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void rank3_projector_serial(const std::array<Eigen::VectorXd, 3>& v,
                            Eigen::MatrixXd& out) {
  const auto n = v[0].size();
  out.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a0 = v[0][j], a1 = v[1][j], a2 = v[2][j];
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = 2.0 * (v[0][i] * a0 + v[1][i] * a1 + v[2][i] * a2);
    }
  }
}

void rank3_projector_omp(const std::array<Eigen::VectorXd, 3>& v,
                         Eigen::MatrixXd& out) {
  const auto n = v[0].size();
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a0 = v[0][j], a1 = v[1][j], a2 = v[2][j];
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = 2.0 * (v[0][i] * a0 + v[1][i] * a1 + v[2][i] * a2);
    }
  }
}

void rank3_projector(const std::array<Eigen::VectorXd, 3>& v, Eigen::MatrixXd& out) {
  if (parallel_enabled() && v[0].size() >= 128)
    rank3_projector_omp(v, out);
  else
    rank3_projector_serial(v, out);
}

void coupling_metric_serial(double a, const Eigen::VectorXd& d, double b,
                            const Eigen::Matrix3Xd& k, const Eigen::MatrixXd& R,
                            Eigen::MatrixXd& out) {
  const auto n = d.size();
  out.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k0 = k(0, j), k1 = k(1, j), k2 = k(2, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = b * (k(0, i) * k0 + k(1, i) * k1 + k(2, i) * k2) * R(i, j);
    }
    out(j, j) += a * d[j];
  }
}

void coupling_metric_omp(double a, const Eigen::VectorXd& d, double b,
                         const Eigen::Matrix3Xd& k, const Eigen::MatrixXd& R,
                         Eigen::MatrixXd& out) {
  const auto n = d.size();
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k0 = k(0, j), k1 = k(1, j), k2 = k(2, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = b * (k(0, i) * k0 + k(1, i) * k1 + k(2, i) * k2) * R(i, j);
    }
    out(j, j) += a * d[j];
  }
}

void coupling_metric(double a, const Eigen::VectorXd& d, double b,
                     const Eigen::Matrix3Xd& k, const Eigen::MatrixXd& R,
                     Eigen::MatrixXd& out) {
  if (parallel_enabled() && d.size() >= 128)
    coupling_metric_omp(a, d, b, k, R, out);
  else
    coupling_metric_serial(a, d, b, k, R, out);
}

double commutator_trace_serial(const Eigen::VectorXd& abs_k, const Eigen::Matrix3Xd& k,
                               const Eigen::MatrixXd& Z, const Eigen::MatrixXd& W) {
  const auto n = abs_k.size();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k0 = k(0, j), k1 = k(1, j), k2 = k(2, j);
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kk = abs_k[i] * abs_k[i] -
                        (k(0, i) * k0 + k(1, i) * k1 + k(2, i) * k2);
      col += kk * Z(i, j) * W(i, j);
    }
    acc += col;
  }
  return acc;
}

double commutator_trace_omp(const Eigen::VectorXd& abs_k, const Eigen::Matrix3Xd& k,
                            const Eigen::MatrixXd& Z, const Eigen::MatrixXd& W) {
  const auto n = abs_k.size();
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k0 = k(0, j), k1 = k(1, j), k2 = k(2, j);
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kk = abs_k[i] * abs_k[i] -
                        (k(0, i) * k0 + k(1, i) * k1 + k(2, i) * k2);
      col += kk * Z(i, j) * W(i, j);
    }
    acc += col;
  }
  return acc;
}

double commutator_trace(const Eigen::VectorXd& abs_k, const Eigen::Matrix3Xd& k,
                        const Eigen::MatrixXd& Z, const Eigen::MatrixXd& W) {
  if (parallel_enabled() && abs_k.size() >= 128)
    return commutator_trace_omp(abs_k, k, Z, W);
  return commutator_trace_serial(abs_k, k, Z, W);
}

void diag_sandwich_serial(const Eigen::VectorXd& d, const Eigen::MatrixXd& M,
                          Eigen::MatrixXd& out) {
  const auto n = d.size();
  out.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dj = d[j];
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = d[i] * M(i, j) * dj;
  }
}

void diag_sandwich_omp(const Eigen::VectorXd& d, const Eigen::MatrixXd& M,
                       Eigen::MatrixXd& out) {
  const auto n = d.size();
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dj = d[j];
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = d[i] * M(i, j) * dj;
  }
}

void diag_sandwich(const Eigen::VectorXd& d, const Eigen::MatrixXd& M,
                   Eigen::MatrixXd& out) {
  if (parallel_enabled() && d.size() >= 128)
    diag_sandwich_omp(d, M, out);
  else
    diag_sandwich_serial(d, M, out);
}

double hs_dot_serial(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const auto n = A.cols();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) col += A(i, j) * B(i, j);
    acc += col;
  }
  return acc;
}

double hs_dot_omp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const auto n = A.cols();
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) col += A(i, j) * B(i, j);
    acc += col;
  }
  return acc;
}

double hs_dot(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (parallel_enabled() && A.size() >= 128 * 128) return hs_dot_omp(A, B);
  return hs_dot_serial(A, B);
}

}  // namespace bhf::kernels
