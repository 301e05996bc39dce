// Compares the serial reference kernels against their OpenMP versions.
//
//   ./bhf_bench [--smoke]
//
// --smoke shrinks the sizes so the binary doubles as a quick sanity run.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include <omp.h>

#include "bhf/kernels.hpp"
#include "bhf/verify.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, int n, double serial_ms, double omp_ms,
            double max_diff) {
  std::printf("%-18s n=%5d  serial %9.3f ms  omp %9.3f ms  speedup %5.2fx  "
              "agree %.2e\n",
              name, n, serial_ms, omp_ms, serial_ms / omp_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  bool smoke = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--smoke") == 0) smoke = true;

  std::vector<int> sizes = smoke ? std::vector<int>{96, 192}
                                 : std::vector<int>{256, 512, 1024, 1536};
  const int reps = smoke ? 2 : 5;

  std::printf("threads: %d\n", omp_get_max_threads());

  for (int n : sizes) {
    auto rng = bhf::random_ops::substream(42, n);
    Eigen::MatrixXd R = bhf::random_ops::random_psd(n, rng).mat();
    Eigen::MatrixXd Z = bhf::random_ops::random_hs_eps(n, rng, 0.2, 2.0).mat();
    Eigen::MatrixXd W = bhf::random_ops::random_psd(n, rng).mat();
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(n, 0.1, 1.0);
    Eigen::Matrix3Xd k = bhf::random_ops::gaussian(3, n, rng);
    std::array<Eigen::VectorXd, 3> v = {
        bhf::random_ops::gaussian_vector(n, rng),
        bhf::random_ops::gaussian_vector(n, rng),
        bhf::random_ops::gaussian_vector(n, rng)};

    {
      Eigen::MatrixXd a, b;
      const double ts = time_best_of(reps, [&] { bhf::kernels::rank3_projector_serial(v, a); });
      const double tp = time_best_of(reps, [&] { bhf::kernels::rank3_projector_omp(v, b); });
      report("rank3_projector", n, ts, tp, (a - b).cwiseAbs().maxCoeff());
    }
    {
      Eigen::MatrixXd a, b;
      const double ts = time_best_of(
          reps, [&] { bhf::kernels::coupling_metric_serial(1.5, d, 0.7, k, R, a); });
      const double tp = time_best_of(
          reps, [&] { bhf::kernels::coupling_metric_omp(1.5, d, 0.7, k, R, b); });
      report("coupling_metric", n, ts, tp, (a - b).cwiseAbs().maxCoeff());
    }
    {
      double a = 0, b = 0;
      const double ts = time_best_of(
          reps, [&] { a = bhf::kernels::commutator_trace_serial(d, k, Z, W); });
      const double tp = time_best_of(
          reps, [&] { b = bhf::kernels::commutator_trace_omp(d, k, Z, W); });
      report("commutator_trace", n, ts, tp, std::abs(a - b) / std::abs(a));
    }
    {
      Eigen::MatrixXd a, b;
      const double ts =
          time_best_of(reps, [&] { bhf::kernels::diag_sandwich_serial(d, R, a); });
      const double tp =
          time_best_of(reps, [&] { bhf::kernels::diag_sandwich_omp(d, R, b); });
      report("diag_sandwich", n, ts, tp, (a - b).cwiseAbs().maxCoeff());
    }
    {
      double a = 0, b = 0;
      const double ts =
          time_best_of(reps, [&] { a = bhf::kernels::hs_dot_serial(R, W); });
      const double tp = time_best_of(reps, [&] { b = bhf::kernels::hs_dot_omp(R, W); });
      report("hs_dot", n, ts, tp, std::abs(a - b) / std::abs(a));
    }
    std::printf("\n");
  }
  return 0;
}
