#pragma once

#include <Eigen/Core>
#include <array>
#include <utility>

#include "bhf/grid.hpp"

namespace bhf {

// Constructive non-convexity witness on the rank-two family
// z_{t,s} = t P_psi + s P_phi with psi, phi orthonormal and orthogonal to
// every G_nu + k_nu eta. Along the family the weight-free part reduces to
//   a t^2/(1+t) + b s^2/(1+s) - c (ts/(1+t) + ts/(1+s)).
struct CounterexampleReport {
  double a = 0.0, b = 0.0, c = 0.0;

  double witness_t = 0.0, witness_s = 0.0;  // det H < 0 here
  Eigen::Matrix2d hessian;                  // closed form at the witness
  double det_at_witness = 0.0;
  bool trace_positive_everywhere = false;   // over the whole (t, s) scan

  // midpoint-convexity violation of the weight-free functional: two endpoints
  // and the values at (p1, midpoint, p2); the middle value exceeds the mean.
  std::array<std::pair<double, double>, 2> midpoint_pair;
  std::array<double, 3> eprime_values{};
  double midpoint_violation = 0.0;  // E'(mid) - (E'(p1) + E'(p2))/2 > 0

  // the same exhibition on the body-normalized full functional
  double efull_witness_t = 0.0, efull_witness_s = 0.0;
  std::array<std::pair<double, double>, 2> efull_pair;
  std::array<double, 3> efull_values{};
  double efull_violation = 0.0;

  bool coef_check_a = false;  // a >= sigma/lambda + c
  bool coef_check_b = false;  // b >= sigma/lambda + c

  Eigen::VectorXd psi, phi;
  int seed_attempts = 0;
};

CounterexampleReport build_counterexample(const MomentumGrid& grid,
                                          const Eigen::VectorXd& eta);

// Closed-form pieces of the reduced two-parameter function, shared with the
// verifier and the Hessian finite-difference check.
double rank_two_value(double a, double b, double c, double t, double s);
Eigen::Matrix2d rank_two_hessian(double a, double b, double c, double t, double s);

}  // namespace bhf
