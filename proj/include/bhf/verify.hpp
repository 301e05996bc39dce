#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string>

#include "bhf/grid.hpp"
#include "bhf/operators.hpp"

namespace bhf {

// Randomized inequality checks. A trial's margin is the slack of the asserted
// inequality (nonnegative means it holds); violations counts margins below
// -kInequalitySlack after scale normalization.
inline constexpr double kInequalitySlack = 1e-9;

struct PropertyReport {
  std::string property_name;
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;
  std::uint64_t seed = 0;
};

// Tr[(A^2 + B^2)^{1/2} - B] <= Tr[A], and the gap is nonnegative.
PropertyReport verify_trace_upper(int dim, int trials, std::uint64_t seed);

// Tr[(A^2 + C^2)^{1/2} - C] <= Tr[(A^2 + B^2)^{1/2} - B] for B^2 <= C^2,
// plus the eps-shifted operator inequality
// (A^2 + B^2 + eps)^{1/2} - (B^2 + eps)^{1/2} <= (A^2 + B^2)^{1/2} - B.
PropertyReport verify_trace_monotone(int dim, int trials, std::uint64_t seed);

enum class ConvexityTarget { G, interaction, E };

// Midpoint convexity trials on HS_eps + fh pairs. G and interaction must come
// back clean; E is expected to violate once seeded with rank-two pairs from
// the counterexample construction.
PropertyReport verify_convexity(const MomentumGrid& grid, int trials,
                                std::uint64_t seed, ConvexityTarget which);

// Body-normalized G(z, eta) >= sigma/2 min(||z||, ||z||^2) + 4 sigma ||eta||^2,
// including large-norm samples.
PropertyReport verify_coercivity(const MomentumGrid& grid, int trials,
                                 std::uint64_t seed);

// lambda A^{-1} + (1-lambda) B^{-1} - [lambda A + (1-lambda) B]^{-1} is PSD
// and nonzero for positive definite A != B.
PropertyReport verify_inverse_convexity(int dim, int trials, std::uint64_t seed);

namespace random_ops {

// Deterministic per-trial substream of a base seed.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng);
Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng);

// QR of a Gaussian array, sign-fixed.
Eigen::MatrixXd haar_orthogonal(int n, std::mt19937_64& rng);

// Q L Q^T with log-uniform eigenvalues in [lo, hi].
SymOperator random_psd(int n, std::mt19937_64& rng, double lo = 1e-3, double hi = 1e1);

// Self-adjoint with eigenvalues in [-eps_floor, hi].
SymOperator random_hs_eps(int n, std::mt19937_64& rng, double eps_floor, double hi = 3.0);

}  // namespace random_ops

}  // namespace bhf
