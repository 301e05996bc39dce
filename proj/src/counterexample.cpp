#include "bhf/counterexample.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "bhf/energy.hpp"

namespace bhf {

double rank_two_value(double a, double b, double c, double t, double s) {
  return a * t * t / (1.0 + t) + b * s * s / (1.0 + s) -
         c * (t * s / (1.0 + t) + t * s / (1.0 + s));
}

Eigen::Matrix2d rank_two_hessian(double a, double b, double c, double t, double s) {
  const double pt = 1.0 + t, ps = 1.0 + s;
  Eigen::Matrix2d h;
  h(0, 0) = (2.0 * a + 2.0 * c * s) / (pt * pt * pt);
  h(1, 1) = (2.0 * b + 2.0 * c * t) / (ps * ps * ps);
  h(0, 1) = h(1, 0) = -c * (1.0 / (pt * pt) + 1.0 / (ps * ps));
  return h;
}

namespace {

struct ScanHit {
  double t = 0.0, s = 0.0;
  double det = 0.0;
};

// Scan t in {2^0..2^12}, s in {0} u {2^-10..2^0} for negative determinant.
// Hits with s > 0 come first (the midpoint segment needs room below s), each
// group sorted by determinant ascending. Also checks that the Hessian trace
// stays positive over the whole scan.
std::vector<ScanHit> scan_for_witness(double a, double b, double c,
                                      bool& trace_positive) {
  trace_positive = true;
  std::vector<ScanHit> interior, boundary;
  std::vector<double> svals = {0.0};
  for (int p = -10; p <= 0; ++p) svals.push_back(std::pow(2.0, p));
  for (int q = 0; q <= 12; ++q) {
    const double t = std::pow(2.0, q);
    for (double s : svals) {
      Eigen::Matrix2d h = rank_two_hessian(a, b, c, t, s);
      if (h.trace() <= 0.0) trace_positive = false;
      const double det = h.determinant();
      if (det < 0.0) (s > 0.0 ? interior : boundary).push_back({t, s, det});
    }
  }
  auto by_det = [](const ScanHit& x, const ScanHit& y) { return x.det < y.det; };
  std::sort(interior.begin(), interior.end(), by_det);
  std::sort(boundary.begin(), boundary.end(), by_det);
  interior.insert(interior.end(), boundary.begin(), boundary.end());
  return interior;
}

// Midpoint triple along the negative-curvature direction at the witness.
// value(t, s) must be the actual functional evaluation; delta shrinks until
// both endpoints are feasible and the convexity violation shows.
template <class ValueFn>
bool find_midpoint_violation(double a, double b, double c, double wt, double ws,
                             ValueFn&& value,
                             std::array<std::pair<double, double>, 2>& pair,
                             std::array<double, 3>& values, double& violation) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rank_two_hessian(a, b, c, wt, ws));
  Eigen::Vector2d dir = es.eigenvectors().col(0);  // most negative curvature

  for (double delta = 0.5 * (1.0 + wt); delta > 1e-6; delta *= 0.5) {
    const double t1 = wt - delta * dir[0], s1 = ws - delta * dir[1];
    const double t2 = wt + delta * dir[0], s2 = ws + delta * dir[1];
    if (t1 < 0.0 || t2 < 0.0 || s1 < 0.0 || s2 < 0.0) continue;
    const double f1 = value(t1, s1);
    const double f2 = value(t2, s2);
    const double fm = value(wt, ws);
    const double scale = std::max({std::abs(f1), std::abs(f2), 1.0});
    const double gap = fm - 0.5 * (f1 + f2);
    if (gap > 1e-10 * scale) {
      pair = {std::make_pair(t1, s1), std::make_pair(t2, s2)};
      values = {f1, fm, f2};
      violation = gap;
      return true;
    }
  }
  return false;
}

Eigen::VectorXd project_out(const Eigen::VectorXd& v,
                            const std::vector<Eigen::VectorXd>& basis) {
  Eigen::VectorXd out = v;
  for (const auto& q : basis) out -= q.dot(out) * q;
  // second pass for orthogonality at round-off level
  for (const auto& q : basis) out -= q.dot(out) * q;
  return out;
}

}  // namespace

CounterexampleReport build_counterexample(const MomentumGrid& grid,
                                          const Eigen::VectorXd& eta) {
  if (eta.size() != grid.dim)
    throw DimensionError("build_counterexample: eta size mismatch");
  if (grid.dim < 8)
    throw ConfigError("build_counterexample: grid dimension must be >= 8");

  const int n = grid.dim;
  const double lambda = grid.config.lambda;

  // orthonormal basis of span{G_nu + k_nu eta}
  std::vector<Eigen::VectorXd> span;
  for (int nu = 0; nu < 3; ++nu) {
    Eigen::VectorXd v = grid.coupling[nu] + grid.k_comp[nu].cwiseProduct(eta);
    v = project_out(v, span);
    if (v.norm() > 1e-12) span.push_back(v.normalized());
  }

  CounterexampleReport report;
  for (int attempt = 0; attempt < 8; ++attempt) {
    report.seed_attempts = attempt + 1;

    Eigen::VectorXd seedvec(n);
    for (int i = 0; i < n; ++i)
      seedvec[i] = std::sin(0.7 * (i + 1) + 1.3 * attempt) +
                   0.3 * std::cos(2.1 * (attempt + 1) * (i + 1) + 0.5);
    Eigen::VectorXd psi = project_out(seedvec, span);
    if (psi.norm() < 1e-10) continue;
    psi.normalize();

    auto with_psi = span;
    with_psi.push_back(psi);
    Eigen::VectorXd pushed = grid.k_comp[2].cwiseProduct(psi);
    Eigen::VectorXd phi = project_out(pushed, with_psi);
    if (phi.norm() < 1e-10) continue;
    phi.normalize();

    auto moment = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v, int nu) {
      return grid.k_comp[nu].cwiseProduct(u).dot(v);
    };
    double c = 0.0, cross_psi = 0.0, cross_phi = 0.0;
    for (int nu = 0; nu < 3; ++nu) {
      const double m = moment(psi, phi, nu);
      c += 0.5 * m * m;
      const double mp = moment(psi, psi, nu);
      cross_psi += 0.5 * mp * mp;
      const double mf = moment(phi, phi, nu);
      cross_phi += 0.5 * mf * mf;
    }
    if (c < 1e-8) continue;

    auto kinetic = [&](const Eigen::VectorXd& u) {
      return ((grid.abs_k.array() + 0.5 * grid.abs_k.array().square()) *
              u.array().square())
          .sum();
    };
    const double a = kinetic(psi) - cross_psi;
    const double b = kinetic(phi) - cross_phi;

    bool trace_pos = false;
    auto hits = scan_for_witness(a, b, c, trace_pos);
    if (hits.empty()) continue;

    auto family = [&](double t, double s) {
      return SymOperator(t * (psi * psi.transpose()) + s * (phi * phi.transpose()));
    };
    auto eprime_value = [&](double t, double s) {
      return eprime(grid, family(t, s));
    };

    bool found = false;
    for (const auto& hit : hits) {
      if (find_midpoint_violation(a, b, c, hit.t, hit.s, eprime_value,
                                  report.midpoint_pair, report.eprime_values,
                                  report.midpoint_violation)) {
        report.witness_t = hit.t;
        report.witness_s = hit.s;
        report.hessian = rank_two_hessian(a, b, c, hit.t, hit.s);
        report.det_at_witness = hit.det;
        found = true;
        break;
      }
    }
    if (!found) continue;

    report.a = a;
    report.b = b;
    report.c = c;
    report.psi = psi;
    report.phi = phi;
    report.trace_positive_everywhere = trace_pos;
    const double ir = grid.r_min;  // sigma / lambda on the rescaled shell
    report.coef_check_a = a >= ir + c - 1e-12;
    report.coef_check_b = b >= ir + c - 1e-12;

    // Same exhibition on the body-normalized full functional; the family
    // constants pick up the Lambda weights.
    const double L2 = lambda * lambda;
    const double ab_body =
        lambda * (grid.abs_k.array() * psi.array().square()).sum() +
        0.5 * L2 * (grid.abs_k.array().square() * psi.array().square()).sum() -
        L2 * cross_psi;
    const double bb_body =
        lambda * (grid.abs_k.array() * phi.array().square()).sum() +
        0.5 * L2 * (grid.abs_k.array().square() * phi.array().square()).sum() -
        L2 * cross_phi;
    const double cc_body = L2 * c;

    bool trace_pos_body = false;
    auto hits_body = scan_for_witness(ab_body, bb_body, cc_body, trace_pos_body);
    auto efull_value = [&](double t, double s) {
      return e_full(grid, family(t, s), eta, Normalization::body).total;
    };
    found = false;
    for (const auto& hit : hits_body) {
      if (find_midpoint_violation(ab_body, bb_body, cc_body, hit.t, hit.s,
                                  efull_value, report.efull_pair,
                                  report.efull_values, report.efull_violation)) {
        report.efull_witness_t = hit.t;
        report.efull_witness_s = hit.s;
        found = true;
        break;
      }
    }
    if (!found) continue;

    return report;
  }
  throw DegenerateConstructionError(
      "build_counterexample: no usable (psi, phi) pair after 8 seed attempts");
}

}  // namespace bhf
