#include "bhf/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bhf {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const GridConfig& c) {
  std::ostringstream os;
  os << "lambda=" << c.lambda << " sigma=" << c.sigma << " g=" << c.g
     << " nr=" << c.n_radial << " ntheta=" << c.n_polar << " nphi=" << c.n_azimuth;
  return os.str();
}

}  // namespace

void GridConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw ConfigError("sigma must lie in (0, 1): " + describe(*this));
  if (!(lambda >= 1.0))
    throw ConfigError("lambda must satisfy lambda >= 1: " + describe(*this));
  if (!(g >= 0.0)) throw ConfigError("coupling g must be >= 0: " + describe(*this));
  if (n_radial < 2) throw ConfigError("n_radial must be >= 2: " + describe(*this));
  if (n_polar < 2) throw ConfigError("n_polar must be >= 2: " + describe(*this));
  if (n_azimuth < 4 || n_azimuth % 2 != 0)
    throw ConfigError("n_azimuth must be even and >= 4: " + describe(*this));
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Mirror so the node set is exactly symmetric about zero.
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

MomentumGrid build_shell_grid(const GridConfig& config, double r_min, double r_max) {
  config.validate();
  if (!(0.0 < r_min && r_min < r_max))
    throw ConfigError("invalid shell bounds [" + std::to_string(r_min) + ", " +
                      std::to_string(r_max) + "]");

  const int nr = config.n_radial, nth = config.n_polar, nph = config.n_azimuth;

  Eigen::VectorXd xr, wr;
  gauss_legendre(nr, xr, wr);
  // affine map to [r_min, r_max]
  const double rc = 0.5 * (r_max + r_min), rh = 0.5 * (r_max - r_min);
  Eigen::VectorXd radius = (rc + rh * xr.array()).matrix();
  Eigen::VectorXd radial_w = rh * wr;

  Eigen::VectorXd ct, wt;  // cos(theta) nodes
  gauss_legendre(nth, ct, wt);
  for (int i = 0; i < nth; ++i) {
    if (std::abs(ct[i]) < 1e-9)
      throw ConfigError("angular layout places a node at k3 = 0 (use even n_polar)");
    if (std::abs(ct[i]) > 1.0 - 1e-9)
      throw ConfigError("angular layout places a node on the polar axis");
  }

  const double wphi = 2.0 * kPi / nph;

  MomentumGrid grid;
  grid.config = config;
  grid.r_min = r_min;
  grid.r_max = r_max;
  const int n_spatial = nr * nth * nph;
  const int dim = 2 * n_spatial;
  grid.dim = dim;
  grid.k.resize(3, dim);
  grid.weights.resize(dim);
  grid.abs_k.resize(dim);
  for (auto& v : grid.k_comp) v.resize(dim);
  for (auto& v : grid.eps) v.resize(dim);
  grid.tau.resize(dim);
  grid.antipode.resize(dim);

  auto index = [&](int ir, int ith, int iph, int itau) {
    return ((ir * nth + ith) * nph + iph) * 2 + itau;
  };

  // Nodes in the upper half-space (cos(theta) > 0) are computed; the lower
  // half is filled by exact negation through the antipodal pairing, so
  // eps(-k, .) = -eps(k, .) and weight equality hold bit-for-bit.
  for (int ir = 0; ir < nr; ++ir) {
    const double r = radius[ir];
    for (int ith = nth / 2; ith < nth; ++ith) {
      const double c = ct[ith];
      const double s = std::sqrt(1.0 - c * c);
      for (int iph = 0; iph < nph; ++iph) {
        const double phi = 2.0 * kPi * (iph + 0.5) / nph;
        Eigen::Vector3d khat(s * std::cos(phi), s * std::sin(phi), c);
        Eigen::Vector3d kvec = r * khat;
        const double w = r * r * radial_w[ir] * wt[ith] * wphi;

        // Coulomb-gauge polarization pair on the upper half-space.
        Eigen::Vector3d e_plus = Eigen::Vector3d::UnitZ().cross(khat).normalized();
        Eigen::Vector3d e_minus = khat.cross(e_plus);

        const int ith_m = nth - 1 - ith;
        const int iph_m = (iph + nph / 2) % nph;
        for (int itau = 0; itau < 2; ++itau) {
          const int i = index(ir, ith, iph, itau);
          const int im = index(ir, ith_m, iph_m, itau);
          const Eigen::Vector3d& e = (itau == 0) ? e_plus : e_minus;

          grid.k.col(i) = kvec;
          grid.k.col(im) = -kvec;
          grid.weights[i] = w;
          grid.weights[im] = w;
          grid.abs_k[i] = r;
          grid.abs_k[im] = r;
          for (int nu = 0; nu < 3; ++nu) {
            grid.k_comp[nu][i] = kvec[nu];
            grid.k_comp[nu][im] = -kvec[nu];
            grid.eps[nu][i] = e[nu];
            grid.eps[nu][im] = -e[nu];
          }
          grid.tau[i] = (itau == 0) ? +1 : -1;
          grid.tau[im] = grid.tau[i];
          grid.antipode[i] = im;
          grid.antipode[im] = i;
        }
      }
    }
  }

  grid.coupling = coupling_vectors(grid, config.g);
  return grid;
}

MomentumGrid build_grid(const GridConfig& config) {
  config.validate();
  return build_shell_grid(config, config.sigma / config.lambda, 1.0);
}

double MomentumGrid::shell_volume() const {
  return 2.0 * (4.0 * kPi / 3.0) * (std::pow(r_max, 3) - std::pow(r_min, 3));
}

std::array<Eigen::VectorXd, 3> coupling_vectors(const MomentumGrid& grid, double g) {
  std::array<Eigen::VectorXd, 3> out;
  Eigen::ArrayXd amp = g * grid.abs_k.array().rsqrt() * grid.weights.array().sqrt();
  for (int nu = 0; nu < 3; ++nu) out[nu] = (amp * grid.eps[nu].array()).matrix();
  return out;
}

Eigen::VectorXd apply_J(const MomentumGrid& grid, const Eigen::VectorXd& f) {
  if (f.size() != grid.dim) throw DimensionError("apply_J: vector size mismatch");
  Eigen::VectorXd out(grid.dim);
  for (int i = 0; i < grid.dim; ++i) out[i] = f[grid.antipode[i]];
  return out;
}

Eigen::VectorXcd apply_J(const MomentumGrid& grid, const Eigen::VectorXcd& f) {
  if (f.size() != grid.dim) throw DimensionError("apply_J: vector size mismatch");
  Eigen::VectorXcd out(grid.dim);
  for (int i = 0; i < grid.dim; ++i) out[i] = std::conj(f[grid.antipode[i]]);
  return out;
}

SymOperator conjugate_by_J(const MomentumGrid& grid, const SymOperator& z) {
  if (z.dim() != grid.dim) throw DimensionError("conjugate_by_J: dimension mismatch");
  Eigen::MatrixXd out(grid.dim, grid.dim);
  const auto& m = z.mat();
  for (int j = 0; j < grid.dim; ++j) {
    const int pj = grid.antipode[j];
    for (int i = 0; i < grid.dim; ++i) out(i, j) = m(grid.antipode[i], pj);
  }
  return SymOperator(std::move(out));
}

Eigen::MatrixXcd conjugate_by_J(const MomentumGrid& grid, const Eigen::MatrixXcd& z) {
  if (z.rows() != grid.dim || z.cols() != grid.dim)
    throw DimensionError("conjugate_by_J: dimension mismatch");
  Eigen::MatrixXcd out(grid.dim, grid.dim);
  for (int j = 0; j < grid.dim; ++j) {
    const int pj = grid.antipode[j];
    for (int i = 0; i < grid.dim; ++i)
      out(i, j) = std::conj(z(grid.antipode[i], pj));
  }
  return out;
}

}  // namespace bhf
