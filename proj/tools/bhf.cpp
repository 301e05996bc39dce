#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bhf/counterexample.hpp"
#include "bhf/energy.hpp"
#include "bhf/io.hpp"
#include "bhf/kernels.hpp"
#include "bhf/solver.hpp"
#include "bhf/sweep.hpp"
#include "bhf/verify.hpp"

#ifdef BHF_USE_LAPACKE
extern "C" void openblas_set_num_threads(int);
#endif

namespace {

// exit codes: 0 success, 1 config/domain error, 2 non-convergence,
// 3 verification failure
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNotConverged = 2;
constexpr int kVerifyFailure = 3;

struct CommonFlags {
  std::string lambda_spec = "8";
  double g = 1.0;
  double sigma = 0.1;
  int nr = 6, ntheta = 6, nphi = 6;
  std::string normalization = "body";
  double tol = 1e-10;
  int max_iter = 200;
  std::uint64_t seed = 7;
  int trials = 500;
  bool fit = false;
  bool enforce_bounds = false;
  int jobs = 1;
  bool deterministic = false;
  std::string out;
  std::string format = "csv";
  std::string dump_operator;
  std::string config_file;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--lambda", f.lambda_spec,
                  "cutoff ratio: value, comma list, or a:b:factor geometric range");
  cmd->add_option("--g", f.g, "coupling constant");
  cmd->add_option("--sigma", f.sigma, "infrared cutoff in (0,1)");
  cmd->add_option("--nr", f.nr, "radial node count");
  cmd->add_option("--ntheta", f.ntheta, "polar node count");
  cmd->add_option("--nphi", f.nphi, "azimuthal node count (even)");
  cmd->add_option("--normalization", f.normalization, "body or intro")
      ->check(CLI::IsMember({"body", "intro"}));
  cmd->add_option("--tol", f.tol, "relative energy-decrease tolerance");
  cmd->add_option("--max-iter", f.max_iter, "solver iteration cap");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--trials", f.trials, "trials per property suite");
  cmd->add_option("--jobs", f.jobs, "max parallel sweep records");
  cmd->add_flag("--deterministic", f.deterministic,
                "sequential execution and serial kernels");
  cmd->add_option("--out", f.out, "output path (default stdout)");
  cmd->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--dump-operator", f.dump_operator,
                  "write the final z operator to this path (JSON)");
  cmd->add_option("--config", f.config_file, "key=value config file");
}

std::vector<double> parse_lambdas(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double a, b, factor;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> b >> c2 >> factor) || c1 != ':' || c2 != ':' ||
        factor <= 1.0 || a <= 0.0 || b < a)
      throw bhf::ConfigError("bad --lambda range: " + spec);
    for (double x = a; x <= b * (1.0 + 1e-12); x *= factor) out.push_back(x);
    return out;
  }
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw bhf::ConfigError("no lambda values in: " + spec);
  return out;
}

bhf::GridConfig make_config(const CommonFlags& f, double lambda) {
  bhf::GridConfig c;
  if (!f.config_file.empty()) c = bhf::read_config_file(f.config_file);
  c.lambda = lambda;
  c.g = f.g;
  c.sigma = f.sigma;
  c.n_radial = f.nr;
  c.n_polar = f.ntheta;
  c.n_azimuth = f.nphi;
  c.normalization = f.normalization == "intro" ? bhf::Normalization::intro
                                               : bhf::Normalization::body;
  c.validate();
  return c;
}

bhf::SolveConfig make_solve(const CommonFlags& f) {
  bhf::SolveConfig s;
  s.tol_energy_rel = f.tol;
  s.max_iters = f.max_iter;
  s.validate();
  return s;
}

void emit(const CommonFlags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(f.out);
  if (!os) throw bhf::IoError("cannot open output path: " + f.out);
  os << text;
}

void apply_determinism(const CommonFlags& f) {
  if (f.deterministic) {
    bhf::kernels::set_parallel(false);
    Eigen::setNbThreads(1);
#ifdef BHF_USE_LAPACKE
    openblas_set_num_threads(1);
#endif
  }
}

int cmd_minimize(const CommonFlags& f) {
  apply_determinism(f);
  auto lambdas = parse_lambdas(f.lambda_spec);
  auto config = make_config(f, lambdas.front());
  auto norm = config.normalization;

  bhf::MomentumGrid grid = bhf::build_grid(config);
  bhf::MinimizeResult result = bhf::minimize(grid, make_solve(f), norm);
  if (!f.dump_operator.empty()) bhf::write_operator(f.dump_operator, result.z);
  emit(f, bhf::to_json(result, config).dump(2) + "\n");
  return result.converged ? kOk : kNotConverged;
}

int cmd_sweep(const CommonFlags& f) {
  apply_determinism(f);
  auto lambdas = parse_lambdas(f.lambda_spec);
  auto base = make_config(f, lambdas.front());

  if (f.enforce_bounds) {
    const double threshold = bhf::bound_threshold_lambda(f.g);
    for (double L : lambdas)
      if (L <= threshold)
        throw bhf::ConfigError("lambda " + std::to_string(L) +
                               " below the bound threshold 3/(8 pi g^2) = " +
                               std::to_string(threshold));
  }

#ifdef BHF_USE_LAPACKE
  if (f.jobs > 1 && !f.deterministic) openblas_set_num_threads(1);
#endif
  auto records = bhf::run_sweep(lambdas, base, make_solve(f), f.jobs, f.deterministic);

  std::optional<bhf::FitResult> fit;
  if (f.fit) fit = bhf::fit_exponent(records);

  int rc = kOk;
  const double threshold = bhf::bound_threshold_lambda(f.g);
  for (const auto& r : records) {
    if (!r.converged) rc = kNotConverged;
    const bool lb_ok = r.lambda <= threshold || r.e_min >= r.lower_bound * 0.98;
    const bool ub_ok = r.e_trial <= r.derived_upper * 1.05;
    if (!lb_ok || !ub_ok) {
      std::cerr << "bound violation at lambda=" << r.lambda << " e_min=" << r.e_min
                << " e_trial=" << r.e_trial << "\n";
      rc = kVerifyFailure;
    }
  }

  if (f.format == "json") {
    nlohmann::json doc;
    doc["records"] = nlohmann::json::array();
    for (const auto& r : records) doc["records"].push_back(bhf::to_json(r));
    if (fit) doc["fit"] = bhf::to_json(*fit);
    emit(f, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    bhf::write_sweep_csv(os, records);
    if (fit) {
      os << "# fit,exponent=" << fit->exponent << ",prefactor=" << fit->prefactor
         << ",r_squared=" << fit->r_squared << ",lambda=" << fit->lambda_min_used
         << ".." << fit->lambda_max_used << ",points=" << fit->points_used << "\n";
    }
    emit(f, os.str());
  }
  return rc;
}

int cmd_counterexample(const CommonFlags& f) {
  apply_determinism(f);
  auto lambdas = parse_lambdas(f.lambda_spec);
  auto config = make_config(f, lambdas.front());
  bhf::MomentumGrid grid = bhf::build_grid(config);

  auto report = bhf::build_counterexample(grid, Eigen::VectorXd::Zero(grid.dim));
  emit(f, bhf::to_json(report, config).dump(2) + "\n");

  const bool ok = report.det_at_witness < 0.0 && report.midpoint_violation > 0.0 &&
                  report.efull_violation > 0.0 && report.trace_positive_everywhere;
  return ok ? kOk : kVerifyFailure;
}

int cmd_verify(const CommonFlags& f) {
  apply_determinism(f);
  auto lambdas = parse_lambdas(f.lambda_spec);
  auto config = make_config(f, lambdas.front());
  bhf::MomentumGrid grid = bhf::build_grid(config);

  std::vector<bhf::PropertyReport> clean_expected;
  for (int dim : {4, 8, 16, 32}) {
    clean_expected.push_back(bhf::verify_trace_upper(dim, f.trials, f.seed));
    clean_expected.back().property_name += "_dim" + std::to_string(dim);
    clean_expected.push_back(bhf::verify_trace_monotone(dim, f.trials, f.seed));
    clean_expected.back().property_name += "_dim" + std::to_string(dim);
  }
  clean_expected.push_back(
      bhf::verify_convexity(grid, f.trials, f.seed, bhf::ConvexityTarget::G));
  clean_expected.push_back(bhf::verify_convexity(grid, f.trials, f.seed,
                                                 bhf::ConvexityTarget::interaction));
  clean_expected.push_back(bhf::verify_coercivity(grid, f.trials, f.seed));
  clean_expected.push_back(bhf::verify_inverse_convexity(8, f.trials, f.seed));

  auto efull = bhf::verify_convexity(grid, f.trials, f.seed, bhf::ConvexityTarget::E);

  nlohmann::json doc;
  doc["reports"] = nlohmann::json::array();
  int rc = kOk;
  for (const auto& r : clean_expected) {
    auto j = bhf::to_json(r);
    j["expected_violations"] = 0;
    doc["reports"].push_back(j);
    if (r.violations > 0) rc = kVerifyFailure;
  }
  {
    auto j = bhf::to_json(efull);
    j["expected_violations"] = ">0";
    doc["reports"].push_back(j);
    if (efull.violations == 0) rc = kVerifyFailure;
  }
  doc["ok"] = rc == kOk;
  emit(f, doc.dump(2) + "\n");
  return rc;
}

int cmd_scalecheck(const CommonFlags& f) {
  apply_determinism(f);
  auto lambdas = parse_lambdas(f.lambda_spec);
  auto config = make_config(f, lambdas.front());
  const int trials = std::min(f.trials, 32);
  auto report = bhf::scaling_identity_check(config, trials, f.seed);
  emit(f, bhf::to_json(report, config).dump(2) + "\n");
  return report.max_rel_deviation <= 1e-10 ? kOk : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bogoliubov-Hartree-Fock energy functional toolkit"};
  app.require_subcommand(1);

  CommonFlags fm, fs, fc, fv, fk;
  auto* minimize = app.add_subcommand("minimize", "run the block-descent solver");
  add_common(minimize, fm);
  auto* sweep = app.add_subcommand("sweep", "lambda sweep with bound checks");
  add_common(sweep, fs);
  sweep->add_flag("--fit", fs.fit, "append a log-log exponent fit");
  sweep->add_flag("--enforce-bounds", fs.enforce_bounds,
                  "reject lambdas below the bound threshold");
  auto* counter = app.add_subcommand("counterexample",
                                     "construct the rank-two non-convexity witness");
  add_common(counter, fc);
  auto* verify = app.add_subcommand("verify", "run all randomized property suites");
  add_common(verify, fv);
  auto* scale = app.add_subcommand("scalecheck", "unscaled vs rescaled identity");
  add_common(scale, fk);

  try {
    app.parse(argc, argv);
    if (minimize->parsed()) return cmd_minimize(fm);
    if (sweep->parsed()) return cmd_sweep(fs);
    if (counter->parsed()) return cmd_counterexample(fc);
    if (verify->parsed()) return cmd_verify(fv);
    if (scale->parsed()) return cmd_scalecheck(fk);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const bhf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const bhf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
