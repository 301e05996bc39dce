#include "bhf/io.hpp"

#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bhf {

using nlohmann::json;

namespace {

json config_meta(const GridConfig& c) {
  return json{{"lambda", c.lambda},
              {"sigma", c.sigma},
              {"g", c.g},
              {"n_radial", c.n_radial},
              {"n_polar", c.n_polar},
              {"n_azimuth", c.n_azimuth},
              {"normalization",
               c.normalization == Normalization::body ? "body" : "intro"}};
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

json to_json(const EnergyBreakdown& e, const GridConfig& config) {
  return json{{"interaction", e.interaction},
              {"field_trace", e.field_trace},
              {"weyl_quadratic", e.weyl_quadratic},
              {"nonconvex", e.nonconvex},
              {"total", e.total},
              {"normalization",
               e.normalization == Normalization::body ? "body" : "intro"},
              {"config", config_meta(config)}};
}

json to_json(const MinimizeResult& r, const GridConfig& config) {
  return json{{"energy", to_json(r.energy, config)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"energy_trajectory", r.energy_trajectory},
              {"stationarity_z", r.stationarity_z},
              {"stationarity_eta", r.stationarity_eta},
              {"j_invariance_defect", r.j_invariance_defect}};
}

json to_json(const PropertyReport& r) {
  return json{{"property", r.property_name},
              {"trials", r.trials},
              {"violations", r.violations},
              {"worst_margin", r.worst_margin},
              {"seed", r.seed}};
}

json to_json(const CounterexampleReport& r, const GridConfig& config) {
  return json{
      {"a", r.a},
      {"b", r.b},
      {"c", r.c},
      {"witness_t", r.witness_t},
      {"witness_s", r.witness_s},
      {"hessian", {{r.hessian(0, 0), r.hessian(0, 1)},
                   {r.hessian(1, 0), r.hessian(1, 1)}}},
      {"det_at_witness", r.det_at_witness},
      {"trace_positive_everywhere", r.trace_positive_everywhere},
      {"midpoint_pair",
       {{r.midpoint_pair[0].first, r.midpoint_pair[0].second},
        {r.midpoint_pair[1].first, r.midpoint_pair[1].second}}},
      {"eprime_values", r.eprime_values},
      {"midpoint_violation", r.midpoint_violation},
      {"efull_witness_t", r.efull_witness_t},
      {"efull_witness_s", r.efull_witness_s},
      {"efull_pair",
       {{r.efull_pair[0].first, r.efull_pair[0].second},
        {r.efull_pair[1].first, r.efull_pair[1].second}}},
      {"efull_values", r.efull_values},
      {"efull_violation", r.efull_violation},
      {"coef_check", {{"a_ge_ir_plus_c", r.coef_check_a},
                      {"b_ge_ir_plus_c", r.coef_check_b}}},
      {"seed_attempts", r.seed_attempts},
      {"config", config_meta(config)}};
}

json to_json(const SweepRecord& r) {
  return json{{"lambda", r.lambda},
              {"g", r.g},
              {"sigma", r.sigma},
              {"n_radial", r.n_radial},
              {"n_polar", r.n_polar},
              {"n_azimuth", r.n_azimuth},
              {"n", r.n},
              {"e_min", r.e_min},
              {"e_trial", r.e_trial},
              {"lower_bound", r.lower_bound},
              {"paper_upper", r.paper_upper},
              {"derived_upper", r.derived_upper},
              {"iterations", r.iterations},
              {"wall_ms", r.wall_ms},
              {"converged", r.converged}};
}

json to_json(const FitResult& r) {
  return json{{"exponent", r.exponent},
              {"prefactor", r.prefactor},
              {"r_squared", r.r_squared},
              {"lambda_min_used", r.lambda_min_used},
              {"lambda_max_used", r.lambda_max_used},
              {"points_used", r.points_used}};
}

json to_json(const ScalingCheckReport& r, const GridConfig& config) {
  return json{{"max_rel_deviation", r.max_rel_deviation},
              {"unitarity_defect", r.unitarity_defect},
              {"trials", r.trials},
              {"seed", r.seed},
              {"config", config_meta(config)}};
}

json grid_to_json(const MomentumGrid& grid) {
  json nodes = json::array();
  for (int i = 0; i < grid.dim; ++i) {
    nodes.push_back(json{{"k", {grid.k(0, i), grid.k(1, i), grid.k(2, i)}},
                         {"tau", grid.tau[i]},
                         {"weight", grid.weights[i]},
                         {"eps", {grid.eps[0][i], grid.eps[1][i], grid.eps[2][i]}},
                         {"antipode", grid.antipode[i]}});
  }
  return json{{"dim", grid.dim},
              {"r_min", grid.r_min},
              {"r_max", grid.r_max},
              {"config", config_meta(grid.config)},
              {"nodes", nodes}};
}

json operator_to_json(const SymOperator& z) {
  json rows = json::array();
  for (int i = 0; i < z.dim(); ++i)
    rows.push_back(vector_to_json(z.mat().row(i).transpose()));
  return json{{"dim", z.dim()}, {"rows", rows}};
}

SymOperator operator_from_json(const json& j) {
  if (!j.contains("dim") || !j.contains("rows"))
    throw IoError("operator document needs 'dim' and 'rows'");
  const int n = j.at("dim").get<int>();
  const auto& rows = j.at("rows");
  if (static_cast<int>(rows.size()) != n)
    throw IoError("operator document row count does not match dim");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<int>(row.size()) != n)
      throw IoError("operator document row length does not match dim");
    for (int jj = 0; jj < n; ++jj) m(i, jj) = row.at(jj).get<double>();
  }
  return SymOperator(std::move(m));
}

void write_operator(const std::string& path, const SymOperator& z) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << operator_to_json(z).dump(2) << "\n";
}

SymOperator read_operator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  json j;
  in >> j;
  return operator_from_json(j);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "lambda,g,sigma,n,e_min,e_trial,lower_bound,paper_upper,derived_upper,"
         "iters,wall_ms\n";
  out.precision(17);
  for (const auto& r : records) {
    out << r.lambda << ',' << r.g << ',' << r.sigma << ',' << r.n << ','
        << r.e_min << ',' << r.e_trial << ',' << r.lower_bound << ','
        << r.paper_upper << ',' << r.derived_upper << ',' << r.iterations << ','
        << r.wall_ms << '\n';
  }
}

GridConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  GridConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string trimmed;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(lineno) + " is not key=value");
    const std::string key = trimmed.substr(0, eq);
    const std::string value = trimmed.substr(eq + 1);
    try {
      if (key == "lambda") config.lambda = std::stod(value);
      else if (key == "sigma") config.sigma = std::stod(value);
      else if (key == "g") config.g = std::stod(value);
      else if (key == "nr") config.n_radial = std::stoi(value);
      else if (key == "ntheta") config.n_polar = std::stoi(value);
      else if (key == "nphi") config.n_azimuth = std::stoi(value);
      else if (key == "normalization") {
        if (value == "body") config.normalization = Normalization::body;
        else if (value == "intro") config.normalization = Normalization::intro;
        else throw IoError("unknown normalization: " + value);
      } else {
        throw IoError("unknown config key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw IoError("config line " + std::to_string(lineno) + ": bad value");
    }
  }
  return config;
}

}  // namespace bhf
